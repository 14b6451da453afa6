"""
Colored logging for simulation runs.
"""
import sys
import logging

from contextlib import contextmanager

from colorama import AnsiToWin32

from .colorizer import (
    Colorizer,
    MonochromaticColorizer,
)
from .mark import Mark


def stream_has_color_support(stream):
    """
    Check if a stream has color support.

    :param stream: The stream to check.
    :returns: True if stream is attached to a terminal.
    """
    return getattr(stream, 'isatty', lambda: False)()


class ColorizingFormatter(logging.Formatter):
    """
    A formatter that renders marked arguments with the colorizer bound to the
    record by :class:`ColorizingStreamHandler`.

    Without a bound colorizer it behaves exactly like
    :class:`logging.Formatter`.
    """

    @contextmanager
    def _patch_record(self, record, colorizer, message_color_tag):
        saved = record.__dict__.copy()

        if colorizer:
            def colorize(value):
                return colorizer.colorize(
                    value,
                    context_color_tag=message_color_tag,
                )

            if isinstance(record.args, dict):
                record.args = {
                    key: colorize(value)
                    for key, value in record.args.items()
                }
            elif record.args:
                record.args = tuple(map(colorize, record.args))

            record.levelname = colorizer.colorize(record.levelname)
            record.name = colorizer.colorize(record.name)

            if message_color_tag:
                message = str(colorizer.colorize(
                    Mark(record.getMessage(), color_tag=message_color_tag),
                ))
                record.getMessage = lambda: message

        try:
            yield
        finally:
            record.__dict__ = saved

    def format(self, record):
        """
        Format a record, colorizing its marked arguments.

        :param record: A :class:`logging.LogRecord`.
        :returns: The formatted string.
        """
        colorizer = getattr(record, 'colorizer', None)
        message_color_tag = getattr(record, 'message_color_tag', None)

        with self._patch_record(record, colorizer, message_color_tag):
            return super().format(record)


class ColorizingStreamHandler(logging.StreamHandler):
    """
    A stream handler that picks a colorizer depending on whether its stream
    can render colors.
    """

    _RECORD_ATTRIBUTE_NAME = 'colorizer'
    default_attributes_map = {
        'name': 'important',
        'levelname': lambda record: str(record.levelname).lower(),
        'message': lambda record: (
            str(record.levelname).lower()
            if record.levelno >= logging.WARNING else None
        ),
    }

    def __init__(
        self,
        stream=None,
        colorizer=None,
        highlighter=None,
        attributes_map=None,
    ):
        """
        :param stream: The stream to use for output. Defaults to
            :data:`sys.stderr`.
        :param colorizer: The colorizer for color-capable streams.
        :param highlighter: The colorizer for other streams. Defaults to a
            :class:`aircon.colorizer.MonochromaticColorizer`.
        :param attributes_map: A map of record attributes to color tags (or
            callables returning a color tag).
        """
        if not stream:
            stream = sys.stderr

        self.has_color_support = stream_has_color_support(stream)
        self.color_disabled = False
        self.attributes_map = attributes_map or self.default_attributes_map

        if self.has_color_support:
            stream = AnsiToWin32(stream).stream

        super().__init__(stream)
        self.colorizer = colorizer or Colorizer()
        self.highlighter = highlighter or MonochromaticColorizer()
        self.setFormatter(ColorizingFormatter())

    @property
    def active_colorizer(self):
        """
        The colorizer or the highlighter, depending on color support.
        """
        if self.has_color_support and not self.color_disabled:
            return self.colorizer

        return self.highlighter

    @contextmanager
    def _bind_to_record(self, record):
        setattr(record, self._RECORD_ATTRIBUTE_NAME, self.active_colorizer)

        try:
            yield
        finally:
            delattr(record, self._RECORD_ATTRIBUTE_NAME)

    @staticmethod
    def _color_tag_from_record(color_tag, record):
        if callable(color_tag):
            return color_tag(record)

        return color_tag

    def format(self, record):
        """
        Format a record, marking the attributes listed in
        :attr:`attributes_map`.
        """
        with self._bind_to_record(record):
            for attribute, color_tag in self.attributes_map.items():
                tag = self._color_tag_from_record(color_tag, record)

                if attribute == 'message':
                    record.message_color_tag = tag
                elif tag:
                    setattr(record, attribute, Mark(
                        getattr(record, attribute),
                        color_tag=tag,
                    ))

            try:
                return super().format(record)
            finally:
                record.__dict__.pop('message_color_tag', None)

                for attribute in self.attributes_map:
                    value = getattr(record, attribute, None)

                    if isinstance(value, Mark):
                        setattr(record, attribute, value.obj)
