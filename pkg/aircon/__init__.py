"""
Over-the-air byzantine-fault-tolerant consensus: lattice-coded hash
superposition, channel simulation and Monte-Carlo evaluation.
"""

import logging

from .log import (
    ColorizingFormatter,
    ColorizingStreamHandler,
)

__all__ = ['basicConfig']


def basicConfig(
    format=None,
    level=None,
    stream=None,
    color=True,
):
    """
    Route simulation logs to a colorizing stream handler on the root logger.

    Nothing happens if the root logger already has handlers, so embedding
    applications keep control of their logging setup.

    :param format: The format to be passed to the formatter. Defaults to
        ``'%(levelname)s:%(name)s:%(message)s'``.
    :param level: Set the root logger to the specified level.
    :param stream: The output stream. Defaults to :data:`sys.stderr`.
    :param color: If falsy, color sequences are never emitted even on a
        terminal; outcomes are still highlighted.
    :returns: The installed handler, or :const:`None`.
    """
    logger = logging.getLogger()

    if logger.handlers:
        return None

    handler = ColorizingStreamHandler(stream=stream)
    handler.color_disabled = not color
    handler.setFormatter(ColorizingFormatter(
        fmt=format or '%(levelname)s:%(name)s:%(message)s',
    ))
    logger.addHandler(handler)

    if level:
        logger.setLevel(level)

    return handler
