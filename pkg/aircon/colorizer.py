"""
Color maps for simulation output.
"""
from colorama import (
    Back,
    Fore,
    Style,
)


class ColorizedObject:
    """
    Wraps any object so that it renders between a pair of color sequences.
    """

    def __init__(self, obj, color_pair=None):
        """
        :param obj: The object to colorize.
        :param color_pair: The (start, stop) pair of color sequences to wrap
            that object in during string rendering.
        """
        self.obj = obj
        self.color_pair = color_pair

    def _wrap(self, text):
        if not self.color_pair:
            return text

        return '{0}{1}{2}'.format(self.color_pair[0], text, self.color_pair[1])

    def __repr__(self):
        return self._wrap(repr(self.obj))

    def __str__(self):
        return self._wrap(str(self.obj))

    def __int__(self):
        return int(self.obj)

    def __float__(self):
        return float(self.obj)

    def __format__(self, spec):
        return self._wrap(format(self.obj, spec))

    def __eq__(self, other):
        """
        >>> ColorizedObject(0.5) == ColorizedObject(0.5)
        True

        >>> ColorizedObject(0.5) == ColorizedObject(0.5, color_pair=('', ''))
        False
        """
        if isinstance(other, self.__class__):
            return (
                other.obj == self.obj and
                other.color_pair == self.color_pair
            )

        return NotImplemented


class GenericColorizer:
    """
    Turns color tags into pairs of color sequences.
    """
    default_color_map = {}

    def __init__(self, color_map=None, default_color_tag=None):
        """
        :param color_map: A dictionary mapping color tags to (start, stop)
            pairs.
        :param default_color_tag: The tag to fall back to when none of the
            requested tags is known.
        """
        self.color_map = color_map or self.default_color_map
        self.default_color_tag = default_color_tag

    def get_color_pair(self, color_tag, context_color_tag=None):
        """
        Get the color pair for a list of tags.

        :param color_tag: A tag or a list of tags.
        :param context_color_tag: Tags of the enclosing message, restored
            after ``color_tag`` is rendered.
        :returns: A (start, stop) pair.

        >>> GenericColorizer({'a': ('[', ']'), 'b': ('<', '>')}) \
            .get_color_pair(['a', 'b'])
        ('[<', '>]')
        """
        if isinstance(color_tag, str):
            color_tag = [color_tag]

        pairs = [
            self.color_map[tag] for tag in color_tag if tag in self.color_map
        ]

        if not pairs and self.default_color_tag in self.color_map:
            pairs = [self.color_map[self.default_color_tag]]

        if context_color_tag:
            ctx_start, ctx_stop = GenericColorizer(self.color_map) \
                .get_color_pair(context_color_tag)

            if ctx_start or ctx_stop:
                pairs = [(ctx_stop, ctx_start)] + pairs

        return (
            ''.join(start for start, _ in pairs),
            ''.join(stop for _, stop in reversed(pairs)),
        )

    def colorize(self, obj, color_tag=None, context_color_tag=None):
        """
        Colorize an object.

        :param obj: The object to colorize. Marked objects carry their own
            ``color_tag``.
        :param color_tag: The tag to use if ``obj`` is not marked.
        :param context_color_tag: The tag of the enclosing message.
        :returns: A :class:`ColorizedObject`.
        """
        color_tag = getattr(obj, 'color_tag', color_tag)

        if hasattr(obj, 'color_tag'):
            obj = obj.obj

        if color_tag:
            color_pair = self.get_color_pair(
                color_tag=color_tag,
                context_color_tag=context_color_tag,
            )
        else:
            color_pair = None

        return ColorizedObject(obj=obj, color_pair=color_pair)


class Colorizer(GenericColorizer):
    """
    Colorize log entries and consensus results on a color terminal.
    """
    default_color_map = {
        'debug': (Style.DIM + Fore.CYAN, Style.RESET_ALL),
        'info': (Style.RESET_ALL, Style.RESET_ALL),
        'warning': (Fore.YELLOW, Style.RESET_ALL),
        'error': (Fore.RED, Style.RESET_ALL),
        'critical': (Back.RED, Style.RESET_ALL),
        'important': (Style.BRIGHT, Style.RESET_ALL),
        'achieved': (Fore.GREEN + Style.BRIGHT, Style.RESET_ALL),
        'not_achieved': (Fore.RED + Style.BRIGHT, Style.RESET_ALL),
        'passed': (Fore.GREEN, Style.RESET_ALL),
        'halted': (Fore.MAGENTA, Style.RESET_ALL),
        'idle': (Style.DIM, Style.RESET_ALL),
        'pre_prepared': (Fore.CYAN, Style.RESET_ALL),
        'prepared': (Fore.BLUE, Style.RESET_ALL),
        'committed': (Fore.GREEN, Style.RESET_ALL),
        'replied': (Fore.GREEN + Style.BRIGHT, Style.RESET_ALL),
    }


class MonochromaticColorizer(Colorizer):
    """
    Highlighter for streams without color support: only consensus outcomes
    and ``important`` values stand out.
    """
    default_color_map = {
        'important': ('**', '**'),
        'achieved': ('[+] ', ''),
        'not_achieved': ('[-] ', ''),
    }
