"""
Mark values in log messages for colored output.

Marked values render exactly like the wrapped value on streams without color
support, so log calls never need to know where their output ends up.
"""


class Mark:
    """
    Wraps any object and mark it for colored output.
    """

    def __init__(self, obj, color_tag):
        """
        Mark ``obj`` for coloration.

        :param obj: The object to mark for colored output.
        :param color_tag: A color tag or a list of color tags.

        Nested marks are flattened and their tags appended.

        >>> Mark(42, 'a').color_tag
        ['a']

        >>> Mark(Mark(42, 'c'), ['a', 'b']) == Mark(42, ['a', 'b', 'c'])
        True
        """
        if isinstance(color_tag, str):
            color_tag = [color_tag]
        else:
            color_tag = list(color_tag)

        if isinstance(obj, Mark):
            color_tag.extend(obj.color_tag)
            obj = obj.obj

        self.obj = obj
        self.color_tag = color_tag

    def __repr__(self):
        """
        >>> repr(Mark('a', 'b'))
        "Mark('a', ['b'])"
        """
        return '{klass}({obj!r}, {color_tag!r})'.format(
            klass=self.__class__.__name__,
            obj=self.obj,
            color_tag=self.color_tag,
        )

    def __str__(self):
        return str(self.obj)

    def __format__(self, spec):
        """
        >>> '{0:.3f}'.format(Mark(0.21923, 'important'))
        '0.219'
        """
        return format(self.obj, spec)

    def __int__(self):
        return int(self.obj)

    def __float__(self):
        return float(self.obj)

    def __bool__(self):
        return bool(self.obj)

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return (
                other.obj == self.obj and
                other.color_tag == self.color_tag
            )

        return NotImplemented


def important(obj):
    """
    Mark an object as important.

    >>> important('K=7').color_tag
    ['important']
    """
    return Mark(obj, 'important')


def outcome(achieved):
    """
    Mark a consensus outcome.

    :param achieved: Whether consensus was achieved.
    :returns: A mark rendering as ``achieved`` or ``not achieved``.

    >>> str(outcome(True)), outcome(False).color_tag
    ('achieved', ['not_achieved'])
    """
    if achieved:
        return Mark('achieved', 'achieved')

    return Mark('not achieved', 'not_achieved')


def phase(node_phase):
    """
    Mark a node phase with the tag of the same name.

    :param node_phase: A :class:`aircon.consensus.NodePhase`.
    """
    return Mark(node_phase.value, node_phase.value)


def hcf(value, threshold):
    """
    Mark a hash consistency factor against the threshold it was tested with.

    The comparison is strict, like the protocol's.

    >>> hcf(0.5, 0.5).color_tag
    ['halted']

    >>> hcf(0.51, 0.5).color_tag
    ['passed']
    """
    return Mark(
        round(float(value), 4),
        'passed' if value > threshold else 'halted',
    )
