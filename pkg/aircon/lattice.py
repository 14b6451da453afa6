"""
The nested Z² lattice code used to modulate hash bits.

The fine lattice is Z² and the coarse (shaping) lattice is 3Z². Codewords are
the eight fine-lattice points of the outer tier of the coarse Voronoi region,
that is {-1, 0, 1}² without the origin, carrying 3 bits per symbol.

Bit groups map to codewords through a fixed table. Indices 0 to 3 walk
counterclockwise from (1, 0) over the upper half plane and index ``7 - b`` is
always the antipode of index ``b``, so complementing a bit group negates its
symbol:

===== ======= =====
index  point  index
===== ======= =====
0     (1, 0)  7
1     (1, 1)  6
2     (0, 1)  5
3     (-1, 1) 4
===== ======= =====
"""
import math

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError

BITS_PER_SYMBOL = 3

_TABLE = (
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
)


class LatticePoint(NamedTuple):
    """
    A point of the fine lattice Z².
    """
    re: int
    im: int

    def __neg__(self):
        return LatticePoint(-self.re, -self.im)

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def energy(self):
        """
        The squared norm of the point.

        >>> LatticePoint(-1, 1).energy
        2
        """
        return self.re * self.re + self.im * self.im


@dataclass(frozen=True)
class Codebook:
    """
    The 8-codeword nested lattice codebook.

    :ivar points: The codewords, indexed by their 3-bit value.
    :ivar coarse_scale: The coarse lattice is ``coarse_scale * Z²``.
    :ivar tx_power_scale: Amplitude factor giving unit average symbol power at
        transmit.
    """
    points: tuple
    coarse_scale: int = 3
    tx_power_scale: float = 1.0
    bits_per_symbol: int = BITS_PER_SYMBOL

    def __post_init__(self):
        object.__setattr__(
            self,
            'points',
            tuple(LatticePoint(*p) for p in self.points),
        )

        if len(self.points) != 2 ** self.bits_per_symbol:
            raise InvalidInputError(
                'a codebook needs {0} points, got {1}'.format(
                    2 ** self.bits_per_symbol,
                    len(self.points),
                )
            )

        points = set(self.points)

        if len(points) != len(self.points):
            raise InvalidInputError('codebook points must be distinct')

        if LatticePoint(0, 0) in points:
            raise InvalidInputError('the origin is not a codeword')

        if any(-p not in points for p in points):
            raise InvalidInputError('codebook must be closed under negation')

        half = self.coarse_scale / 2

        if any(abs(p.re) >= half or abs(p.im) >= half for p in points):
            raise InvalidInputError(
                'codewords must lie inside the coarse Voronoi region'
            )

    @property
    def signal_power(self):
        """
        The mean squared norm of the codewords (σ_s²).
        """
        return sum(p.energy for p in self.points) / len(self.points)

    def as_array(self):
        """
        The codewords as an ``(8, 2)`` integer array, row ``b`` being the
        point for bit group ``b``.
        """
        array = np.array(self.points, dtype=np.int64)
        array.setflags(write=False)

        return array

    def index_of(self, point):
        """
        The bit group a codeword stands for.

        :param point: A codeword.
        :returns: Its index in ``0..7``.
        """
        try:
            return self.points.index(LatticePoint(*point))
        except ValueError:
            raise InvalidInputError(
                '{0!r} is not a codeword'.format(tuple(point))
            )


class PointVector:
    """
    A read-only sequence of Z² points, one per subcarrier, held as an
    ``(N, 2)`` integer array.
    """

    def __init__(self, points):
        array = np.array(points, dtype=np.int64).reshape(-1, 2)
        array.setflags(write=False)
        self.array = array

    def __len__(self):
        return self.array.shape[0]

    def __iter__(self):
        return (LatticePoint(int(re), int(im)) for re, im in self.array)

    def __getitem__(self, index):
        re, im = self.array[index]

        return LatticePoint(int(re), int(im))

    def __neg__(self):
        return type(self)(-self.array)

    def __eq__(self, other):
        if isinstance(other, PointVector):
            return np.array_equal(self.array, other.array)

        return NotImplemented

    def __repr__(self):
        return '{klass}({n} points)'.format(
            klass=self.__class__.__name__,
            n=len(self),
        )

    @property
    def points(self):
        """
        The entries as a list of :class:`LatticePoint`.
        """
        return list(self)

    @property
    def energy(self):
        """
        The squared norm of the vector viewed in R^(2N).
        """
        return int(np.sum(self.array * self.array))

    def as_complex(self):
        """
        The entries as complex numbers.
        """
        return self.array[:, 0] + 1j * self.array[:, 1]


class HashSymbolVector(PointVector):
    """
    The codeword sequence encoding one hash value.
    """

    @property
    def symbols(self):
        """
        The symbols as a list of :class:`LatticePoint`.
        """
        return self.points


def build_codebook():
    """
    Build the outer-tier Z² codebook.

    >>> cb = build_codebook()
    >>> len(cb.points), cb.coarse_scale, cb.signal_power
    (8, 3, 1.5)
    """
    points = tuple(LatticePoint(re, im) for re, im in _TABLE)
    signal_power = sum(p.energy for p in points) / len(points)

    return Codebook(
        points=points,
        coarse_scale=3,
        tx_power_scale=1.0 / math.sqrt(signal_power),
    )


def _as_bit_array(bits):
    if isinstance(bits, str):
        if set(bits) - {'0', '1'}:
            raise InvalidInputError('bit strings may only contain 0 and 1')

        return np.array([int(b) for b in bits], dtype=np.uint8)

    array = np.asarray(bits)

    if array.ndim != 1 or (array.size and not np.isin(array, (0, 1)).all()):
        raise InvalidInputError('bits must be a flat sequence of 0 and 1')

    return array.astype(np.uint8)


def encode_bits(bits, cb):
    """
    Map a bit-string onto codewords, 3 bits per symbol, most significant bit
    first. The last group is zero-padded.

    :param bits: A string of ``'0'``/``'1'`` characters or a sequence of 0/1
        integers.
    :param cb: The :class:`Codebook`.
    :returns: A :class:`HashSymbolVector` of ``ceil(len(bits) / 3)`` symbols.

    >>> encode_bits('000111', build_codebook()).symbols
    [LatticePoint(re=1, im=0), LatticePoint(re=-1, im=0)]
    """
    array = _as_bit_array(bits)

    if array.size == 0:
        raise InvalidInputError('cannot encode an empty bit-string')

    width = cb.bits_per_symbol
    padded = np.zeros(-(-array.size // width) * width, dtype=np.int64)
    padded[:array.size] = array
    groups = padded.reshape(-1, width)
    indices = groups @ (1 << np.arange(width - 1, -1, -1))

    return HashSymbolVector(cb.as_array()[indices])


def decode_symbols(vector, cb):
    """
    Invert :func:`encode_bits`, padding included.

    :param vector: A :class:`HashSymbolVector` of codewords.
    :param cb: The :class:`Codebook`.
    :returns: A bit-string whose length is a multiple of 3.
    """
    return ''.join(
        format(cb.index_of(point), '0{0}b'.format(cb.bits_per_symbol))
        for point in vector
    )


def quantize(y):
    """
    Vectorised nearest fine-lattice point for complex samples.

    Each coordinate is rounded to the nearest integer; half-integers round
    down (towards the smaller integer).

    :param y: A complex array.
    :returns: An integer array of shape ``y.shape + (2,)``.
    """
    y = np.asarray(y, dtype=complex)

    if not np.isfinite(y).all():
        raise InvalidInputError('cannot quantize non-finite samples')

    coords = np.stack((y.real, y.imag), axis=-1)

    return np.ceil(coords - 0.5).astype(np.int64)


def quantize_to_fine(y):
    """
    Quantize one complex sample to the nearest point of Z².

    >>> quantize_to_fine(complex(2.2, -0.8))
    LatticePoint(re=2, im=-1)

    >>> quantize_to_fine(complex(0.5, 0.5))
    LatticePoint(re=0, im=0)
    """
    re, im = quantize(complex(y))

    return LatticePoint(int(re), int(im))


def mod_coarse(p, cb):
    """
    Reduce a lattice point modulo the coarse lattice, into the centered
    interval ``[-c/2, c/2)`` per coordinate.

    :param p: A :class:`LatticePoint`, or an integer array whose last axis
        holds (re, im).
    :param cb: The :class:`Codebook` giving ``c = cb.coarse_scale``.

    >>> mod_coarse(LatticePoint(4, -2), build_codebook())
    LatticePoint(re=1, im=1)
    """
    scale = cb.coarse_scale
    array = np.asarray(p, dtype=np.int64)
    reduced = array - scale * np.floor((array + scale / 2) / scale) \
        .astype(np.int64)

    if isinstance(p, LatticePoint):
        return LatticePoint(int(reduced[0]), int(reduced[1]))

    return reduced
