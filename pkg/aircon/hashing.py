"""
Block hashing.

Hashes only cover the block payload: two users holding the same candidate
block always produce the same bits, whoever they are.
"""
import hashlib

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .lattice import encode_bits

DEFAULT_HASH_BITS = 128


@dataclass(frozen=True)
class CandidateBlock:
    """
    A block proposed by the primary.

    :ivar payload: The opaque block content.
    :ivar height: The position of the block in the chain.
    """
    payload: bytes
    height: int = 0

    def __post_init__(self):
        if not self.payload:
            raise InvalidInputError('a candidate block needs a payload')

        if self.height < 0:
            raise InvalidInputError(
                'block height must be non-negative, got {0}'.format(
                    self.height,
                )
            )


@dataclass(frozen=True)
class HashValue:
    """
    A block hash as a sequence of ``length`` bits.
    """
    bits: tuple

    @property
    def length(self):
        return len(self.bits)

    def __str__(self):
        return ''.join(map(str, self.bits))


def hash_block(block, length=DEFAULT_HASH_BITS):
    """
    Hash a candidate block into ``length`` bits.

    The digest is SHAKE-256 of the payload, read out to exactly ``length``
    bits, so any length works and the bits behave as a uniform source.

    :param block: The :class:`CandidateBlock`.
    :param length: The hash length in bits.
    :returns: A :class:`HashValue`.

    >>> hash_block(CandidateBlock(b'block'), 12).length
    12
    """
    if not block.payload:
        raise InvalidInputError('cannot hash an empty payload')

    if length < 1:
        raise InvalidInputError(
            'hash length must be positive, got {0}'.format(length)
        )

    digest = hashlib.shake_256(block.payload).digest(-(-length // 8))
    bits = np.unpackbits(np.frombuffer(digest, dtype=np.uint8))[:length]

    return HashValue(bits=tuple(int(b) for b in bits))


def hash_symbols(block, cb, length=DEFAULT_HASH_BITS):
    """
    Hash a block and encode the bits onto the lattice codebook.

    :returns: A :class:`aircon.lattice.HashSymbolVector`.
    """
    return encode_bits(hash_block(block, length).bits, cb)
