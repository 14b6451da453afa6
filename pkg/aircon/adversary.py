"""
Hash symbol vectors sent by users that do not hold the honest block.

Adversaries know the honest vector, use the legal codebook and the same
transmit power as everyone else, and go through the same thresholds.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    InvalidInputError,
)
from .lattice import HashSymbolVector

ADVERSARY_KINDS = ('none', 'random', 'antipodal', 'rho_targeted')


@dataclass(frozen=True)
class AdversaryStrategy:
    """
    What the ``malicious_count`` non-honest users transmit.

    :ivar kind: ``none`` (inconsistent but not malicious), ``random``,
        ``antipodal`` or ``rho_targeted``.
    :ivar rho: The correlation targeted by ``rho_targeted``.
    :ivar malicious_count: How many users follow this strategy.
    """
    kind: str = 'random'
    rho: float = 0.0
    malicious_count: int = 0

    def __post_init__(self):
        if self.kind not in ADVERSARY_KINDS:
            raise ConfigurationError(
                'unsupported adversary {0!r} (expected one of {1})'.format(
                    self.kind,
                    ', '.join(ADVERSARY_KINDS),
                ),
                key='adversary.kind',
            )

        _check_rho(self.rho)

        if self.malicious_count < 0:
            raise InvalidInputError(
                'malicious count must be non-negative, got {0}'.format(
                    self.malicious_count,
                )
            )

    @property
    def conspires(self):
        """
        Whether every malicious user sends the same crafted vector.
        """
        return self.kind in ('antipodal', 'rho_targeted')


def _check_rho(rho):
    if not -1.0 <= rho <= 1.0:
        raise InvalidInputError(
            'rho must be within [-1, 1], got {0}'.format(rho)
        )


def flip_count(length, rho):
    """
    The number of symbols to negate so that a vector of ``length`` symbols
    keeps a correlation of ``rho`` with the original.

    >>> flip_count(43, 1.0), flip_count(43, -1.0)
    (0, 43)
    """
    _check_rho(rho)

    return int(round(length * (1.0 - rho) / 2.0))


def _rho_targeted(honest, rho, rng):
    energy = np.sum(honest.array * honest.array, axis=1)
    light = np.flatnonzero(energy == 1)
    heavy = np.flatnonzero(energy == 2)
    flips = flip_count(len(honest), rho)

    # Negating a symbol of energy e moves the correlation by 2e/|x|²; split
    # the flips between both energies so the flipped energy tracks the
    # target.
    target = honest.energy * (1.0 - rho) / 2.0
    heavy_flips = int(np.clip(
        round(target - flips),
        max(0, flips - light.size),
        min(heavy.size, flips),
    ))
    chosen = np.concatenate((
        rng.choice(heavy, size=heavy_flips, replace=False),
        rng.choice(light, size=flips - heavy_flips, replace=False),
    )).astype(int)
    array = honest.array.copy()
    array[chosen] *= -1

    return HashSymbolVector(array)


def craft_vector(strategy, honest, rng, cb):
    """
    Build one malicious vector from the honest one.

    :param strategy: The :class:`AdversaryStrategy`.
    :param honest: The honest :class:`aircon.lattice.HashSymbolVector`.
    :param rng: A :class:`numpy.random.Generator`.
    :param cb: The :class:`aircon.lattice.Codebook`.
    :returns: A :class:`aircon.lattice.HashSymbolVector` of the same length.
    """
    if len(honest) == 0:
        raise InvalidInputError('the honest vector is empty')

    _check_rho(strategy.rho)

    if strategy.kind == 'none':
        return HashSymbolVector(honest.array)

    if strategy.kind == 'random':
        indices = rng.integers(0, len(cb.points), size=len(honest))

        return HashSymbolVector(cb.as_array()[indices])

    if strategy.kind == 'antipodal':
        return -honest

    return _rho_targeted(honest, strategy.rho, rng)


def craft_vectors(strategy, honest, rng, cb):
    """
    Build the vectors of all ``strategy.malicious_count`` users.

    Conspiring strategies share one vector; ``random`` draws one per user.
    """
    if strategy.malicious_count == 0:
        return []

    if strategy.conspires:
        return [craft_vector(strategy, honest, rng, cb)] * \
            strategy.malicious_count

    return [
        craft_vector(strategy, honest, rng, cb)
        for _ in range(strategy.malicious_count)
    ]


def correlation(crafted, honest):
    """
    The energy-weighted correlation ``crafted . honest / |honest|²``.
    """
    if honest.energy == 0:
        raise InvalidInputError('the honest vector has no energy')

    return float(np.sum(crafted.array * honest.array)) / honest.energy
