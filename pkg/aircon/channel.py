"""
Uplink channel models: per-user, per-subcarrier complex gains.

Three kinds are supported:

* ``awgn``: every gain is exactly 1;
* ``flat``: one Rayleigh gain per user, shared by all subcarriers;
* ``epa``: the Extended Pedestrian A tapped delay line evaluated at each
  subcarrier frequency.

All kinds have unit average power per user so that the SNR is the ratio of a
user's unit symbol power to the noise variance at the base station.
"""
from dataclasses import (
    dataclass,
    field,
)

import numpy as np

from .errors import (
    ConfigurationError,
    InvalidInputError,
)

CHANNEL_KINDS = ('awgn', 'flat', 'epa')


@dataclass(frozen=True)
class EpaProfile:
    """
    Tap delays and powers of the EPA multipath profile.
    """
    delays_ns: tuple = (0, 30, 70, 90, 110, 190, 410)
    powers_db: tuple = (0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8)

    def __post_init__(self):
        if len(self.delays_ns) != len(self.powers_db):
            raise InvalidInputError('delays and powers differ in length')

        if any(p > 0 for p in self.powers_db):
            raise InvalidInputError('tap powers cannot exceed 0 dB')

    @property
    def normalized_powers(self):
        """
        Linear tap powers summing to one.
        """
        powers = 10.0 ** (np.asarray(self.powers_db) / 10.0)

        return powers / powers.sum()

    @property
    def delays_s(self):
        return np.asarray(self.delays_ns, dtype=float) * 1e-9


EPA = EpaProfile()


@dataclass(frozen=True)
class ChannelConfig:
    """
    Channel parameters of one simulation point.

    :ivar kind: One of ``awgn``, ``flat`` or ``epa``.
    :ivar snr_db: Per-user SNR at the base station, in dB.
    :ivar num_subcarriers: Number of active subcarriers N.
    :ivar sampling_rate_hz: Sampling rate; subcarrier ``n`` sits at
        ``n * sampling_rate_hz / N``.
    :ivar residual_phase_rad: Bound of the per-user residual phase left by
        synchronization (0 disables it).
    :ivar seed: Seed of the realization.
    """
    kind: str = 'awgn'
    snr_db: float = 20.0
    num_subcarriers: int = 72
    sampling_rate_hz: float = 1.92e6
    residual_phase_rad: float = 0.0
    seed: int = 0
    profile: EpaProfile = field(default=EPA, repr=False)

    def __post_init__(self):
        if self.kind not in CHANNEL_KINDS:
            raise ConfigurationError(
                'unsupported channel kind {0!r} (expected one of {1})'.format(
                    self.kind,
                    ', '.join(CHANNEL_KINDS),
                ),
                key='channel.kind',
            )

        if self.num_subcarriers < 1:
            raise ConfigurationError(
                'must be at least 1, got {0}'.format(self.num_subcarriers),
                key='channel.num_subcarriers',
            )

        if self.sampling_rate_hz <= 0:
            raise ConfigurationError(
                'must be positive, got {0}'.format(self.sampling_rate_hz),
                key='channel.sampling_rate_hz',
            )

        if self.residual_phase_rad < 0:
            raise ConfigurationError(
                'must be non-negative', key='channel.residual_phase_rad',
            )

    @property
    def noise_var(self):
        """
        The noise variance per complex sample for unit signal power.
        """
        return snr_to_noise_var(self.snr_db)

    def subcarrier_frequencies(self, positions=None):
        """
        The baseband frequencies of the given subcarrier indices (all of them
        by default), in Hz.
        """
        if positions is None:
            positions = np.arange(self.num_subcarriers)

        spacing = self.sampling_rate_hz / self.num_subcarriers

        return np.asarray(positions, dtype=float) * spacing


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    The complex gains ``h[k, n]`` of K users over N subcarriers and the noise
    variance at the base station.
    """
    gains: np.ndarray
    noise_var: float

    def __post_init__(self):
        gains = np.array(self.gains, dtype=complex, ndmin=2)

        if not np.isfinite(gains).all():
            raise InvalidInputError('channel gains must be finite')

        gains.setflags(write=False)
        object.__setattr__(self, 'gains', gains)

    @property
    def num_users(self):
        return self.gains.shape[0]

    @property
    def num_subcarriers(self):
        return self.gains.shape[1]

    def take(self, n):
        """
        Restrict the realization to its first ``n`` subcarriers.
        """
        if not 1 <= n <= self.num_subcarriers:
            raise InvalidInputError(
                'cannot take {0} of {1} subcarriers'.format(
                    n,
                    self.num_subcarriers,
                )
            )

        return ChannelRealization(self.gains[:, :n], self.noise_var)


def snr_to_noise_var(snr_db):
    """
    Convert an SNR in dB to a noise variance for unit signal power.

    >>> snr_to_noise_var(10.0)
    0.1
    """
    return float(10.0 ** (-snr_db / 10.0))


def _complex_normal(rng, shape, variance=1.0):
    scale = np.sqrt(variance / 2.0)

    return scale * (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    )


def _epa_gains(cfg, num_users, rng):
    powers = cfg.profile.normalized_powers
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(num_users, powers.size))
    taps = np.sqrt(powers) * np.exp(1j * phases)
    steering = np.exp(
        -2j * np.pi * np.outer(cfg.profile.delays_s,
                               cfg.subcarrier_frequencies())
    )

    return taps @ steering


def realize_channel(cfg, num_users):
    """
    Draw the gains of ``num_users`` independent users.

    :param cfg: The :class:`ChannelConfig`; its ``seed`` fixes the draw.
    :param num_users: The number of users K.
    :returns: A :class:`ChannelRealization`.
    """
    if num_users < 1:
        raise InvalidInputError(
            'need at least one user, got {0}'.format(num_users)
        )

    shape = (num_users, cfg.num_subcarriers)
    rng = np.random.default_rng(cfg.seed)

    if cfg.kind == 'awgn':
        gains = np.ones(shape, dtype=complex)
    elif cfg.kind == 'flat':
        gains = np.repeat(
            _complex_normal(rng, (num_users, 1)),
            cfg.num_subcarriers,
            axis=1,
        )
    else:
        gains = _epa_gains(cfg, num_users, rng)

    return ChannelRealization(gains=gains, noise_var=cfg.noise_var)


def add_noise(x, noise_var, rng):
    """
    Add circularly-symmetric complex Gaussian noise.

    :param x: The complex samples.
    :param noise_var: The variance per complex sample (half of it per real
        dimension).
    :param rng: A :class:`numpy.random.Generator`.
    :returns: The noisy samples.
    """
    if noise_var < 0:
        raise InvalidInputError(
            'noise variance must be non-negative, got {0}'.format(noise_var)
        )

    x = np.asarray(x, dtype=complex)

    if noise_var == 0:
        return x.copy()

    return x + _complex_normal(rng, x.shape, noise_var)


def frequency_correlation(cfg, positions):
    """
    The model autocorrelation ``E{h_i h_j*}`` of a user's gains at the given
    subcarriers.

    :param cfg: The :class:`ChannelConfig`.
    :param positions: Subcarrier indices.
    :returns: A Hermitian matrix, all-ones for the ``awgn`` and ``flat``
        kinds.
    """
    positions = np.asarray(positions)

    if cfg.kind in ('awgn', 'flat'):
        return np.ones((positions.size, positions.size), dtype=complex)

    freqs = cfg.subcarrier_frequencies(positions)
    delta = freqs[:, None] - freqs[None, :]
    powers = cfg.profile.normalized_powers

    return np.einsum(
        'l,ijl->ij',
        powers,
        np.exp(-2j * np.pi * delta[..., None] * cfg.profile.delays_s),
    )
