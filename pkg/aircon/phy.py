"""
One over-the-air computation round.

Users pre-compensate their channel, transmit lattice symbols on the same
subcarriers at the same time, and the base station receives the sum. The
base station quantizes that sum to the fine lattice and broadcasts it back.
"""
import logging

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import (
    ChannelRealization,
    add_noise,
    snr_to_noise_var,
)
from .errors import (
    ConfigurationError,
    InvalidInputError,
)
from .lattice import (
    PointVector,
    quantize,
)

logger = logging.getLogger(__name__)

DOWNLINK_MODES = ('ideal', 'noisy')


class SuperposedVector(PointVector):
    """
    The quantized aggregate ``t``, one Z² point per subcarrier.
    """


@dataclass(frozen=True, eq=False)
class PrecompensationMatrix:
    """
    The coefficients ``b[k, n]`` each user applies before transmitting.
    """
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex, ndmin=2)

        if not np.isfinite(coeffs).all():
            raise InvalidInputError('precompensation must be finite')

        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def shape(self):
        return self.coeffs.shape

    @classmethod
    def perfect(cls, ch, max_gain=None):
        """
        Invert the channel exactly, ``b = h* / |h|²``.

        :param ch: The :class:`aircon.channel.ChannelRealization`.
        :param max_gain: If set, coefficient magnitudes are clipped to it.
        """
        return cls(invert_gains(ch.gains, max_gain=max_gain))

    def take(self, n):
        """
        Restrict the coefficients to the first ``n`` subcarriers.
        """
        return PrecompensationMatrix(self.coeffs[:, :n])


def invert_gains(gains, max_gain=None):
    """
    Channel inversion ``h* / |h|²``, optionally clipped in magnitude.

    >>> h = np.array([2j, 0.5])
    >>> np.allclose(invert_gains(h) * h, 1.0)
    True
    """
    gains = np.asarray(gains, dtype=complex)
    coeffs = np.conj(gains) / np.abs(gains) ** 2

    if max_gain is not None:
        coeffs = clip_magnitude(coeffs, max_gain)

    return coeffs


def clip_magnitude(coeffs, max_gain):
    """
    Scale down the coefficients whose magnitude exceeds ``max_gain``.

    >>> np.abs(clip_magnitude(np.array([4.0, -0.5j]), 2.0)).tolist()
    [2.0, 0.5]
    """
    magnitude = np.abs(coeffs)

    return np.where(
        magnitude > max_gain,
        coeffs * (max_gain / np.maximum(magnitude, max_gain)),
        coeffs,
    )


@dataclass(frozen=True)
class Downlink:
    """
    How the base station reaches the users.

    :ivar mode: ``ideal`` (error-free) or ``noisy`` (independent AWGN per
        user).
    :ivar snr_db: The downlink SNR used in ``noisy`` mode.
    """
    mode: str = 'ideal'
    snr_db: float = 30.0

    def __post_init__(self):
        if self.mode not in DOWNLINK_MODES:
            raise ConfigurationError(
                'unsupported downlink mode {0!r}'.format(self.mode),
                key='downlink.mode',
            )

    @property
    def is_ideal(self):
        return self.mode == 'ideal'

    @property
    def noise_var(self):
        return snr_to_noise_var(self.snr_db)


def _check_dimensions(vectors, ch, pc, users):
    if not vectors:
        raise InvalidInputError('at least one user must transmit')

    length = len(vectors[0])

    if any(len(v) != length for v in vectors):
        raise InvalidInputError('hash symbol vectors differ in length')

    if ch.gains.shape != pc.shape:
        raise InvalidInputError(
            'channel is {0} but precompensation is {1}'.format(
                ch.gains.shape,
                pc.shape,
            )
        )

    if users is None:
        users = np.arange(len(vectors))
    else:
        users = np.asarray(users, dtype=int)

    if users.size != len(vectors):
        raise InvalidInputError(
            '{0} vectors for {1} users'.format(len(vectors), users.size)
        )

    if ch.num_subcarriers != length:
        raise InvalidInputError(
            'vectors have {0} symbols but the channel has {1} '
            'subcarriers'.format(length, ch.num_subcarriers)
        )

    if users.size and (users.min() < 0 or users.max() >= ch.num_users):
        raise InvalidInputError('user index outside the channel')

    return users


def superpose(vectors, ch, pc, cb, rng, users=None):
    """
    The signal the base station receives, before quantization.

    Each user scales its symbols by ``cb.tx_power_scale``, multiplies by its
    precompensation and goes through its channel; the base station adds
    noise and removes the transmit scaling.

    :param vectors: The transmitted :class:`aircon.lattice.HashSymbolVector`
        objects.
    :param ch: The actual :class:`aircon.channel.ChannelRealization`.
    :param pc: The :class:`PrecompensationMatrix` in use.
    :param cb: The :class:`aircon.lattice.Codebook`.
    :param rng: A :class:`numpy.random.Generator` for the noise.
    :param users: The channel rows of the transmitters, ``0..len(vectors)-1``
        by default.
    :returns: A complex array with one sample per subcarrier.
    """
    users = _check_dimensions(vectors, ch, pc, users)
    symbols = np.stack([v.as_complex() for v in vectors])
    effective = ch.gains[users] * pc.coeffs[users]
    y = np.sum(effective * symbols, axis=0) * cb.tx_power_scale
    y = add_noise(y, ch.noise_var, rng)

    return y / cb.tx_power_scale


def aircomp_round(vectors, ch, pc, cb, rng, users=None):
    """
    Run one uplink over-the-air computation and quantize the result.

    Takes the same arguments as :func:`superpose`.

    :returns: The :class:`SuperposedVector` ``t``.
    """
    return SuperposedVector(quantize(superpose(
        vectors,
        ch,
        pc,
        cb,
        rng,
        users=users,
    )))


def broadcast_aggregate(t, downlink, num_users, cb, rng=None):
    """
    Send ``t`` back to every user.

    In ``noisy`` mode ``t`` is transmitted with the codebook power scaling
    through an independent AWGN downlink per user and quantized again by each
    user.

    :param t: The :class:`SuperposedVector`.
    :param downlink: The :class:`Downlink`.
    :param num_users: How many users receive it.
    :param cb: The :class:`aircon.lattice.Codebook`.
    :param rng: A :class:`numpy.random.Generator`, needed in ``noisy`` mode.
    :returns: A list with the vector each user received.
    """
    if downlink.is_ideal:
        return [t] * num_users

    if rng is None:
        raise InvalidInputError('a noisy downlink needs a random generator')

    sent = t.as_complex() * cb.tx_power_scale
    received = add_noise(
        np.broadcast_to(sent, (num_users, len(t))),
        downlink.noise_var,
        rng,
    ) / cb.tx_power_scale

    return [SuperposedVector(points) for points in quantize(received)]


def apply_residual_phase(ch, max_phase_rad, rng):
    """
    Rotate each user's gains by a random phase uniform in
    ``[-max_phase_rad, max_phase_rad]``.

    This models the timing offset left within the cyclic prefix after the
    CSI snapshot used for precompensation was taken.

    :returns: A new :class:`aircon.channel.ChannelRealization`.
    """
    if max_phase_rad < 0:
        raise InvalidInputError(
            'phase bound must be non-negative, got {0}'.format(max_phase_rad)
        )

    if max_phase_rad == 0:
        return ch

    phases = rng.uniform(-max_phase_rad, max_phase_rad, size=ch.num_users)

    return ChannelRealization(
        gains=ch.gains * np.exp(1j * phases)[:, None],
        noise_var=ch.noise_var,
    )


@dataclass(frozen=True)
class NomographicFunction:
    """
    A function computable over the air as ``psi(sum(phi(s_k)), K)``.
    """
    name: str
    phi: Callable
    psi: Callable


ARITHMETIC_MEAN = NomographicFunction(
    name='arithmetic_mean',
    phi=lambda s: s,
    psi=lambda y, k: y / k,
)

EUCLIDEAN_NORM = NomographicFunction(
    name='euclidean_norm',
    phi=lambda s: s * s,
    psi=lambda y, k: np.sqrt(np.maximum(y, 0.0)),
)

ACTIVE_COUNT = NomographicFunction(
    name='active_count',
    phi=lambda s: (np.asarray(s) != 0).astype(float),
    psi=lambda y, k: y,
)


def over_the_air(function, values, gains, precompensation, noise_var, rng):
    """
    Compute a nomographic function of one real value per user in a single
    channel use.

    :param function: A :class:`NomographicFunction`.
    :param values: The K user values.
    :param gains: The K complex channel gains of the shared subcarrier.
    :param precompensation: The K coefficients the users apply.
    :param noise_var: The noise variance at the base station.
    :param rng: A :class:`numpy.random.Generator`.
    :returns: The function value.

    >>> rng = np.random.default_rng(0)
    >>> h = np.array([1j, 2.0, -0.5])
    >>> float(over_the_air(ARITHMETIC_MEAN, [1.0, 2.0, 6.0], h,
    ...                    invert_gains(h), 0.0, rng))
    3.0
    """
    values = np.asarray(values, dtype=float)
    gains = np.asarray(gains, dtype=complex)
    precompensation = np.asarray(precompensation, dtype=complex)

    if not values.shape == gains.shape == precompensation.shape:
        raise InvalidInputError('values, gains and coefficients differ')

    y = np.sum(gains * precompensation * function.phi(values))
    y = add_noise(y, noise_var, rng)

    return function.psi(float(np.real(y)), values.size)
