"""
Uplink channel estimation and precompensation feedback.

Users send unit pilots on a comb of subcarriers. The base station estimates
each user's gains at its pilot positions (LS, optionally refined by LMMSE),
turns them into precompensation coefficients and feeds them back. Each user
then interpolates its coefficients over the whole band.
"""
import logging
import math

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from scipy import linalg

from .channel import (
    add_noise,
    frequency_correlation,
)
from .errors import (
    ConfigurationError,
    DeepFadeError,
    EstimationError,
    InvalidInputError,
)
from .phy import (
    PrecompensationMatrix,
    clip_magnitude,
    invert_gains,
)

logger = logging.getLogger(__name__)

ESTIMATION_METHODS = ('perfect', 'ls', 'lmmse')
RHH_SOURCES = ('sample', 'model')
DEEP_FADE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class PilotSchedule:
    """
    Which subcarriers and OFDM symbol each user sends its pilots on.

    User ``k`` transmits in OFDM symbol ``k // stride`` on subcarriers
    ``k % stride``, ``k % stride + stride``, and so on. Users sharing an
    OFDM symbol never share a subcarrier.
    """
    num_users: int
    stride: int
    num_subcarriers: int

    def __post_init__(self):
        if self.num_users < 1:
            raise InvalidInputError(
                'need at least one user, got {0}'.format(self.num_users)
            )

        if not 1 <= self.stride <= self.num_subcarriers:
            raise InvalidInputError(
                'pilot stride must be within [1, {0}], got {1}'.format(
                    self.num_subcarriers,
                    self.stride,
                )
            )

    @classmethod
    def build(cls, num_users, stride, num_subcarriers):
        return cls(
            num_users=num_users,
            stride=stride,
            num_subcarriers=num_subcarriers,
        )

    @property
    def num_ofdm_symbols(self):
        return -(-self.num_users // self.stride)

    @property
    def feedback_ofdm_symbols(self):
        """
        Downlink symbols needed to return the coefficients: one pilot and one
        data symbol per uplink pilot symbol.
        """
        return 2 * self.num_ofdm_symbols

    def ofdm_symbol(self, user):
        return user // self.stride

    def positions(self, user):
        """
        The pilot subcarriers of ``user``.

        >>> PilotSchedule.build(6, 4, 10).positions(5).tolist()
        [1, 5, 9]
        """
        if not 0 <= user < self.num_users:
            raise InvalidInputError('no user {0}'.format(user))

        return np.arange(user % self.stride, self.num_subcarriers, self.stride)


@dataclass(frozen=True, eq=False)
class CsiEstimate:
    """
    One user's channel estimate at its pilot positions.
    """
    values: np.ndarray
    positions: np.ndarray
    method: str = 'ls'

    def __post_init__(self):
        values = np.array(self.values, dtype=complex).ravel()
        positions = np.array(self.positions, dtype=int).ravel()

        if values.shape != positions.shape:
            raise InvalidInputError(
                '{0} estimates for {1} positions'.format(
                    values.size,
                    positions.size,
                )
            )

        if not np.isfinite(values).all():
            raise EstimationError('channel estimate is not finite')

        values.setflags(write=False)
        positions.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'positions', positions)


@dataclass(frozen=True, eq=False)
class FeedbackCoefficients:
    """
    Precompensation coefficients at the usable pilot positions of one user.

    :ivar faded: Pilot positions dropped because the estimate was in a deep
        fade.
    """
    values: np.ndarray
    positions: np.ndarray
    faded: np.ndarray

    @property
    def usable(self):
        return self.positions.size


class ResidualStats(NamedTuple):
    user: int
    median: float
    mean: float
    max: float


@dataclass(frozen=True)
class EstimationConfig:
    """
    How precompensation coefficients are obtained.

    :ivar method: ``perfect`` (genie inversion of the true gains), ``ls`` or
        ``lmmse``.
    :ivar stride: The pilot stride M.
    :ivar retransmissions: How many times pilots are sent (R).
    :ivar rhh_source: Where LMMSE takes the channel autocorrelation from,
        ``sample`` or ``model``.
    :ivar max_gain: Optional clip on coefficient magnitudes.
    """
    method: str = 'perfect'
    stride: int = 4
    retransmissions: int = 1
    rhh_source: str = 'sample'
    max_gain: float = None

    def __post_init__(self):
        if self.method not in ESTIMATION_METHODS:
            raise ConfigurationError(
                'unsupported method {0!r} (expected one of {1})'.format(
                    self.method,
                    ', '.join(ESTIMATION_METHODS),
                ),
                key='estimation.method',
            )

        if self.rhh_source not in RHH_SOURCES:
            raise ConfigurationError(
                'unsupported source {0!r}'.format(self.rhh_source),
                key='estimation.rhh_source',
            )

        if self.stride < 1:
            raise ConfigurationError(
                'must be at least 1, got {0}'.format(self.stride),
                key='estimation.stride',
            )

        if self.retransmissions < 1:
            raise ConfigurationError(
                'must be at least 1, got {0}'.format(self.retransmissions),
                key='estimation.retransmissions',
            )

        if self.max_gain is not None and self.max_gain <= 0:
            raise ConfigurationError(
                'must be positive', key='estimation.max_gain',
            )


def estimate_ls(rx_pilots, tx_pilots, positions=None):
    """
    Least-squares estimate: each received pilot divided by the sent one.

    >>> estimate_ls([3, 4], [1, 2]).values.real.tolist()
    [3.0, 2.0]
    """
    rx_pilots = np.asarray(rx_pilots, dtype=complex)
    tx_pilots = np.asarray(tx_pilots, dtype=complex)

    if rx_pilots.shape != tx_pilots.shape:
        raise InvalidInputError('received and sent pilots differ in length')

    if np.any(tx_pilots == 0):
        raise InvalidInputError('pilot symbols must be nonzero')

    if positions is None:
        positions = np.arange(rx_pilots.size)

    return CsiEstimate(rx_pilots / tx_pilots, positions, method='ls')


def _check_autocorrelation(rhh, size):
    rhh = np.asarray(rhh, dtype=complex)

    if rhh.shape != (size, size):
        raise InvalidInputError(
            'autocorrelation is {0}, expected {1}x{1}'.format(rhh.shape, size)
        )

    if not np.allclose(rhh, rhh.conj().T):
        raise InvalidInputError('autocorrelation must be Hermitian')

    eigenvalues = linalg.eigvalsh(rhh)

    if eigenvalues.min() < -1e-9 * max(1.0, abs(eigenvalues.max())):
        raise InvalidInputError(
            'autocorrelation must be positive semidefinite'
        )

    return rhh


def estimate_lmmse(ls, rhh, snr_linear, beta=1.0):
    """
    Refine an LS estimate with ``Rhh (Rhh + beta/snr I)^-1``.

    :param ls: The LS :class:`CsiEstimate`.
    :param rhh: The channel autocorrelation at the pilot positions.
    :param snr_linear: The pilot SNR, as a ratio. An infinite SNR returns the
        LS values.
    :param beta: ``E{|x|²} E{1/|x|²}`` of the pilot constellation.
    :returns: A :class:`CsiEstimate`.
    """
    rhh = _check_autocorrelation(rhh, ls.values.size)

    if snr_linear <= 0:
        raise InvalidInputError(
            'SNR must be positive, got {0}'.format(snr_linear)
        )

    if math.isinf(snr_linear):
        return CsiEstimate(ls.values, ls.positions, method='lmmse')

    regularized = rhh + (beta / snr_linear) * np.eye(rhh.shape[0])

    try:
        values = linalg.solve(regularized, rhh @ ls.values, assume_a='her')
    except linalg.LinAlgError as ex:
        raise EstimationError(
            'LMMSE system is singular: {0}'.format(ex)
        ) from ex

    return CsiEstimate(values, ls.positions, method='lmmse')


def estimate_with_retransmission(
    rx_rounds,
    tx_pilots,
    positions=None,
    method='ls',
    rhh=None,
    snr_linear=None,
    beta=1.0,
):
    """
    Estimate from ``R`` receptions of the same pilots.

    The per-round LS estimates are averaged, which divides the estimation
    noise variance by ``R``. For LMMSE the averaged estimate is then refined
    with an SNR ``R`` times higher.

    :param rx_rounds: An ``(R, P)`` array of received pilots.
    :param tx_pilots: The ``P`` pilot symbols.
    """
    rx_rounds = np.asarray(rx_rounds, dtype=complex)

    if rx_rounds.ndim == 1:
        rx_rounds = rx_rounds[None, :]

    rounds = rx_rounds.shape[0]

    if rounds < 1:
        raise InvalidInputError('need at least one pilot reception')

    tx_pilots = np.asarray(tx_pilots, dtype=complex)
    average = np.mean(
        [estimate_ls(rx, tx_pilots).values for rx in rx_rounds],
        axis=0,
    )

    if positions is None:
        positions = np.arange(average.size)

    ls = CsiEstimate(average, positions, method='ls')

    if method == 'ls':
        return ls

    if method != 'lmmse':
        raise InvalidInputError('unsupported method {0!r}'.format(method))

    if rhh is None or snr_linear is None:
        raise InvalidInputError('LMMSE needs an autocorrelation and an SNR')

    return estimate_lmmse(ls, rhh, snr_linear * rounds, beta=beta)


def sample_autocorrelation(ls_estimates, noise_var):
    """
    Estimate the channel autocorrelation from LS estimates of several users
    sharing the same pilot stride.

    Products are averaged per lag over every user and position, the noise
    floor is removed from lag zero, and the Hermitian Toeplitz result is
    projected onto the positive semidefinite cone.

    :param ls_estimates: A sequence of per-user complex arrays.
    :param noise_var: The variance of the LS estimation noise.
    :returns: A ``P x P`` matrix, ``P`` being the longest estimate.
    """
    ls_estimates = [np.asarray(e, dtype=complex) for e in ls_estimates]

    if not ls_estimates or not any(e.size for e in ls_estimates):
        raise InvalidInputError('need at least one LS estimate')

    size = max(e.size for e in ls_estimates)
    lags = np.zeros(size, dtype=complex)

    for lag in range(size):
        products = [
            e[lag:] * np.conj(e[:e.size - lag])
            for e in ls_estimates
            if e.size > lag
        ]
        lags[lag] = np.mean(np.concatenate(products))

    lags[0] = lags[0].real - noise_var
    rhh = linalg.toeplitz(lags, np.conj(lags))
    eigenvalues, eigenvectors = linalg.eigh(rhh)

    return (eigenvectors * np.clip(eigenvalues, 0, None)) @ \
        eigenvectors.conj().T


def compute_feedback(est):
    """
    Turn an estimate into precompensation coefficients ``h* / |h|²``.

    Positions where the estimate is in a deep fade are dropped and reported
    in ``faded``.

    :returns: A :class:`FeedbackCoefficients`.
    """
    faded = np.abs(est.values) < DEEP_FADE_THRESHOLD

    return FeedbackCoefficients(
        values=invert_gains(est.values[~faded]),
        positions=est.positions[~faded],
        faded=est.positions[faded],
    )


def interpolate_coeffs(sparse, num_subcarriers):
    """
    Fill in the coefficients of all ``num_subcarriers`` subcarriers.

    Real and imaginary parts are interpolated linearly and independently;
    edges are extended with the nearest pilot value.

    :param sparse: A :class:`FeedbackCoefficients`.
    :returns: A complex array of ``num_subcarriers`` coefficients.
    """
    if sparse.usable < 2:
        raise InvalidInputError(
            'interpolation needs at least 2 pilots, got {0}'.format(
                sparse.usable,
            )
        )

    grid = np.arange(num_subcarriers)

    return (
        np.interp(grid, sparse.positions, sparse.values.real) +
        1j * np.interp(grid, sparse.positions, sparse.values.imag)
    )


def _perturb_feedback(feedback, snr_db, retransmissions, rng):
    variance = 2.0 * 10.0 ** (-snr_db / 10.0) / retransmissions
    error = add_noise(
        np.zeros(feedback.values.shape, dtype=complex),
        variance,
        rng,
    )

    return FeedbackCoefficients(
        values=feedback.values * (1.0 + error),
        positions=feedback.positions,
        faded=feedback.faded,
    )


def acquire_precompensation(ch, cfg, rng, channel_cfg=None, downlink=None):
    """
    Run the pilot, estimation, feedback and interpolation pipeline.

    :param ch: The :class:`aircon.channel.ChannelRealization` at the time of
        the CSI snapshot, over the full band.
    :param cfg: The :class:`EstimationConfig`.
    :param rng: A :class:`numpy.random.Generator` for the pilot noise.
    :param channel_cfg: The :class:`aircon.channel.ChannelConfig`, needed
        for the ``model`` autocorrelation.
    :param downlink: A :class:`aircon.phy.Downlink`; a noisy one perturbs
        the fed back coefficients.
    :returns: A dense :class:`aircon.phy.PrecompensationMatrix`.
    """
    if cfg.method == 'perfect':
        return PrecompensationMatrix.perfect(ch, max_gain=cfg.max_gain)

    schedule = PilotSchedule.build(ch.num_users, cfg.stride,
                                   ch.num_subcarriers)
    rounds = cfg.retransmissions
    estimates = []

    for user in range(ch.num_users):
        positions = schedule.positions(user)
        pilots = np.ones(positions.size, dtype=complex)
        received = add_noise(
            np.broadcast_to(ch.gains[user, positions] * pilots,
                            (rounds, positions.size)),
            ch.noise_var,
            rng,
        )
        estimates.append(estimate_with_retransmission(
            received,
            pilots,
            positions=positions,
        ))

    if cfg.method == 'lmmse':
        estimates = _refine(estimates, ch, cfg, channel_cfg)

    coeffs = np.empty(ch.gains.shape, dtype=complex)

    for user, est in enumerate(estimates):
        feedback = compute_feedback(est)

        if feedback.faded.size:
            logger.warning(
                'User %s: %s pilot position(s) in a deep fade.',
                user,
                feedback.faded.size,
            )

        if downlink is not None and not downlink.is_ideal:
            feedback = _perturb_feedback(
                feedback,
                downlink.snr_db,
                rounds,
                rng,
            )

        if feedback.usable < 2:
            raise DeepFadeError(user=user, usable=feedback.usable)

        coeffs[user] = interpolate_coeffs(feedback, ch.num_subcarriers)

    if cfg.max_gain is not None:
        coeffs = clip_magnitude(coeffs, cfg.max_gain)

    return PrecompensationMatrix(coeffs)


def _refine(estimates, ch, cfg, channel_cfg):
    if ch.noise_var == 0:
        snr_linear = math.inf
    else:
        snr_linear = 1.0 / ch.noise_var

    if cfg.rhh_source == 'sample':
        shared = sample_autocorrelation(
            [est.values for est in estimates],
            ch.noise_var / cfg.retransmissions,
        )
    elif channel_cfg is None:
        raise ConfigurationError(
            'the model autocorrelation needs the channel configuration',
            key='estimation.rhh_source',
        )

    refined = []

    for est in estimates:
        if cfg.rhh_source == 'sample':
            rhh = shared[:est.values.size, :est.values.size]
        else:
            rhh = frequency_correlation(channel_cfg, est.positions)

        refined.append(estimate_lmmse(
            est,
            rhh,
            snr_linear * cfg.retransmissions,
        ))

    return refined


def residual_compensation(pc, ch):
    """
    How far precompensation is from inverting the channel, per user.

    :returns: A list of :class:`ResidualStats` over the ``|b h - 1|``
        values of every subcarrier.
    """
    if pc.shape != ch.gains.shape:
        raise InvalidInputError('precompensation and channel differ in shape')

    residual = np.abs(pc.coeffs * ch.gains - 1.0)

    return [
        ResidualStats(
            user=user,
            median=float(np.median(row)),
            mean=float(np.mean(row)),
            max=float(np.max(row)),
        )
        for user, row in enumerate(residual)
    ]
