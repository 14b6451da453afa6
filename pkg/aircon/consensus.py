"""
The over-the-air consensus procedure and its fault-tolerance analysis.

Users do not exchange prepare and commit messages pairwise. Instead they all
transmit the lattice-coded hash of the block they hold at once, and each
user compares what it sent with the aggregate the base station broadcasts
back. The hash consistency factor (HCF) of a user is

    Ĩ_k = tᵀ x_k / (K |x_k|²)

which is 1 when everybody agrees with ``x_k`` and ``(2m - K) / K`` when
``m`` users send ``x_k`` and the others its negation.

Two rounds are run. Users whose HCF exceeds ``t_h1`` in the first round
become *prepared* and transmit again; prepared users whose second-round HCF
exceeds ``t_h2`` become *committed* and reply. The primary, simulated at the
base station, declares consensus when the HCF of the replies exceeds 1/2.
"""
import logging
import math

from dataclasses import (
    dataclass,
    field,
    replace,
)
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import mark
from .adversary import craft_vectors
from .channel import (
    ChannelConfig,
    realize_channel,
)
from .errors import (
    ConfigurationError,
    EstimationError,
    InvalidInputError,
)
from .estimation import (
    EstimationConfig,
    acquire_precompensation,
)
from .hashing import (
    DEFAULT_HASH_BITS,
    CandidateBlock,
    hash_symbols,
)
from .lattice import (
    PointVector,
    build_codebook,
)
from .phy import (
    Downlink,
    aircomp_round,
    apply_residual_phase,
    broadcast_aggregate,
)

logger = logging.getLogger(__name__)

ALPHA_STAR = (math.sqrt(17.0) - 1.0) / 8.0
PROCEDURES = ('two_round', 'one_round')
REPLY_THRESHOLD = 0.5


class NodePhase(Enum):
    IDLE = 'idle'
    PRE_PREPARED = 'pre_prepared'
    PREPARED = 'prepared'
    COMMITTED = 'committed'
    REPLIED = 'replied'

    def advance(self):
        """
        The phase that follows this one.

        >>> NodePhase.PREPARED.advance()
        <NodePhase.COMMITTED: 'committed'>
        """
        phases = list(NodePhase)
        index = phases.index(self)

        if index + 1 == len(phases):
            raise InvalidInputError('a node that replied cannot advance')

        return phases[index + 1]


@dataclass(frozen=True)
class Thresholds:
    """
    The HCF thresholds of the prepare and commit rounds.

    :ivar t_h1: A user is prepared when its first-round HCF exceeds this.
    :ivar t_h2: A prepared user commits when its second-round HCF exceeds
        this.
    """
    t_h1: float = 0.22
    t_h2: float = 0.5

    def __post_init__(self):
        if not 0 < self.t_h1 < self.t_h2 <= 1:
            raise InvalidInputError(
                'thresholds must satisfy 0 < t_h1 < t_h2 <= 1, got '
                '{0} and {1}'.format(self.t_h1, self.t_h2)
            )

    @property
    def alpha_star(self):
        """
        The largest fraction of malicious users the procedure tolerates.
        """
        return ALPHA_STAR

    @classmethod
    def for_tolerance(cls, alpha, t_h2=0.5):
        """
        The first threshold that lets honest users through whatever
        malicious users send, as long as they are at most a fraction
        ``alpha`` of all users.

        >>> Thresholds.for_tolerance(0.3).t_h1
        0.4
        """
        if not 0 < alpha < 0.5:
            raise InvalidInputError(
                'alpha must be within (0, 0.5), got {0}'.format(alpha)
            )

        return cls(t_h1=round(1.0 - 2.0 * alpha, 12), t_h2=t_h2)

    @classmethod
    def optimal(cls):
        return cls.for_tolerance(ALPHA_STAR)


@dataclass(frozen=True, eq=False)
class HcfReport:
    """
    The HCF every user computed in one round.

    :ivar values: One value per user.
    :ivar round: ``1``, ``2`` or ``reply``.
    :ivar transmitters: The users that transmitted in that round.
    """
    values: np.ndarray
    round: str
    transmitters: tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()

        if not np.isfinite(values).all():
            raise InvalidInputError('HCF values must be finite')

        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.size

    def extrema(self, users):
        """
        The smallest and largest HCF among ``users``, or ``(nan, nan)``.
        """
        users = list(users)

        if not users:
            return math.nan, math.nan

        selected = self.values[users]

        return float(selected.min()), float(selected.max())


@dataclass(frozen=True)
class ConsensusContext:
    """
    Everything about the radio link and the procedure that does not change
    from one consensus run to the next.
    """
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    estimation: EstimationConfig = field(default_factory=EstimationConfig)
    thresholds: Thresholds = field(default_factory=Thresholds)
    downlink: Downlink = field(default_factory=Downlink)
    hash_bits: int = DEFAULT_HASH_BITS
    procedure: str = 'two_round'
    codebook: object = field(default_factory=build_codebook, repr=False)

    def __post_init__(self):
        if self.procedure not in PROCEDURES:
            raise ConfigurationError(
                'unsupported procedure {0!r} (expected one of {1})'.format(
                    self.procedure,
                    ', '.join(PROCEDURES),
                ),
                key='procedure',
            )

        if self.hash_bits < 1:
            raise ConfigurationError(
                'must be positive, got {0}'.format(self.hash_bits),
                key='hash_bits',
            )

        if self.num_symbols > self.channel.num_subcarriers:
            raise ConfigurationError(
                '{0} hash symbols do not fit on {1} subcarriers'.format(
                    self.num_symbols,
                    self.channel.num_subcarriers,
                ),
                key='hash_bits',
            )

    @property
    def num_symbols(self):
        """
        The number of subcarriers a hash occupies.
        """
        return -(-self.hash_bits // self.codebook.bits_per_symbol)


@dataclass(frozen=True)
class ConsensusTrace:
    """
    What happened during one consensus run.

    :ivar phases: Per user, the phases it went through.
    :ivar repliers: The users that replied.
    :ivar reply_hcf: The HCF the primary computed on the replies.
    :ivar failure: Why the run stopped before the first round, if it did.
    """
    K: int
    m_true: int
    seed: int
    phases: tuple
    hcf_round1: HcfReport = None
    hcf_round2: HcfReport = None
    reply_hcf: float = math.nan
    repliers: tuple = ()
    achieved: bool = False
    procedure: str = 'two_round'
    failure: str = None

    @property
    def outcome(self):
        return 'achieved' if self.achieved else 'not_achieved'

    @property
    def honest_users(self):
        return range(self.m_true)

    @property
    def majority(self):
        """
        Whether consistent users are a strict majority.
        """
        return self.m_true > self.K // 2

    @property
    def is_error(self):
        """
        Whether the outcome disagrees with the honest majority rule.
        """
        return self.achieved != self.majority

    def final_phases(self):
        return tuple(history[-1] for history in self.phases)


class AttackRegion(NamedTuple):
    """
    The correlations for which a conspiracy breaks the two-round procedure.

    When not ``safe``, an attack works for ``rho_0 < rho < rho_1``.
    """
    alpha: float
    safe: bool
    rho_0: float = math.nan
    rho_1: float = math.nan

    @property
    def nonempty(self):
        return not self.safe and self.rho_0 < self.rho_1

    def contains(self, rho):
        return self.nonempty and self.rho_0 < rho < self.rho_1


def _as_array(vector):
    if isinstance(vector, PointVector):
        return vector.array

    return np.asarray(vector)


def compute_hcf(t, x, K):
    """
    The hash consistency factor of ``x`` against the aggregate ``t``.

    Complex symbols are treated as pairs of real coordinates. Both arguments
    may carry leading axes, in which case one HCF per leading index is
    returned.

    :param t: A :class:`aircon.phy.SuperposedVector` or an array whose last
        two axes are ``(N, 2)``.
    :param x: A :class:`aircon.lattice.HashSymbolVector` or an array of the
        same kind.
    :param K: The total number of users.

    >>> import numpy as np
    >>> x = np.array([[1, 0], [-1, 1]])
    >>> compute_hcf(3 * x, x, 3)
    1.0
    """
    t = _as_array(t)
    x = _as_array(x)

    if t.shape[-2:] != x.shape[-2:]:
        raise InvalidInputError(
            'aggregate and hash vector differ in length: {0} and {1}'.format(
                t.shape[-2],
                x.shape[-2],
            )
        )

    if K < 1:
        raise InvalidInputError('K must be positive, got {0}'.format(K))

    norm = np.sum(x * x, axis=(-2, -1))

    if np.any(norm == 0):
        raise InvalidInputError('cannot compute the HCF of a zero vector')

    value = np.sum(t * x, axis=(-2, -1)) / (K * norm)

    if np.ndim(value) == 0:
        return float(value)

    return value


@dataclass
class PhyLink:
    """
    The radio link of one consensus run: the actual channel over the hash
    subcarriers, the precompensation in use and the noise stream.
    """
    ch: object
    pc: object
    cb: object
    downlink: object
    rng: object


def run_round(states, vectors, threshold, link, label, phase, K=None):
    """
    Run one over-the-air round.

    Users in ``phase`` transmit. Every user computes its HCF on the
    aggregate it receives, and transmitting users above ``threshold`` advance
    one phase.

    :param states: The current :class:`NodePhase` of every user.
    :param vectors: The hash symbol vector of every user.
    :param threshold: The HCF a user must exceed to advance.
    :param link: The channel, precompensation and random stream.
    :param label: ``1``, ``2`` or ``reply``.
    :param phase: The :class:`NodePhase` of the users that transmit.
    :param K: The HCF denominator, the number of users by default.
    :returns: ``(new_states, report, t)``, ``report`` and ``t`` being
        :const:`None` when nobody was eligible.
    """
    if K is None:
        K = len(states)

    eligible = [user for user, s in enumerate(states) if s is phase]

    if not eligible:
        logger.debug('Round %s: no eligible user.', label)

        return list(states), None, None

    t = aircomp_round(
        [vectors[user] for user in eligible],
        link.ch,
        link.pc,
        link.cb,
        link.rng,
        users=eligible,
    )
    received = broadcast_aggregate(t, link.downlink, len(states), link.cb,
                                   link.rng)
    values = compute_hcf(
        np.stack([r.array for r in received]),
        np.stack([v.array for v in vectors]),
        K,
    )
    report = HcfReport(values, str(label), tuple(eligible))
    new_states = list(states)

    for user in eligible:
        if values[user] > threshold:
            new_states[user] = states[user].advance()

    if logger.isEnabledFor(logging.DEBUG):
        for user in eligible:
            logger.debug(
                'Round %s: user %s HCF %s -> %s.',
                label,
                user,
                mark.hcf(values[user], threshold),
                mark.phase(new_states[user]),
            )

    return new_states, report, t


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed

    return np.random.SeedSequence(seed)


def user_vectors(K, m_true, adversary, context, rng):
    """
    Draw a candidate block and the vector every user transmits.

    :returns: ``(honest, vectors)``, the honest vector and the list of the
        K users' vectors.
    """
    cb = context.codebook
    block = CandidateBlock(payload=rng.bytes(32))
    honest = hash_symbols(block, cb, context.hash_bits)
    others = K - m_true

    if adversary.kind == 'none':
        inconsistent = [
            hash_symbols(
                replace(block, payload=block.payload + b'/' +
                        str(user).encode('ascii')),
                cb,
                context.hash_bits,
            )
            for user in range(m_true, K)
        ]
    else:
        inconsistent = craft_vectors(
            replace(adversary, malicious_count=others),
            honest,
            rng,
            cb,
        )

    return honest, [honest] * m_true + inconsistent


def prepare_link(K, context, channel_seq, noise_rng):
    """
    Realize the channel, acquire precompensation from a snapshot of it and
    apply the residual phase, keeping the hash subcarriers only.
    """
    channel_cfg = replace(
        context.channel,
        seed=int(channel_seq.generate_state(1, np.uint64)[0]),
    )
    snapshot = realize_channel(channel_cfg, K)
    pc = acquire_precompensation(
        snapshot,
        context.estimation,
        noise_rng,
        channel_cfg=channel_cfg,
        downlink=context.downlink,
    )
    actual = apply_residual_phase(
        snapshot,
        context.channel.residual_phase_rad,
        noise_rng,
    )
    n = context.num_symbols

    return PhyLink(
        ch=actual.take(n),
        pc=pc.take(n),
        cb=context.codebook,
        downlink=context.downlink,
        rng=noise_rng,
    )


def run_consensus(K, m_true, adversary, context, seed=0):
    """
    Run one consensus instance.

    Users ``0`` to ``m_true - 1`` hold the honest block, user ``0`` being the
    primary. The other users follow ``adversary``.

    :param K: The number of users.
    :param m_true: The number of users holding the honest block.
    :param adversary: The :class:`aircon.adversary.AdversaryStrategy`.
    :param context: The :class:`ConsensusContext`.
    :param seed: An integer or a :class:`numpy.random.SeedSequence` fixing
        every random draw of the run.
    :returns: A :class:`ConsensusTrace`.
    """
    if not 1 <= m_true <= K:
        raise InvalidInputError(
            'm_true must be within [1, {0}], got {1}'.format(K, m_true)
        )

    sequence = _seed_sequence(seed)
    block_seq, channel_seq, noise_seq = sequence.spawn(3)
    honest, vectors = user_vectors(
        K,
        m_true,
        adversary,
        context,
        np.random.default_rng(block_seq),
    )
    trace_seed = seed if isinstance(seed, int) else int(
        sequence.generate_state(1, np.uint64)[0]
    )
    trace = ConsensusTrace(
        K=K,
        m_true=m_true,
        seed=trace_seed,
        phases=tuple((NodePhase.IDLE,) for _ in range(K)),
        procedure=context.procedure,
    )

    try:
        link = prepare_link(
            K,
            context,
            channel_seq,
            np.random.default_rng(noise_seq),
        )
    except EstimationError as ex:
        logger.warning('Consensus run %s failed: %s', trace_seed, ex)

        return replace(trace, failure=str(ex))

    histories = [[NodePhase.IDLE, NodePhase.PRE_PREPARED] for _ in range(K)]
    states = [NodePhase.PRE_PREPARED] * K

    if context.procedure == 'one_round':
        states, report1 = _advance(
            histories,
            states,
            vectors,
            context.thresholds.t_h2,
            link,
            '1',
            K,
        )
        states = [
            s.advance() if s is NodePhase.PREPARED else s for s in states
        ]
        _record(histories, states)
        report2 = None
    else:
        states, report1 = _advance(histories, states, vectors,
                                   context.thresholds.t_h1, link, '1', K)
        states, report2 = _advance(histories, states, vectors,
                                   context.thresholds.t_h2, link, '2', K)

    committed = [
        user for user, s in enumerate(states) if s is NodePhase.COMMITTED
    ]
    reply_hcf = math.nan
    achieved = False

    if committed:
        t = aircomp_round(
            [vectors[user] for user in committed],
            link.ch,
            link.pc,
            link.cb,
            link.rng,
            users=committed,
        )
        reply_hcf = compute_hcf(t, honest, K)
        achieved = reply_hcf > REPLY_THRESHOLD

        for user in committed:
            states[user] = NodePhase.REPLIED

        _record(histories, states)

    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            'Run %s: K=%s m=%s, %s repliers, consensus %s.',
            trace_seed,
            K,
            m_true,
            len(committed),
            mark.outcome(achieved),
        )

    return replace(
        trace,
        phases=tuple(tuple(history) for history in histories),
        hcf_round1=report1,
        hcf_round2=report2,
        reply_hcf=reply_hcf,
        repliers=tuple(committed),
        achieved=achieved,
    )


def _advance(histories, states, vectors, threshold, link, label, K):
    phase = NodePhase.PRE_PREPARED if label == '1' else NodePhase.PREPARED
    states, report, _ = run_round(states, vectors, threshold, link, label,
                                  phase, K=K)
    _record(histories, states)

    return states, report


def _record(histories, states):
    for history, state in zip(histories, states):
        if history[-1] is not state:
            history.append(state)


def expected_hcf(alpha, rho):
    """
    The expected HCF of honest and malicious users when a fraction ``alpha``
    of users conspire with correlation ``rho``.

    :returns: ``(honest, malicious)``.

    >>> expected_hcf(0.0, 0.3)
    (1.0, 0.3)
    """
    if not 0 <= alpha <= 1:
        raise InvalidInputError(
            'alpha must be within [0, 1], got {0}'.format(alpha)
        )

    if not -1 <= rho <= 1:
        raise InvalidInputError(
            'rho must be within [-1, 1], got {0}'.format(rho)
        )

    return 1.0 - alpha + alpha * rho, alpha + (1.0 - alpha) * rho


def attack_region(alpha):
    """
    The correlations letting a fraction ``alpha`` of conspirators pass the
    first round while pushing honest users below the second threshold.

    >>> attack_region(0.35).safe
    True
    """
    if not 0 < alpha < 1:
        raise InvalidInputError(
            'alpha must be within (0, 1), got {0}'.format(alpha)
        )

    if alpha < ALPHA_STAR:
        return AttackRegion(alpha=alpha, safe=True)

    return AttackRegion(
        alpha=alpha,
        safe=False,
        rho_0=(1.0 - 3.0 * alpha) / (1.0 - alpha),
        rho_1=(alpha - 0.5) / alpha,
    )


def one_round_vulnerable(alpha):
    """
    Whether a single-round procedure fails against an antipodal conspiracy
    of a fraction ``alpha`` of users.

    >>> one_round_vulnerable(0.2), one_round_vulnerable(0.3)
    (False, True)
    """
    honest, _ = expected_hcf(alpha, -1.0)

    return honest <= REPLY_THRESHOLD
