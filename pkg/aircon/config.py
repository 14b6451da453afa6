"""
Experiment configuration files.

A configuration is a YAML mapping whose keys mirror the fields of
:class:`ExperimentConfig`; nested sections map onto the channel, estimation,
adversary, threshold and downlink settings. For instance::

    K: 11
    trials: 1000
    channel:
      kind: epa
      snr_db: 0
    estimation:
      method: lmmse
      retransmissions: 4
    sweep:
      snr: [-10, -5, 0, 5, 10, 15, 20]
"""
import logging
import math

from dataclasses import (
    dataclass,
    field,
    fields,
    replace,
)

import yaml

from .adversary import AdversaryStrategy
from .channel import ChannelConfig
from .consensus import (
    ConsensusContext,
    Thresholds,
)
from .errors import (
    ConfigurationError,
    InvalidInputError,
)
from .estimation import EstimationConfig
from .hashing import DEFAULT_HASH_BITS
from .phy import Downlink

logger = logging.getLogger(__name__)

SWEEP_AXES = ('snr', 'retransmissions', 'K', 'm', 'rho', 'alpha')

DEFAULT_SWEEPS = {
    'snr': (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0),
    'retransmissions': (1, 2, 3, 4, 5, 6, 7, 8),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One Monte-Carlo experiment.

    :ivar K: The number of users.
    :ivar m_values: The honest counts to evaluate, all of ``1..K`` when
        :const:`None`.
    :ivar trials: Consensus runs per ``(point, m)``.
    :ivar master_seed: The seed every trial seed derives from.
    :ivar workers: Processes used to run trials.
    :ivar output: Where CSV results go, standard output when :const:`None`.
    :ivar sweep: Values per sweep axis.
    """
    K: int = 11
    m_values: tuple = None
    hash_bits: int = DEFAULT_HASH_BITS
    trials: int = 1000
    master_seed: int = 0
    procedure: str = 'two_round'
    workers: int = 1
    output: str = None
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    estimation: EstimationConfig = field(default_factory=EstimationConfig)
    adversary: AdversaryStrategy = field(default_factory=AdversaryStrategy)
    thresholds: Thresholds = field(default_factory=Thresholds)
    downlink: Downlink = field(default_factory=Downlink)
    sweep: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.K < 1:
            raise ConfigurationError(
                'must be at least 1, got {0}'.format(self.K), key='K',
            )

        if self.trials < 1:
            raise ConfigurationError(
                'must be at least 1, got {0}'.format(self.trials),
                key='trials',
            )

        if self.workers < 1:
            raise ConfigurationError(
                'must be at least 1, got {0}'.format(self.workers),
                key='workers',
            )

        if self.m_values is not None:
            m_values = tuple(self.m_values)

            if not m_values:
                raise ConfigurationError('cannot be empty', key='m_values')

            if any(not 1 <= m <= self.K for m in m_values):
                raise ConfigurationError(
                    'values must be within [1, {0}], got {1}'.format(
                        self.K,
                        list(m_values),
                    ),
                    key='m_values',
                )

            object.__setattr__(self, 'm_values', m_values)

        if self.estimation.stride > self.channel.num_subcarriers:
            raise ConfigurationError(
                'must not exceed the {0} subcarriers, got {1}'.format(
                    self.channel.num_subcarriers,
                    self.estimation.stride,
                ),
                key='estimation.stride',
            )

        for axis in self.sweep:
            if axis not in SWEEP_AXES:
                raise ConfigurationError(
                    'unknown axis {0!r} (expected one of {1})'.format(
                        axis,
                        ', '.join(SWEEP_AXES),
                    ),
                    key='sweep',
                )

        # Validates the procedure and the hash length.
        self.context

    @property
    def m_range(self):
        """
        The honest counts this experiment evaluates.
        """
        if self.m_values is None:
            return tuple(range(1, self.K + 1))

        return self.m_values

    @property
    def context(self):
        """
        The :class:`aircon.consensus.ConsensusContext` of every run.
        """
        return ConsensusContext(
            channel=self.channel,
            estimation=self.estimation,
            thresholds=self.thresholds,
            downlink=self.downlink,
            hash_bits=self.hash_bits,
            procedure=self.procedure,
        )

    def sweep_values(self, axis):
        """
        The values of ``axis``: the configured ones, or the defaults.
        """
        if axis not in SWEEP_AXES:
            raise ConfigurationError(
                'unknown axis {0!r}'.format(axis), key='sweep',
            )

        if axis in self.sweep:
            return tuple(self.sweep[axis])

        if axis in DEFAULT_SWEEPS:
            return DEFAULT_SWEEPS[axis]

        raise ConfigurationError(
            'no values given for axis {0!r}'.format(axis),
            key='sweep.{0}'.format(axis),
        )

    def at(self, axis, value):
        """
        The configuration of one sweep point.

        The ``K`` axis evaluates every honest count of the new K; the ``alpha``
        axis turns the malicious fraction into a single honest count.

        >>> ExperimentConfig().at('snr', 5.0).channel.snr_db
        5.0
        """
        if axis is None:
            return self

        try:
            if axis == 'snr':
                return replace(
                    self,
                    channel=replace(self.channel, snr_db=float(value)),
                )

            if axis == 'retransmissions':
                return replace(
                    self,
                    estimation=replace(
                        self.estimation,
                        retransmissions=int(value),
                    ),
                )

            if axis == 'K':
                return replace(self, K=int(value), m_values=None)

            if axis == 'm':
                return replace(self, m_values=(int(value),))

            if axis == 'rho':
                return replace(
                    self,
                    adversary=replace(self.adversary, rho=float(value)),
                )

            if axis == 'alpha':
                if not 0 <= value < 1:
                    raise InvalidInputError(
                        'alpha must be within [0, 1), got {0}'.format(value)
                    )

                malicious = int(math.floor(value * self.K + 0.5))

                return replace(self, m_values=(self.K - malicious,))
        except InvalidInputError as ex:
            raise ConfigurationError(
                str(ex), key='sweep.{0}'.format(axis),
            ) from ex

        raise ConfigurationError(
            'unknown axis {0!r}'.format(axis), key='sweep',
        )


_SECTIONS = {
    'channel': ChannelConfig,
    'estimation': EstimationConfig,
    'adversary': AdversaryStrategy,
    'thresholds': Thresholds,
    'downlink': Downlink,
}

_HIDDEN = {
    'channel': ('seed', 'profile'),
    'adversary': ('malicious_count',),
}

_TYPES = {
    int: (int,),
    float: (int, float),
    str: (str,),
}


def _check_type(key, value, expected):
    if value is None:
        return value

    accepted = _TYPES.get(expected)

    if accepted is None:
        return value

    if isinstance(value, bool) or not isinstance(value, accepted):
        raise ConfigurationError(
            'expected {0}, got {1!r}'.format(expected.__name__, value),
            key=key,
        )

    return expected(value)


def _field_types(klass, hidden=()):
    return {
        f.name: f.type
        for f in fields(klass)
        if f.name not in hidden
    }


def _build_section(name, values):
    klass = _SECTIONS[name]

    if not isinstance(values, dict):
        raise ConfigurationError('expected a mapping', key=name)

    types = _field_types(klass, _HIDDEN.get(name, ()))
    kwargs = {}

    for key, value in values.items():
        path = '{0}.{1}'.format(name, key)

        if key not in types:
            raise ConfigurationError('unknown key', key=path)

        kwargs[key] = _check_type(path, value, types[key])

    try:
        return klass(**kwargs)
    except InvalidInputError as ex:
        raise ConfigurationError(str(ex), key=name) from ex


def _build_sweep(values):
    if not isinstance(values, dict):
        raise ConfigurationError('expected a mapping', key='sweep')

    sweep = {}

    for axis, points in values.items():
        path = 'sweep.{0}'.format(axis)

        if not isinstance(points, list) or not points:
            raise ConfigurationError('expected a non-empty list', key=path)

        for point in points:
            if isinstance(point, bool) or not isinstance(point, (int, float)):
                raise ConfigurationError(
                    'expected numbers, got {0!r}'.format(point),
                    key=path,
                )

        sweep[axis] = tuple(points)

    return sweep


def parse_config(data):
    """
    Build an :class:`ExperimentConfig` from a parsed mapping.

    >>> parse_config({'K': 7, 'channel': {'kind': 'flat'}}).channel.kind
    'flat'
    """
    if data is None:
        data = {}

    if not isinstance(data, dict):
        raise ConfigurationError('the configuration must be a mapping')

    types = _field_types(ExperimentConfig)
    kwargs = {}

    for key, value in data.items():
        if key not in types:
            raise ConfigurationError('unknown key', key=str(key))

        if key in _SECTIONS:
            kwargs[key] = _build_section(key, value)
        elif key == 'sweep':
            kwargs[key] = _build_sweep(value)
        elif key == 'm_values':
            if not isinstance(value, list) or any(
                isinstance(m, bool) or not isinstance(m, int) for m in value
            ):
                raise ConfigurationError(
                    'expected a list of integers', key=key,
                )

            kwargs[key] = tuple(value)
        else:
            kwargs[key] = _check_type(key, value, types[key])

    try:
        return ExperimentConfig(**kwargs)
    except InvalidInputError as ex:
        raise ConfigurationError(str(ex)) from ex


def load_config(path):
    """
    Read an :class:`ExperimentConfig` from a YAML file.

    :param path: The file path.
    """
    try:
        with open(path) as stream:
            data = yaml.safe_load(stream)
    except OSError as ex:
        raise ConfigurationError(
            'cannot read {0}: {1}'.format(path, ex.strerror),
        ) from ex
    except yaml.YAMLError as ex:
        raise ConfigurationError(
            'invalid YAML in {0}: {1}'.format(path, ex),
        ) from ex

    logger.debug('Loaded configuration from %s.', path)

    return parse_config(data)
