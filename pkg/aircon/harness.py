"""
Monte-Carlo evaluation of the consensus procedure.

Every ``(sweep point, m, trial)`` triple gets its own seed, derived from the
master seed alone, so results do not depend on the order trials run in nor on
how many worker processes run them.
"""
import contextlib
import csv
import logging
import math
import sys

from concurrent.futures import ProcessPoolExecutor
from dataclasses import (
    asdict,
    dataclass,
    field,
    replace,
)

import numpy as np

from tqdm import tqdm

from . import mark
from .channel import realize_channel
from .consensus import (
    prepare_link,
    run_consensus,
    user_vectors,
)
from .errors import (
    InvalidInputError,
    OutputError,
)
from .estimation import (
    acquire_precompensation,
    residual_compensation,
)
from .lattice import (
    BITS_PER_SYMBOL,
    quantize,
)
from .phy import superpose

logger = logging.getLogger(__name__)

CER_SCHEMA = 'aircon-cer/1'
TRACE_SCHEMA = 'aircon-trace/1'
CONSTELLATION_SCHEMA = 'aircon-constellation/1'
RESIDUAL_SCHEMA = 'aircon-residual/1'

CER_COLUMNS = (
    'schema_id',
    'seed',
    'axis',
    'axis_value',
    'channel',
    'snr_db',
    'K',
    'm',
    'trials',
    'errors',
    'cer',
    'cer_stderr',
    'acer_flag',
)

TRACE_COLUMNS = (
    'schema_id',
    'seed',
    'K',
    'm_true',
    'adversary',
    'alpha',
    'rho',
    'channel',
    'snr_db',
    'retransmissions',
    'outcome',
    'repliers',
    'hcf1_honest_min',
    'hcf1_honest_max',
    'hcf2_honest_min',
    'hcf2_honest_max',
    'reply_hcf',
    'failure',
)

CONSTELLATION_COLUMNS = (
    'schema_id',
    'round',
    'subcarrier',
    'y_re',
    'y_im',
    't_re',
    't_im',
    'expected_re',
    'expected_im',
)

RESIDUAL_COLUMNS = (
    'schema_id',
    'realization',
    'user',
    'median',
    'mean',
    'max',
)


def format_value(value):
    """
    Render a CSV cell; floats get six decimals and missing values are empty.

    >>> format_value(1 / 3), format_value(None), format_value(7)
    ('0.333333', '', '7')
    """
    if value is None:
        return ''

    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ''

        return '%.6f' % value

    return str(value)


class CsvOutput:
    """
    A CSV writer that counts rows and reports failures as
    :class:`aircon.errors.OutputError`.
    """

    def __init__(self, stream, columns):
        self.stream = stream
        self.columns = columns
        self.rows_written = 0
        self._writer = csv.writer(stream, lineterminator='\n')
        self._write(columns)

    def _write(self, cells):
        try:
            self._writer.writerow([format_value(cell) for cell in cells])
        except OSError as ex:
            raise OutputError(
                'cannot write results: {0}'.format(ex.strerror),
                rows_written=self.rows_written,
            ) from ex

    def writerow(self, row):
        """
        Write a mapping of column names to values.
        """
        self._write([row.get(column) for column in self.columns])
        self.rows_written += 1

    def flush(self):
        try:
            self.stream.flush()
        except OSError as ex:
            raise OutputError(
                'cannot write results: {0}'.format(ex.strerror),
                rows_written=self.rows_written,
            ) from ex


def trial_seed(master_seed, point, m, trial):
    """
    The 64-bit seed of one trial.

    >>> trial_seed(0, 0, 1, 0) == trial_seed(0, 0, 1, 0)
    True
    """
    sequence = np.random.SeedSequence(
        master_seed,
        spawn_key=(point, m, trial),
    )

    return int(sequence.generate_state(1, np.uint64)[0])


def _run_trial(args):
    K, m, adversary, context, seed = args

    return run_consensus(K, m, adversary, context, seed=seed)


def run_trials(config, m, point=0, executor=None):
    """
    Run ``config.trials`` consensus instances with ``m`` honest users.

    :param executor: An optional :class:`concurrent.futures.Executor`.
    :returns: The traces, ordered by trial index.
    """
    context = config.context
    jobs = [
        (config.K, m, config.adversary, context,
         trial_seed(config.master_seed, point, m, trial))
        for trial in range(config.trials)
    ]

    if executor is None:
        return [_run_trial(job) for job in jobs]

    chunksize = max(1, config.trials // (4 * config.workers))

    return list(executor.map(_run_trial, jobs, chunksize=chunksize))


def compute_cer(traces):
    """
    The fraction of runs whose outcome disagrees with the honest majority.

    :param traces: Traces sharing the same K and honest count.
    """
    traces = list(traces)

    if not traces:
        raise InvalidInputError('cannot compute a CER without traces')

    if len({(t.K, t.m_true) for t in traces}) != 1:
        raise InvalidInputError('traces differ in K or honest count')

    return sum(t.is_error for t in traces) / len(traces)


@dataclass
class CerResult:
    """
    Error counts of one sweep point, per honest count.

    :ivar counts: Maps each ``m`` to ``(errors, trials)``.
    """
    axis: str
    axis_value: object
    channel: str
    snr_db: float
    K: int
    seed: int
    counts: dict = field(default_factory=dict)

    def cer(self, m):
        errors, trials = self.counts[m]

        return errors / trials

    def stderr(self, m):
        """
        The standard error of the CER estimate at ``m``.
        """
        p = self.cer(m)

        return math.sqrt(p * (1.0 - p) / self.counts[m][1])

    @property
    def acer(self):
        """
        The mean of the per-``m`` CERs.
        """
        if not self.counts:
            raise InvalidInputError('no honest count was evaluated')

        return sum(self.cer(m) for m in self.counts) / len(self.counts)

    @property
    def acer_stderr(self):
        return math.sqrt(
            sum(self.stderr(m) ** 2 for m in self.counts)
        ) / len(self.counts)

    def rows(self):
        """
        One CSV row per honest count, then the ACER row.
        """
        common = {
            'schema_id': CER_SCHEMA,
            'seed': self.seed,
            'axis': self.axis,
            'axis_value': self.axis_value,
            'channel': self.channel,
            'snr_db': float(self.snr_db),
            'K': self.K,
        }

        for m, (errors, trials) in sorted(self.counts.items()):
            yield dict(
                common,
                m=m,
                trials=trials,
                errors=errors,
                cer=self.cer(m),
                cer_stderr=self.stderr(m),
                acer_flag=0,
            )

        yield dict(
            common,
            m=None,
            trials=sum(trials for _, trials in self.counts.values()),
            errors=sum(errors for errors, _ in self.counts.values()),
            cer=self.acer,
            cer_stderr=self.acer_stderr,
            acer_flag=1,
        )


def run_point(config, axis=None, value=None, point=0, executor=None,
              progress=None, on_traces=None):
    """
    Evaluate every honest count of one sweep point.

    :param config: The base :class:`aircon.config.ExperimentConfig`.
    :param axis: The sweep axis, :const:`None` for a single point.
    :param value: The axis value of the point.
    :param point: The index of the point on its axis.
    :param progress: An optional :mod:`tqdm` bar, advanced once per ``m``.
    :param on_traces: Called with the traces of each ``m``.
    :returns: A :class:`CerResult`.
    """
    point_config = config.at(axis, value)
    result = CerResult(
        axis=axis or 'none',
        axis_value=value,
        channel=point_config.channel.kind,
        snr_db=point_config.channel.snr_db,
        K=point_config.K,
        seed=config.master_seed,
    )

    for m in point_config.m_range:
        traces = run_trials(point_config, m, point=point, executor=executor)
        result.counts[m] = (sum(t.is_error for t in traces), len(traces))

        if on_traces is not None:
            on_traces(point_config, traces)

        if progress is not None:
            progress.update(1)

    logger.info(
        'Point %s=%s: ACER %s over %s honest count(s).',
        result.axis,
        value,
        mark.important('{0:.4f}'.format(result.acer)),
        len(result.counts),
    )

    return result


@contextlib.contextmanager
def trial_executor(workers):
    """
    A process pool for ``workers > 1``, :const:`None` otherwise.
    """
    if workers <= 1:
        yield None
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            yield executor


def _progress(total, quiet):
    return tqdm(
        total=total,
        unit='m',
        disable=quiet or not sys.stderr.isatty(),
    )


def sweep(config, axis, stream, quiet=False, trace_stream=None):
    """
    Run every point of ``axis`` and stream CER rows to ``stream``.

    Rows are written as soon as a point completes, so a failure keeps the
    rows of the points already done.

    :param axis: A sweep axis, or :const:`None` to run the configuration as a
        single point.
    :param trace_stream: If given, one trace row per run is written there.
    :returns: The list of :class:`CerResult`.
    """
    values = (None,) if axis is None else config.sweep_values(axis)
    points = [config.at(axis, value) for value in values]
    output = CsvOutput(stream, CER_COLUMNS)
    on_traces = None

    if trace_stream is not None:
        trace_output = CsvOutput(trace_stream, TRACE_COLUMNS)

        def on_traces(point_config, traces):
            for trace in traces:
                trace_output.writerow(trace_row(point_config, trace))

    results = []
    total = sum(len(p.m_range) for p in points)

    with trial_executor(config.workers) as executor, \
            _progress(total, quiet) as progress:
        for index, value in enumerate(values):
            result = run_point(
                config,
                axis,
                value,
                point=index,
                executor=executor,
                progress=progress,
                on_traces=on_traces,
            )

            for row in result.rows():
                output.writerow(row)

            output.flush()
            results.append(result)

    return results


def trace_row(config, trace):
    """
    The trace CSV row of one run.
    """
    honest = list(trace.honest_users)
    hcf1 = (math.nan, math.nan)
    hcf2 = (math.nan, math.nan)

    if trace.hcf_round1 is not None:
        hcf1 = trace.hcf_round1.extrema(honest)

    if trace.hcf_round2 is not None:
        hcf2 = trace.hcf_round2.extrema(honest)

    return {
        'schema_id': TRACE_SCHEMA,
        'seed': trace.seed,
        'K': trace.K,
        'm_true': trace.m_true,
        'adversary': config.adversary.kind,
        'alpha': (trace.K - trace.m_true) / trace.K,
        'rho': float(config.adversary.rho),
        'channel': config.channel.kind,
        'snr_db': float(config.channel.snr_db),
        'retransmissions': config.estimation.retransmissions,
        'outcome': trace.outcome,
        'repliers': len(trace.repliers),
        'hcf1_honest_min': hcf1[0],
        'hcf1_honest_max': hcf1[1],
        'hcf2_honest_min': hcf2[0],
        'hcf2_honest_max': hcf2[1],
        'reply_hcf': float(trace.reply_hcf),
        'failure': trace.failure,
    }


@dataclass(frozen=True)
class ComplexityReport:
    """
    Resource blocks spent by pairwise PBFT and by the over-the-air procedure
    to agree on one message of ``N`` blocks among ``K`` users.
    """
    K: int
    N: int
    M: int
    pbft_messages: int
    pbft_rbs: int
    aircon_rbs: int
    aircon_ce_rbs: int

    @property
    def pbft_to_aircon_ratio(self):
        return self.pbft_rbs / self.aircon_rbs

    def as_dict(self):
        record = asdict(self)
        record['pbft_to_aircon_ratio'] = self.pbft_to_aircon_ratio

        return record


def complexity_report(K, N, M):
    """
    Count the resource blocks of both procedures.

    >>> report = complexity_report(2, 1, 4)
    >>> report.pbft_messages, report.pbft_rbs, report.aircon_rbs
    (3, 6, 4)
    """
    if K < 2 or N < 1 or M < 1:
        raise InvalidInputError(
            'need K >= 2, N >= 1 and M >= 1, got {0}, {1} and {2}'.format(
                K,
                N,
                M,
            )
        )

    messages = (2 * K - 1) * (K - 1)
    pilot_symbols = -(-K // M)

    return ComplexityReport(
        K=K,
        N=N,
        M=M,
        pbft_messages=messages,
        pbft_rbs=2 * N * messages,
        aircon_rbs=4 * N,
        aircon_ce_rbs=4 * N + 4 * pilot_symbols * N,
    )


def write_complexity(report, stream):
    """
    Write ``report`` as a two-column ``field,value`` CSV.
    """
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(('field', 'value'))

    for key, value in report.as_dict().items():
        writer.writerow((key, format_value(value)))


def write_codebook(cb, stream):
    """
    Write the bit-group to codeword table.
    """
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(('index', 'bits', 're', 'im', 'energy'))

    for index, point in enumerate(cb.points):
        writer.writerow((
            index,
            format(index, '0{0}b'.format(BITS_PER_SYMBOL)),
            point.re,
            point.im,
            point.energy,
        ))


def dump_constellation(config, stream, rounds=1):
    """
    Write the aggregate the base station receives before quantization, with
    its quantized value and the noiseless sum, for ``rounds`` first-round
    transmissions of the largest configured honest count.

    :returns: The number of rows written.
    """
    output = CsvOutput(stream, CONSTELLATION_COLUMNS)
    context = config.context
    m = config.m_range[-1]

    for index in range(rounds):
        sequence = np.random.SeedSequence(
            config.master_seed,
            spawn_key=(index,),
        )
        block_seq, channel_seq, noise_seq = sequence.spawn(3)
        _, vectors = user_vectors(
            config.K,
            m,
            config.adversary,
            context,
            np.random.default_rng(block_seq),
        )
        link = prepare_link(
            config.K,
            context,
            channel_seq,
            np.random.default_rng(noise_seq),
        )
        y = superpose(vectors, link.ch, link.pc, link.cb, link.rng)
        expected = np.sum([v.array for v in vectors], axis=0)
        quantized = quantize(y)

        for n, sample in enumerate(y):
            output.writerow({
                'schema_id': CONSTELLATION_SCHEMA,
                'round': index,
                'subcarrier': n,
                'y_re': float(sample.real),
                'y_im': float(sample.imag),
                't_re': int(quantized[n, 0]),
                't_im': int(quantized[n, 1]),
                'expected_re': int(expected[n, 0]),
                'expected_im': int(expected[n, 1]),
            })

    output.flush()

    return output.rows_written


def dump_residuals(config, stream, realizations=1):
    """
    Write per-user statistics of ``|b h - 1|`` over the whole band for
    ``realizations`` channel draws.

    :returns: The number of rows written.
    """
    output = CsvOutput(stream, RESIDUAL_COLUMNS)

    for index in range(realizations):
        sequence = np.random.SeedSequence(
            config.master_seed,
            spawn_key=(index,),
        )
        channel_seq, noise_seq = sequence.spawn(2)
        channel_cfg = replace(
            config.channel,
            seed=int(channel_seq.generate_state(1, np.uint64)[0]),
        )
        ch = realize_channel(channel_cfg, config.K)
        pc = acquire_precompensation(
            ch,
            config.estimation,
            np.random.default_rng(noise_seq),
            channel_cfg=channel_cfg,
            downlink=config.downlink,
        )

        for stats in residual_compensation(pc, ch):
            output.writerow(dict(
                stats._asdict(),
                schema_id=RESIDUAL_SCHEMA,
                realization=index,
            ))

    output.flush()

    return output.rows_written
