"""
The ``aircon`` command.

Exit status is 0 on success, 1 on configuration errors and 2 on any other
failure.
"""
import argparse
import contextlib
import logging
import sys

from dataclasses import replace

from . import (
    basicConfig,
    mark,
)
from .config import (
    SWEEP_AXES,
    load_config,
)
from .errors import (
    AirconError,
    ConfigurationError,
    OutputError,
)
from .harness import (
    complexity_report,
    dump_constellation,
    dump_residuals,
    sweep,
    write_codebook,
    write_complexity,
)
from .lattice import build_codebook

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIGURATION = 1
EXIT_FAILURE = 2


@contextlib.contextmanager
def _open_output(path):
    if path is None or path == '-':
        yield sys.stdout
        return

    try:
        stream = open(path, 'w', newline='')
    except OSError as ex:
        raise OutputError(
            'cannot open {0}: {1}'.format(path, ex.strerror),
        ) from ex

    with stream:
        yield stream


def _load(args):
    config = load_config(args.config)

    if getattr(args, 'output', None):
        config = replace(config, output=args.output)

    if getattr(args, 'workers', None):
        config = replace(config, workers=args.workers)

    return config


def _run(args):
    config = _load(args)

    with _open_output(config.output) as stream, \
            contextlib.ExitStack() as stack:
        trace_stream = None

        if args.traces:
            trace_stream = stack.enter_context(_open_output(args.traces))

        results = sweep(
            config,
            None,
            stream,
            quiet=args.quiet,
            trace_stream=trace_stream,
        )

    logger.info('ACER %s.', mark.important(
        '{0:.4f}'.format(results[0].acer),
    ))


def _sweep(args):
    config = _load(args)

    with _open_output(config.output) as stream:
        results = sweep(config, args.axis, stream, quiet=args.quiet)

    logger.info('Swept %s point(s) along %s.', len(results),
                mark.important(args.axis))


def _codebook(args):
    with _open_output(args.output) as stream:
        write_codebook(build_codebook(), stream)


def _complexity(args):
    with _open_output(args.output) as stream:
        write_complexity(complexity_report(args.k, args.n, args.m), stream)


def _constellation(args):
    config = _load(args)

    with _open_output(config.output) as stream:
        dump_constellation(config, stream, rounds=args.rounds)


def _estimation(args):
    config = _load(args)

    with _open_output(config.output) as stream:
        dump_residuals(config, stream, realizations=args.realizations)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='aircon',
        description='Simulate over-the-air byzantine consensus.',
    )
    parser.add_argument(
        '-v',
        '--verbose',
        action='count',
        default=0,
        help='Log more; repeat for debug output.',
    )
    parser.add_argument(
        '--no-color',
        action='store_true',
        help='Never color log output.',
    )
    parser.add_argument(
        '-q',
        '--quiet',
        action='store_true',
        help='Hide progress bars.',
    )
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    def with_config(name, handler, help):
        command = commands.add_parser(name, help=help)
        command.add_argument('--config', required=True,
                             help='The YAML experiment configuration.')
        command.add_argument('-o', '--output',
                             help='Write CSV there instead of the '
                                  'configured output.')
        command.set_defaults(handler=handler)

        return command

    run = with_config('run', _run, 'Evaluate a single configuration.')
    run.add_argument('--traces', help='Also write one row per run there.')
    run.add_argument('-j', '--workers', type=int,
                     help='Worker processes for trials.')

    sweep_command = with_config('sweep', _sweep, 'Sweep one parameter.')
    sweep_command.add_argument('--axis', required=True, choices=SWEEP_AXES)
    sweep_command.add_argument('-j', '--workers', type=int,
                               help='Worker processes for trials.')

    constellation = with_config(
        'constellation',
        _constellation,
        'Dump received aggregates before quantization.',
    )
    constellation.add_argument('--rounds', type=int, default=1)

    estimation = with_config(
        'estimation',
        _estimation,
        'Dump per-user residual precompensation error.',
    )
    estimation.add_argument('--realizations', type=int, default=1)

    codebook = commands.add_parser('codebook',
                                   help='Print the lattice codebook.')
    codebook.add_argument('-o', '--output')
    codebook.set_defaults(handler=_codebook)

    complexity = commands.add_parser(
        'complexity',
        help='Compare resource blocks with pairwise PBFT.',
    )
    complexity.add_argument('--k', type=int, required=True,
                            help='Number of users.')
    complexity.add_argument('--n', type=int, required=True,
                            help='Resource blocks per message.')
    complexity.add_argument('--m', type=int, default=4,
                            help='Pilot stride.')
    complexity.add_argument('-o', '--output')
    complexity.set_defaults(handler=_complexity)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(
        args.verbose,
        logging.DEBUG,
    )
    basicConfig(level=level, color=not args.no_color)

    try:
        args.handler(args)
    except ConfigurationError as ex:
        logger.error('Invalid configuration: %s', ex)

        return EXIT_CONFIGURATION
    except OutputError as ex:
        logger.error('%s (%s row(s) written)', ex, ex.rows_written)

        return EXIT_FAILURE
    except AirconError as ex:
        logger.error('%s', ex)

        return EXIT_FAILURE

    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
