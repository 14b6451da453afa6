"""
Test the command-line interface.
"""
import os
import shutil
import tempfile

from io import StringIO
from unittest import TestCase

from mock import patch
from parameterized import parameterized

from aircon.cli import (
    EXIT_CONFIGURATION,
    EXIT_FAILURE,
    EXIT_OK,
    build_parser,
    main,
)

CONFIG = """\
K: 3
trials: 2
master_seed: 5
channel:
  snr_db: .inf
sweep:
  snr: [0, 10]
"""


class CliTests(TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.directory)

        patcher = patch('aircon.cli.basicConfig')
        self.basic_config = patcher.start()
        self.addCleanup(patcher.stop)

    def path(self, name):
        return os.path.join(self.directory, name)

    def write_config(self, content=CONFIG):
        path = self.path('experiment.yaml')

        with open(path, 'w') as stream:
            stream.write(content)

        return path

    def read_lines(self, name):
        with open(self.path(name)) as stream:
            return stream.read().splitlines()

    def test_codebook_goes_to_standard_output(self):
        with patch('sys.stdout', new_callable=StringIO) as stdout:
            self.assertEqual(EXIT_OK, main(['codebook']))

        lines = stdout.getvalue().splitlines()
        self.assertEqual(9, len(lines))
        self.assertEqual('3,011,-1,1,2', lines[4])

    def test_complexity(self):
        status = main(['complexity', '--k', '21', '--n', '43', '-o',
                       self.path('complexity.csv')])

        self.assertEqual(EXIT_OK, status)
        self.assertIn('aircon_ce_rbs,1204',
                      self.read_lines('complexity.csv'))

    def test_invalid_complexity_parameters(self):
        with self.assertLogs('aircon.cli', 'ERROR'):
            status = main(['complexity', '--k', '1', '--n', '43'])

        self.assertEqual(EXIT_FAILURE, status)

    def test_run(self):
        status = main([
            '-q',
            'run',
            '--config',
            self.write_config(),
            '-o',
            self.path('cer.csv'),
            '--traces',
            self.path('traces.csv'),
        ])

        self.assertEqual(EXIT_OK, status)
        self.assertEqual(5, len(self.read_lines('cer.csv')))
        self.assertEqual(7, len(self.read_lines('traces.csv')))

    def test_run_logs_the_acer_when_verbose(self):
        with self.assertLogs('aircon.cli', 'INFO') as logs:
            main(['-q', '-v', 'run', '--config', self.write_config(), '-o',
                  self.path('cer.csv')])

        self.assertIn('ACER 0.0000', logs.output[-1])
        self.basic_config.assert_called_once()

    def test_run_with_workers(self):
        main(['-q', 'run', '--config', self.write_config(), '-o',
              self.path('single.csv')])
        main(['-q', 'run', '--config', self.write_config(), '-o',
              self.path('pooled.csv'), '-j', '2'])

        self.assertEqual(self.read_lines('single.csv'),
                         self.read_lines('pooled.csv'))

    def test_sweep(self):
        status = main(['-q', 'sweep', '--config', self.write_config(),
                       '--axis', 'snr', '-o', self.path('sweep.csv')])

        self.assertEqual(EXIT_OK, status)
        self.assertEqual(9, len(self.read_lines('sweep.csv')))

    def test_sweep_without_values(self):
        with self.assertLogs('aircon.cli', 'ERROR') as logs:
            status = main(['-q', 'sweep', '--config', self.write_config(),
                           '--axis', 'rho'])

        self.assertEqual(EXIT_CONFIGURATION, status)
        self.assertIn('sweep.rho', logs.output[0])

    def test_constellation(self):
        status = main(['constellation', '--config', self.write_config(),
                       '-o', self.path('constellation.csv')])

        self.assertEqual(EXIT_OK, status)
        self.assertEqual(44, len(self.read_lines('constellation.csv')))

    def test_estimation(self):
        status = main(['estimation', '--config', self.write_config(),
                       '--realizations', '2', '-o',
                       self.path('residuals.csv')])

        self.assertEqual(EXIT_OK, status)
        self.assertEqual(7, len(self.read_lines('residuals.csv')))

    @parameterized.expand([
        ('unknown_key', 'users: 3\n'),
        ('bad_value', 'K: 0\n'),
        ('bad_yaml', 'K: [1\n'),
        ('stride', 'estimation:\n  method: ls\n  stride: 100\n'),
    ])
    def test_invalid_configuration_when(self, _, content):
        with self.assertLogs('aircon.cli', 'ERROR'):
            status = main(['-q', 'run', '--config',
                           self.write_config(content)])

        self.assertEqual(EXIT_CONFIGURATION, status)

    def test_missing_configuration(self):
        with self.assertLogs('aircon.cli', 'ERROR'):
            status = main(['run', '--config', self.path('missing.yaml')])

        self.assertEqual(EXIT_CONFIGURATION, status)

    def test_unwritable_output(self):
        with self.assertLogs('aircon.cli', 'ERROR') as logs:
            status = main(['codebook', '-o',
                           self.path('missing/codebook.csv')])

        self.assertEqual(EXIT_FAILURE, status)
        self.assertIn('0 row(s) written', logs.output[0])

    @parameterized.expand([
        ('no_color', ['--no-color'], False),
        ('color', [], True),
    ])
    def test_color_option(self, _, options, color):
        with patch('sys.stdout', new_callable=StringIO):
            main(options + ['codebook'])

        self.assertEqual(color, self.basic_config.call_args[1]['color'])


class ParserTests(TestCase):
    def test_command_is_required(self):
        with patch('sys.stderr', new_callable=StringIO):
            with self.assertRaises(SystemExit):
                build_parser().parse_args([])

    def test_unknown_axis(self):
        with patch('sys.stderr', new_callable=StringIO):
            with self.assertRaises(SystemExit):
                build_parser().parse_args([
                    'sweep', '--config', 'x.yaml', '--axis', 'power',
                ])

    @parameterized.expand([
        ('none', [], 0),
        ('once', ['-v'], 1),
        ('twice', ['-vv'], 2),
    ])
    def test_verbosity(self, _, options, expected):
        args = build_parser().parse_args(options + ['codebook'])
        self.assertEqual(expected, args.verbose)
