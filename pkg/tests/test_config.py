"""
Test experiment configuration files.
"""
import math
import os
import tempfile

from unittest import TestCase

from parameterized import parameterized

from aircon.channel import ChannelConfig
from aircon.config import (
    DEFAULT_SWEEPS,
    ExperimentConfig,
    load_config,
    parse_config,
)
from aircon.errors import ConfigurationError
from aircon.estimation import EstimationConfig

SAMPLE = """\
K: 7
trials: 50
master_seed: 3
channel:
  kind: epa
  snr_db: .inf
estimation:
  method: lmmse
  retransmissions: 4
  rhh_source: model
adversary:
  kind: rho_targeted
  rho: -0.3
thresholds:
  t_h1: 0.25
downlink:
  mode: noisy
  snr_db: 25
sweep:
  snr: [0, 10]
"""


class ExperimentConfigTests(TestCase):
    def test_defaults(self):
        config = ExperimentConfig()

        self.assertEqual(11, config.K)
        self.assertEqual(tuple(range(1, 12)), config.m_range)
        self.assertEqual(43, config.context.num_symbols)

    def test_explicit_honest_counts(self):
        config = ExperimentConfig(K=5, m_values=[3, 4])
        self.assertEqual((3, 4), config.m_range)

    @parameterized.expand([
        ('K', dict(K=0), 'K'),
        ('trials', dict(trials=0), 'trials'),
        ('workers', dict(workers=0), 'workers'),
        ('empty_m', dict(m_values=()), 'm_values'),
        ('m_too_large', dict(K=5, m_values=(6,)), 'm_values'),
        ('m_zero', dict(m_values=(0,)), 'm_values'),
        ('sweep_axis', dict(sweep={'power': (1,)}), 'sweep'),
        ('procedure', dict(procedure='single'), 'procedure'),
    ])
    def test_invalid_experiment_when(self, _, kwargs, key):
        with self.assertRaises(ConfigurationError) as ctx:
            ExperimentConfig(**kwargs)

        self.assertEqual(key, ctx.exception.key)

    def test_pilot_stride_cannot_exceed_the_band(self):
        with self.assertRaises(ConfigurationError) as ctx:
            ExperimentConfig(
                channel=ChannelConfig(num_subcarriers=43),
                estimation=EstimationConfig(method='ls', stride=44),
            )

        self.assertEqual('estimation.stride', ctx.exception.key)

    def test_pilot_stride_may_span_the_band(self):
        config = ExperimentConfig(
            channel=ChannelConfig(num_subcarriers=43),
            estimation=EstimationConfig(method='ls', stride=43),
        )

        self.assertEqual(43, config.estimation.stride)

    def test_sweep_values_default(self):
        config = ExperimentConfig()

        self.assertEqual(DEFAULT_SWEEPS['snr'], config.sweep_values('snr'))
        self.assertEqual(
            tuple(range(1, 9)),
            config.sweep_values('retransmissions'),
        )

    def test_sweep_values_configured(self):
        config = ExperimentConfig(sweep={'rho': [-0.5, 0.0]})
        self.assertEqual((-0.5, 0.0), config.sweep_values('rho'))

    def test_sweep_values_missing(self):
        with self.assertRaises(ConfigurationError) as ctx:
            ExperimentConfig().sweep_values('rho')

        self.assertEqual('sweep.rho', ctx.exception.key)

    def test_sweep_values_unknown_axis(self):
        with self.assertRaises(ConfigurationError):
            ExperimentConfig().sweep_values('power')


class SweepPointTests(TestCase):
    def setUp(self):
        self.config = ExperimentConfig(K=10, m_values=(6,))

    def test_no_axis(self):
        self.assertIs(self.config, self.config.at(None, None))

    def test_snr_axis(self):
        self.assertEqual(-5.0, self.config.at('snr', -5).channel.snr_db)

    def test_retransmissions_axis(self):
        point = self.config.at('retransmissions', 4)
        self.assertEqual(4, point.estimation.retransmissions)

    def test_k_axis_evaluates_every_honest_count(self):
        point = self.config.at('K', 4)

        self.assertEqual(4, point.K)
        self.assertEqual((1, 2, 3, 4), point.m_range)

    def test_m_axis(self):
        self.assertEqual((3,), self.config.at('m', 3).m_range)

    def test_rho_axis(self):
        self.assertEqual(-0.4, self.config.at('rho', -0.4).adversary.rho)

    @parameterized.expand([
        ('none', 0.0, 10),
        ('third', 0.3, 7),
        ('rounded', 0.45, 5),
    ])
    def test_alpha_axis_gives_one_honest_count_for(self, _, alpha, m):
        self.assertEqual((m,), self.config.at('alpha', alpha).m_range)

    @parameterized.expand([
        ('alpha', 'alpha', 1.0, 'sweep.alpha'),
        ('rho', 'rho', 2.0, 'sweep.rho'),
        ('m', 'm', 11, 'm_values'),
    ])
    def test_invalid_point_when(self, _, axis, value, key):
        with self.assertRaises(ConfigurationError) as ctx:
            self.config.at(axis, value)

        self.assertEqual(key, ctx.exception.key)


class ParseTests(TestCase):
    def test_empty_document_gives_defaults(self):
        self.assertEqual(ExperimentConfig(), parse_config(None))

    def test_nested_sections(self):
        config = parse_config({
            'K': 21,
            'estimation': {'method': 'ls', 'stride': 6},
            'adversary': {'kind': 'antipodal'},
            'sweep': {'alpha': [0.1, 0.2]},
        })

        self.assertEqual(21, config.K)
        self.assertEqual(6, config.estimation.stride)
        self.assertEqual('antipodal', config.adversary.kind)
        self.assertEqual((0.1, 0.2), config.sweep['alpha'])

    def test_integers_are_accepted_as_floats(self):
        config = parse_config({'channel': {'snr_db': 5}})

        self.assertIsInstance(config.channel.snr_db, float)
        self.assertEqual(5.0, config.channel.snr_db)

    @parameterized.expand([
        ('not_a_mapping', [1, 2], None),
        ('unknown_key', {'users': 3}, 'users'),
        ('unknown_nested_key', {'channel': {'doppler': 5}},
         'channel.doppler'),
        ('hidden_key', {'channel': {'seed': 5}}, 'channel.seed'),
        ('section_not_a_mapping', {'channel': 'epa'}, 'channel'),
        ('wrong_type', {'K': 'eleven'}, 'K'),
        ('boolean', {'trials': True}, 'trials'),
        ('float_for_int', {'estimation': {'stride': 2.5}},
         'estimation.stride'),
        ('bad_m_values', {'m_values': [1, 'two']}, 'm_values'),
        ('sweep_not_a_list', {'sweep': {'snr': 5}}, 'sweep.snr'),
        ('sweep_empty', {'sweep': {'snr': []}}, 'sweep.snr'),
        ('sweep_strings', {'sweep': {'snr': ['low']}}, 'sweep.snr'),
        ('bad_kind', {'channel': {'kind': 'rician'}}, None),
        ('bad_threshold', {'thresholds': {'t_h1': 0.7}}, 'thresholds'),
        ('bad_rho', {'adversary': {'rho': 3.0}}, 'adversary'),
        ('bad_method', {'estimation': {'method': 'ml'}},
         'estimation.method'),
    ])
    def test_invalid_document_when(self, _, data, key):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(data)

        if key is not None:
            self.assertEqual(key, ctx.exception.key)


class LoadTests(TestCase):
    def write(self, content):
        fd, path = tempfile.mkstemp(suffix='.yaml')

        with os.fdopen(fd, 'w') as stream:
            stream.write(content)

        self.addCleanup(os.remove, path)

        return path

    def test_load_sample(self):
        config = load_config(self.write(SAMPLE))

        self.assertEqual(7, config.K)
        self.assertEqual(50, config.trials)
        self.assertEqual('epa', config.channel.kind)
        self.assertTrue(math.isinf(config.channel.snr_db))
        self.assertEqual('model', config.estimation.rhh_source)
        self.assertEqual(-0.3, config.adversary.rho)
        self.assertEqual(0.25, config.thresholds.t_h1)
        self.assertEqual(0.5, config.thresholds.t_h2)
        self.assertFalse(config.downlink.is_ideal)
        self.assertEqual((0, 10), config.sweep_values('snr'))

    def test_load_empty_file(self):
        self.assertEqual(ExperimentConfig(), load_config(self.write('')))

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError) as ctx:
            load_config('/nonexistent/aircon.yaml')

        self.assertIn('cannot read', str(ctx.exception))

    def test_invalid_yaml(self):
        with self.assertRaises(ConfigurationError) as ctx:
            load_config(self.write('K: [1, 2\n'))

        self.assertIn('invalid YAML', str(ctx.exception))
