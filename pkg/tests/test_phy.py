"""
Test the over-the-air computation round.
"""
import math

from unittest import TestCase

import numpy as np

from parameterized import parameterized

from aircon.channel import (
    ChannelConfig,
    ChannelRealization,
    realize_channel,
)
from aircon.errors import (
    ConfigurationError,
    InvalidInputError,
)
from aircon.lattice import (
    build_codebook,
    mod_coarse,
)
from aircon.phy import (
    ACTIVE_COUNT,
    ARITHMETIC_MEAN,
    EUCLIDEAN_NORM,
    Downlink,
    PrecompensationMatrix,
    SuperposedVector,
    aircomp_round,
    apply_residual_phase,
    broadcast_aggregate,
    clip_magnitude,
    invert_gains,
    over_the_air,
    superpose,
)

from .common import random_vector


def exact_sum(vectors):
    return sum(v.array for v in vectors)


class PrecompensationTests(TestCase):
    def test_perfect_precompensation_inverts_the_channel(self):
        ch = realize_channel(ChannelConfig(kind='epa', seed=5), 4)
        pc = PrecompensationMatrix.perfect(ch)

        self.assertTrue(np.allclose(1.0, ch.gains * pc.coeffs))

    def test_max_gain_clips_coefficients(self):
        ch = ChannelRealization(gains=[[0.01, 1.0]], noise_var=0.0)
        pc = PrecompensationMatrix.perfect(ch, max_gain=10.0)

        self.assertAlmostEqual(10.0, abs(pc.coeffs[0, 0]))
        self.assertAlmostEqual(1.0, abs(pc.coeffs[0, 1]))

    def test_clipping_keeps_the_phase(self):
        coeffs = clip_magnitude(np.array([3 + 4j]), 1.0)
        self.assertTrue(np.allclose([0.6 + 0.8j], coeffs))

    def test_invert_gains_without_clipping(self):
        self.assertTrue(np.allclose([0.5, -1j], invert_gains([2.0, 1j])))

    def test_matrix_is_read_only(self):
        pc = PrecompensationMatrix([[1.0, 2.0]])

        with self.assertRaises(ValueError):
            pc.coeffs[0, 0] = 3.0

    def test_matrix_rejects_non_finite_coefficients(self):
        with self.assertRaises(InvalidInputError):
            PrecompensationMatrix([[np.nan]])

    def test_take(self):
        pc = PrecompensationMatrix(np.ones((3, 72)))
        self.assertEqual((3, 43), pc.take(43).shape)


class DownlinkTests(TestCase):
    def test_default_is_ideal(self):
        self.assertTrue(Downlink().is_ideal)

    def test_unsupported_mode(self):
        with self.assertRaises(ConfigurationError) as ctx:
            Downlink(mode='lossy')

        self.assertEqual('downlink.mode', ctx.exception.key)

    def test_noise_variance(self):
        self.assertAlmostEqual(1e-3, Downlink('noisy', 30.0).noise_var)


class AircompRoundTests(TestCase):
    def setUp(self):
        self.cb = build_codebook()
        self.rng = np.random.default_rng(21)

    def make_link(self, num_users, kind='awgn', snr_db=math.inf):
        ch = realize_channel(
            ChannelConfig(kind=kind, snr_db=snr_db, seed=8),
            num_users,
        ).take(43)

        return ch, PrecompensationMatrix.perfect(ch)

    @parameterized.expand([('awgn',), ('flat',), ('epa',)])
    def test_noiseless_round_gives_the_exact_sum_over(self, kind):
        ch, pc = self.make_link(7, kind=kind)
        vectors = [random_vector(self.rng) for _ in range(7)]
        t = aircomp_round(vectors, ch, pc, self.cb, self.rng)

        self.assertIsInstance(t, SuperposedVector)
        self.assertTrue(np.array_equal(exact_sum(vectors), t.array))

    def test_identical_vectors_add_coherently(self):
        ch, pc = self.make_link(5)
        vector = random_vector(self.rng)
        t = aircomp_round([vector] * 5, ch, pc, self.cb, self.rng)

        self.assertTrue(np.array_equal(5 * vector.array, t.array))

    def test_high_snr_round_is_exact(self):
        ch, pc = self.make_link(4, kind='epa', snr_db=40.0)
        vectors = [random_vector(self.rng) for _ in range(4)]
        t = aircomp_round(vectors, ch, pc, self.cb, self.rng)

        self.assertTrue(np.array_equal(exact_sum(vectors), t.array))

    def test_low_snr_round_makes_errors(self):
        ch, pc = self.make_link(4, snr_db=-5.0)
        vectors = [random_vector(self.rng) for _ in range(4)]
        t = aircomp_round(vectors, ch, pc, self.cb, self.rng)

        self.assertFalse(np.array_equal(exact_sum(vectors), t.array))

    def test_superpose_removes_the_transmit_scaling(self):
        ch, pc = self.make_link(2)
        vectors = [random_vector(self.rng) for _ in range(2)]
        y = superpose(vectors, ch, pc, self.cb, self.rng)

        self.assertTrue(np.allclose(
            exact_sum(vectors)[:, 0] + 1j * exact_sum(vectors)[:, 1],
            y,
        ))

    def test_subset_of_users_transmits(self):
        ch, pc = self.make_link(5, kind='flat')
        vectors = [random_vector(self.rng) for _ in range(2)]
        t = aircomp_round(vectors, ch, pc, self.cb, self.rng, users=[1, 4])

        self.assertTrue(np.array_equal(exact_sum(vectors), t.array))

    def test_modulo_reduction_recovers_the_codeword_sum(self):
        ch, pc = self.make_link(3)
        vectors = [random_vector(self.rng) for _ in range(3)]
        t = aircomp_round(vectors, ch, pc, self.cb, self.rng)

        self.assertTrue(np.array_equal(
            mod_coarse(exact_sum(vectors), self.cb),
            mod_coarse(t.array, self.cb),
        ))

    @parameterized.expand([
        ('no_vectors', 0, 43, None),
        ('wrong_length', 2, 42, None),
        ('user_mismatch', 2, 43, [0]),
        ('user_out_of_range', 2, 43, [0, 9]),
    ])
    def test_invalid_round_when(self, _, count, length, users):
        ch, pc = self.make_link(3)
        vectors = [random_vector(self.rng, length) for _ in range(count)]

        with self.assertRaises(InvalidInputError):
            aircomp_round(vectors, ch, pc, self.cb, self.rng, users=users)

    def test_mismatched_precompensation(self):
        ch, _ = self.make_link(3)
        pc = PrecompensationMatrix(np.ones((3, 72)))

        with self.assertRaises(InvalidInputError):
            aircomp_round([random_vector(self.rng)], ch, pc, self.cb,
                          self.rng)


class BroadcastTests(TestCase):
    def setUp(self):
        self.cb = build_codebook()
        self.t = SuperposedVector(
            np.random.default_rng(2).integers(-5, 6, size=(43, 2)),
        )

    def test_ideal_downlink_gives_everyone_the_same_vector(self):
        received = broadcast_aggregate(self.t, Downlink(), 4, self.cb)

        self.assertEqual(4, len(received))
        self.assertTrue(all(r is self.t for r in received))

    def test_high_snr_downlink_is_error_free(self):
        received = broadcast_aggregate(
            self.t,
            Downlink('noisy', snr_db=40.0),
            6,
            self.cb,
            np.random.default_rng(0),
        )

        self.assertTrue(all(r == self.t for r in received))

    def test_low_snr_downlink_gives_users_different_vectors(self):
        received = broadcast_aggregate(
            self.t,
            Downlink('noisy', snr_db=0.0),
            3,
            self.cb,
            np.random.default_rng(0),
        )

        self.assertFalse(received[0] == received[1])

    def test_noisy_downlink_needs_a_generator(self):
        with self.assertRaises(InvalidInputError):
            broadcast_aggregate(self.t, Downlink('noisy'), 2, self.cb)


class ResidualPhaseTests(TestCase):
    def setUp(self):
        self.ch = ChannelRealization(gains=np.ones((3, 4)), noise_var=0.0)

    def test_zero_bound_keeps_the_channel(self):
        rng = np.random.default_rng(0)
        self.assertIs(self.ch, apply_residual_phase(self.ch, 0.0, rng))

    def test_rotation_is_per_user_and_bounded(self):
        rotated = apply_residual_phase(
            self.ch,
            0.3,
            np.random.default_rng(0),
        )
        angles = np.angle(rotated.gains)

        self.assertTrue(np.allclose(1.0, np.abs(rotated.gains)))
        self.assertTrue(np.all(np.abs(angles) <= 0.3))
        self.assertTrue(np.allclose(angles, angles[:, :1]))

    def test_negative_bound(self):
        with self.assertRaises(InvalidInputError):
            apply_residual_phase(self.ch, -0.1, np.random.default_rng(0))


class NomographicTests(TestCase):
    def setUp(self):
        self.gains = np.array([0.3 - 1j, 2.0, 1j, -0.7])
        self.values = [1.0, 0.0, 3.0, 4.0]

    def compute(self, function, noise_var=0.0):
        return over_the_air(
            function,
            self.values,
            self.gains,
            invert_gains(self.gains),
            noise_var,
            np.random.default_rng(0),
        )

    @parameterized.expand([
        ('mean', ARITHMETIC_MEAN, 2.0),
        ('norm', EUCLIDEAN_NORM, math.sqrt(26.0)),
        ('count', ACTIVE_COUNT, 3.0),
    ])
    def test_noiseless_function(self, _, function, expected):
        self.assertAlmostEqual(expected, self.compute(function))

    def test_noise_perturbs_the_result(self):
        self.assertNotAlmostEqual(
            2.0,
            self.compute(ARITHMETIC_MEAN, noise_var=1.0),
        )

    def test_shape_mismatch(self):
        with self.assertRaises(InvalidInputError):
            over_the_air(ARITHMETIC_MEAN, [1.0], [1.0, 1.0], [1.0, 1.0],
                         0.0, np.random.default_rng(0))
