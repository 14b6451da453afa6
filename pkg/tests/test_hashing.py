"""
Test block hashing.
"""
import hashlib

from unittest import TestCase

from parameterized import parameterized

from aircon.errors import InvalidInputError
from aircon.hashing import (
    CandidateBlock,
    hash_block,
    hash_symbols,
)
from aircon.lattice import build_codebook


class HashTests(TestCase):
    def test_same_payload_gives_same_bits(self):
        self.assertEqual(
            hash_block(CandidateBlock(b'block 7', height=1)),
            hash_block(CandidateBlock(b'block 7', height=9)),
        )

    def test_different_payloads_differ(self):
        self.assertNotEqual(
            hash_block(CandidateBlock(b'block 7')),
            hash_block(CandidateBlock(b'block 8')),
        )

    @parameterized.expand([(1,), (12,), (128,), (130,)])
    def test_hash_has_the_requested_length(self, length):
        value = hash_block(CandidateBlock(b'payload'), length)
        self.assertEqual(length, value.length)
        self.assertEqual(length, len(str(value)))

    def test_bits_are_the_shake256_digest(self):
        digest = hashlib.shake_256(b'payload').digest(2)
        expected = format(int.from_bytes(digest, 'big'), '016b')

        self.assertEqual(
            expected,
            str(hash_block(CandidateBlock(b'payload'), 16)),
        )

    def test_shorter_hash_is_a_prefix(self):
        long = str(hash_block(CandidateBlock(b'payload'), 128))
        short = str(hash_block(CandidateBlock(b'payload'), 20))
        self.assertTrue(long.startswith(short))

    def test_hash_symbols_gives_43_symbols(self):
        vector = hash_symbols(CandidateBlock(b'payload'), build_codebook())
        self.assertEqual(43, len(vector))

    def test_bits_look_uniform(self):
        ones = sum(
            sum(hash_block(CandidateBlock(str(i).encode())).bits)
            for i in range(200)
        )
        self.assertAlmostEqual(0.5, ones / (200 * 128), delta=0.02)

    @parameterized.expand([
        ('empty_payload', dict(payload=b'')),
        ('negative_height', dict(payload=b'x', height=-1)),
    ])
    def test_invalid_blocks_when(self, _, kwargs):
        with self.assertRaises(InvalidInputError):
            CandidateBlock(**kwargs)

    def test_invalid_length(self):
        with self.assertRaises(InvalidInputError):
            hash_block(CandidateBlock(b'x'), 0)
