# coding=utf-8

"""
Common functions for tests.
"""
import math

import numpy as np

from parameterized import parameterized

from aircon.channel import (
    ChannelConfig,
    ChannelRealization,
)
from aircon.consensus import (
    ConsensusContext,
    PhyLink,
)
from aircon.lattice import (
    build_codebook,
    encode_bits,
)
from aircon.phy import (
    Downlink,
    PrecompensationMatrix,
)


def repeat_for_values(values=None):
    if not values:
        values = {
            "integers": 43,
            "floats": 0.2192,
            "strings": "pre_prepared",
            "unicode_strings": u"\u03b1 = 0.45",
            "booleans": True,
            "none": None,
        }

    return parameterized.expand(list(values.items()))


def repeat_for_integral_values(values=None):
    if not values:
        values = {
            "integers": 43,
            "floats": 0.2192,
            "booleans": True,
        }

    return parameterized.expand(list(values.items()))


def random_vector(rng, length=43, cb=None):
    """
    A hash symbol vector of ``length`` uniform codewords.
    """
    cb = cb or build_codebook()

    return encode_bits(rng.integers(0, 2, size=3 * length), cb)


def ideal_link(num_users, num_symbols=43, seed=0, downlink=None):
    """
    A unit-gain, noiseless link with perfect precompensation.
    """
    ch = ChannelRealization(
        gains=np.ones((num_users, num_symbols), dtype=complex),
        noise_var=0.0,
    )

    return PhyLink(
        ch=ch,
        pc=PrecompensationMatrix.perfect(ch),
        cb=build_codebook(),
        downlink=downlink or Downlink(),
        rng=np.random.default_rng(seed),
    )


def noiseless_context(kind='awgn', **kwargs):
    """
    A consensus context without any noise.
    """
    return ConsensusContext(
        channel=ChannelConfig(kind=kind, snr_db=math.inf),
        **kwargs
    )
