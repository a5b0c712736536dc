import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from advpad.packet import ones_complement_checksum
from reference import reference_checksum

# Frozen expectations, computed with the straight-loop reference before the
# main implementation was written.
IP_HEADER_VECTOR = bytes.fromhex("450000730000400040110000c0a80001c0a800c7")
IP_HEADER_CHECKSUM = 0xB861


def test_all_zero_input_gives_ffff():
    assert ones_complement_checksum(b"\x00" * 8) == 0xFFFF


def test_fixed_ipv4_header_vector():
    assert ones_complement_checksum(IP_HEADER_VECTOR) == IP_HEADER_CHECKSUM


def test_self_verification_yields_zero():
    # Including the computed checksum in the summed region complements to 0.
    data = IP_HEADER_VECTOR
    csum = ones_complement_checksum(data)
    patched = data[:10] + struct.pack("!H", csum) + data[12:]
    assert ones_complement_checksum(patched) == 0x0000


@given(st.binary(min_size=0, max_size=512))
@settings(max_examples=200, deadline=None)
def test_matches_reference_loop(data):
    assert ones_complement_checksum(data) == reference_checksum(data)


@given(st.binary(min_size=2, max_size=256).filter(lambda b: len(b) % 2 == 0))
@settings(max_examples=100, deadline=None)
def test_invariant_under_word_permutation(data):
    words = [data[i : i + 2] for i in range(0, len(data), 2)]
    rng = random.Random(len(data))
    rng.shuffle(words)
    assert ones_complement_checksum(b"".join(words)) == ones_complement_checksum(data)


@pytest.mark.parametrize("size", [0, 1, 2, 3, 7, 20, 1499])
def test_odd_and_even_lengths(size):
    rng = random.Random(size)
    data = rng.randbytes(size)
    assert ones_complement_checksum(data) == reference_checksum(data)
