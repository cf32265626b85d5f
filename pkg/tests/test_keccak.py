"""Keccak-256 against published vectors and basic properties."""

import pytest
from hypothesis import given, strategies as st

from reentscan.keccak import keccak256

# independently published Keccak-256 digests (pre-NIST-padding variant)
VECTORS = {
    b"": "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470",
    b"abc": "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45",
    b"The quick brown fox jumps over the lazy dog":
        "4d741b6f1eb29cb2a9b9911c82f56fa8d73b04959d3d9d222895df6c0b28aa15",
}


@pytest.mark.parametrize("data,expected", sorted(VECTORS.items()))
def test_known_vectors(data, expected):
    assert keccak256(data).hex() == expected


def test_multi_block_input():
    # longer than the 136-byte rate, exercising multiple absorb rounds
    data = b"\x61" * 300
    digest = keccak256(data)
    assert len(digest) == 32
    assert digest == keccak256(b"a" * 300)
    assert digest != keccak256(b"a" * 299)


@given(st.binary(max_size=400))
def test_digest_shape(data):
    digest = keccak256(data)
    assert len(digest) == 32
    assert keccak256(data) == digest  # deterministic


@given(st.binary(max_size=200), st.binary(min_size=1, max_size=8))
def test_extension_changes_digest(data, suffix):
    assert keccak256(data) != keccak256(data + suffix)
