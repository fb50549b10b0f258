import hashlib
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samplentt.xof import (
    RATE_BYTES,
    Exhausted,
    XofStream,
    keccak_f1600,
    keccak_f1600_batch,
    new_stream,
    shake128,
    shake128_batch,
)

def shake(data, n):
    return hashlib.shake_128(bytes(data)).digest(n)


# FIPS 202 example output, SHAKE128 of the empty message
EMPTY_KAT = bytes.fromhex(
    "7f9c2ba4e88f827d616045507605853ed73b8093f6efbc88eb1a6eacfa66ef26"
)


def test_empty_message_known_answer():
    assert shake128(b"", 32) == EMPTY_KAT
    assert shake128(b"", 4) == bytes.fromhex("7f9c2ba4")


def test_keccak_zero_state_first_lane():
    # Keccak-f[1600] applied to the all-zero state (keccak team test vector)
    state = keccak_f1600([0] * 25)
    assert state[0] == 0xF1258F7940E1DDE7
    assert state[1] == 0x84D5CCF933C0478A


@settings(max_examples=60, deadline=None)
@given(st.binary(max_size=400), st.integers(1, 700))
def test_matches_stdlib(msg, n):
    assert shake128(msg, n) == shake(msg, n)


def test_batch_matches_scalar():
    msgs = [bytes([i]) * 34 for i in range(64)]
    out = shake128_batch(msgs, 3 * RATE_BYTES + 5)
    for m, row in zip(msgs, out):
        assert row.tobytes() == shake(m, 3 * RATE_BYTES + 5)


def test_batch_permutation_matches_scalar():
    rng = np.random.default_rng(7)
    states = rng.integers(0, 2**63, size=(25, 5), dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    got = keccak_f1600_batch(states)
    for col in range(5):
        ref = keccak_f1600([int(v) for v in states[:, col]])
        assert [int(v) for v in got[:, col]] == ref


def test_batch_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        shake128_batch([b"a", b"bb"], 10)


def test_domain_separated_seeds_differ():
    rho = bytes(range(32))
    a = new_stream(rho + bytes((0, 0))).read(16)
    b = new_stream(rho + bytes((0, 1))).read(16)
    assert a != b


def test_empty_seed_rejected():
    with pytest.raises(ValueError):
        new_stream(b"")


def test_lazy_squeeze_accounting():
    s = XofStream(b"seed")
    assert (s.bytes_emitted, s.blocks_squeezed) == (0, 0)
    s.read(168)
    assert s.blocks_squeezed == 1
    s.next_byte()  # 169th byte
    assert s.blocks_squeezed == 2
    s.read(504 - 169)
    assert (s.bytes_emitted, s.blocks_squeezed) == (504, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 800))
def test_blocks_track_bytes(m):
    s = XofStream(b"accounting")
    s.read(m)
    assert s.blocks_squeezed == math.ceil(m / RATE_BYTES)


def test_cap_two_blocks():
    s = XofStream(b"cap", cap_blocks=2)
    assert s.capacity_bytes == 336
    s.read(336)
    with pytest.raises(Exhausted):
        s.next_byte()  # 337th
    assert s.bytes_emitted == 336
    assert s.blocks_squeezed == 2


def test_capped_prefix_equals_uncapped():
    assert XofStream(b"p", cap_blocks=2).read(336) == XofStream(b"p").read(336)


def test_determinism():
    assert XofStream(b"same").read(500) == XofStream(b"same").read(500)
