"""SHAKE-128 over an in-repo Keccak-f[1600], with squeeze accounting.

Two implementations of the permutation live here:

* ``keccak_f1600`` works on a list of 25 Python ints and backs ``XofStream``,
  the single-consumer byte source the samplers read from.
* ``keccak_f1600_batch`` applies the same rounds to a ``(25, B)`` uint64
  array, so thousands of independent sponges advance in lock-step. The
  Monte Carlo harness uses it through ``shake128_batch``.
"""

from __future__ import annotations

import math

import numpy as np

RATE_BYTES = 168  # SHAKE-128: 1600 - 2*128 bits
_RATE_LANES = RATE_BYTES // 8
_SHAKE_PAD = 0x1F
_MASK64 = (1 << 64) - 1

ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
    0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
    0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
    0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
    0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
    0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
    0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# Rotation offsets indexed by lane x + 5*y.
RHO_OFFSETS = (
    0, 1, 62, 28, 27,
    36, 44, 6, 55, 20,
    3, 10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2, 61, 56, 14,
)

# pi: lane (x, y) moves to (y, 2x + 3y).
_PI_DEST = tuple(y + 5 * ((2 * x + 3 * y) % 5) for y in range(5) for x in range(5))
_PI_SRC = [0] * 25
for _y in range(5):
    for _x in range(5):
        _PI_SRC[_PI_DEST[_x + 5 * _y]] = _x + 5 * _y
_PI_SRC = tuple(_PI_SRC)
_RHO_BY_DEST = tuple(RHO_OFFSETS[s] for s in _PI_SRC)


class Exhausted(Exception):
    """Raised when a byte source cannot supply the next byte.

    For a capped ``XofStream`` this is the expected signal that the squeeze
    budget ran out, not a failure of the stream itself.
    """


def _rotl(v, n):
    return ((v << n) | (v >> (64 - n))) & _MASK64 if n else v


def keccak_f1600(lanes):
    """Apply the 24-round permutation in place to 25 lanes (index x + 5y)."""
    a = lanes
    for rc in ROUND_CONSTANTS:
        c0 = a[0] ^ a[5] ^ a[10] ^ a[15] ^ a[20]
        c1 = a[1] ^ a[6] ^ a[11] ^ a[16] ^ a[21]
        c2 = a[2] ^ a[7] ^ a[12] ^ a[17] ^ a[22]
        c3 = a[3] ^ a[8] ^ a[13] ^ a[18] ^ a[23]
        c4 = a[4] ^ a[9] ^ a[14] ^ a[19] ^ a[24]
        d = (
            c4 ^ (((c1 << 1) | (c1 >> 63)) & _MASK64),
            c0 ^ (((c2 << 1) | (c2 >> 63)) & _MASK64),
            c1 ^ (((c3 << 1) | (c3 >> 63)) & _MASK64),
            c2 ^ (((c4 << 1) | (c4 >> 63)) & _MASK64),
            c3 ^ (((c0 << 1) | (c0 >> 63)) & _MASK64),
        )
        b = [_rotl(a[src] ^ d[src % 5], r) for src, r in zip(_PI_SRC, _RHO_BY_DEST)]
        for y in range(0, 25, 5):
            b0, b1, b2, b3, b4 = b[y], b[y + 1], b[y + 2], b[y + 3], b[y + 4]
            a[y] = b0 ^ (~b1 & b2)
            a[y + 1] = b1 ^ (~b2 & b3)
            a[y + 2] = b2 ^ (~b3 & b4)
            a[y + 3] = b3 ^ (~b4 & b0)
            a[y + 4] = b4 ^ (~b0 & b1)
        a[0] ^= rc
    return a


def _pad(message: bytes) -> bytes:
    padded = bytearray(message)
    padded.append(_SHAKE_PAD)
    padded.extend(b"\x00" * (-len(padded) % RATE_BYTES))
    padded[-1] |= 0x80
    return bytes(padded)


class XofStream:
    """SHAKE-128 output as a lazily squeezed byte stream.

    ``blocks_squeezed`` counts 168-byte output blocks actually produced,
    which is always ``ceil(bytes_emitted / 168)`` because a block is only
    squeezed when the first byte of it is requested. With ``cap_blocks``
    set, asking for a byte past ``168 * cap_blocks`` raises ``Exhausted``.
    """

    rate_bytes = RATE_BYTES

    def __init__(self, seed: bytes, cap_blocks: int | None = None):
        seed = bytes(seed)
        if cap_blocks is not None and cap_blocks < 0:
            raise ValueError("cap_blocks must be non-negative")
        self.seed_material = seed
        self.cap_blocks = cap_blocks
        self.bytes_emitted = 0
        self.blocks_squeezed = 0
        self._state = [0] * 25
        padded = _pad(seed)
        blocks = [padded[i:i + RATE_BYTES] for i in range(0, len(padded), RATE_BYTES)]
        for block in blocks[:-1]:
            self._absorb(block)
            keccak_f1600(self._state)
        # The last absorb is folded into the first squeeze so that
        # every permutation after construction corresponds to one block.
        self._absorb(blocks[-1])
        self._block = b""

    def _absorb(self, block):
        for i in range(_RATE_LANES):
            self._state[i] ^= int.from_bytes(block[8 * i:8 * i + 8], "little")

    def _squeeze_block(self):
        if self.cap_blocks is not None and self.blocks_squeezed >= self.cap_blocks:
            raise Exhausted(f"squeeze cap of {self.cap_blocks} blocks reached")
        keccak_f1600(self._state)
        self._block = b"".join(lane.to_bytes(8, "little") for lane in self._state[:_RATE_LANES])
        self.blocks_squeezed += 1

    def next_byte(self) -> int:
        offset = self.bytes_emitted % RATE_BYTES
        if offset == 0:
            self._squeeze_block()
        self.bytes_emitted += 1
        return self._block[offset]

    def read(self, n: int) -> bytes:
        """Return the next ``n`` bytes (raises ``Exhausted`` past the cap)."""
        return bytes(self.next_byte() for _ in range(n))

    @property
    def capacity_bytes(self) -> int | None:
        return None if self.cap_blocks is None else RATE_BYTES * self.cap_blocks

    def __repr__(self):
        return (f"XofStream(seed={self.seed_material.hex()!r}, bytes_emitted={self.bytes_emitted}, "
                f"blocks_squeezed={self.blocks_squeezed}, cap_blocks={self.cap_blocks})")


def new_stream(seed: bytes, cap_blocks: int | None = None) -> XofStream:
    if not seed:
        raise ValueError("seed must be non-empty")
    return XofStream(seed, cap_blocks)


def shake128(message: bytes, n: int) -> bytes:
    """One-shot SHAKE-128 digest of ``n`` bytes."""
    return XofStream(message).read(n)


# --- batched sponge ---------------------------------------------------------

_RC_U64 = np.array(ROUND_CONSTANTS, dtype=np.uint64)
_PI_SRC_ARR = np.array(_PI_SRC)
_RHO_DEST_U64 = np.array(_RHO_BY_DEST, dtype=np.uint64)[:, None]
_RHO_DEST_INV_U64 = ((np.uint64(64) - _RHO_DEST_U64) % np.uint64(64))


def keccak_f1600_batch(state: np.ndarray) -> np.ndarray:
    """Permute a ``(25, B)`` uint64 array of independent states; returns a new array."""
    a = np.array(state, dtype=np.uint64, copy=True)
    one = np.uint64(1)
    sixty_three = np.uint64(63)
    for rc in _RC_U64:
        c = a[0:5] ^ a[5:10] ^ a[10:15] ^ a[15:20] ^ a[20:25]
        c_next = np.roll(c, -1, axis=0)
        d = np.roll(c, 1, axis=0) ^ ((c_next << one) | (c_next >> sixty_three))
        a ^= np.tile(d, (5, 1))
        src = a[_PI_SRC_ARR]
        # offset-0 lane: x >> 0 | x << 0 == x, so no special case is needed
        b = (src << _RHO_DEST_U64) | (src >> _RHO_DEST_INV_U64)
        b = b.reshape(5, 5, -1)
        a = (b ^ (~np.roll(b, -1, axis=1) & np.roll(b, -2, axis=1))).reshape(25, -1)
        a[0] ^= rc
    return a


def shake128_batch(messages, n_bytes: int) -> np.ndarray:
    """SHAKE-128 of many equal-length messages, as a ``(B, n_bytes)`` uint8 array.

    Messages must fit in a single rate block (< 168 bytes), which covers
    every seed layout used in this package.
    """
    messages = [bytes(m) for m in messages]
    if not messages:
        return np.zeros((0, n_bytes), dtype=np.uint8)
    length = len(messages[0])
    if any(len(m) != length for m in messages):
        raise ValueError("messages must share a length")
    if length >= RATE_BYTES:
        raise ValueError("batched absorb supports single-block messages only")
    block = np.zeros((len(messages), RATE_BYTES), dtype=np.uint8)
    block[:, :length] = np.frombuffer(b"".join(messages), dtype=np.uint8).reshape(-1, length)
    block[:, length] ^= _SHAKE_PAD
    block[:, RATE_BYTES - 1] ^= 0x80
    state = np.zeros((25, len(messages)), dtype=np.uint64)
    state[:_RATE_LANES] = block.view("<u8").T
    n_blocks = max(1, math.ceil(n_bytes / RATE_BYTES))
    out = np.empty((len(messages), n_blocks * RATE_BYTES), dtype=np.uint8)
    for k in range(n_blocks):
        state = keccak_f1600_batch(state)
        lanes = np.ascontiguousarray(state[:_RATE_LANES].T).astype("<u8")
        out[:, k * RATE_BYTES:(k + 1) * RATE_BYTES] = lanes.view(np.uint8)
    return out[:, :n_bytes]
