"""Byte providers and a nibble-granular reader with one-slot push-back."""

from __future__ import annotations

import math

from .xof import Exhausted


class ByteVector:
    """A fixed byte sequence exposed through the same ``next_byte`` protocol as ``XofStream``."""

    def __init__(self, data):
        self.data = bytes(data)
        self.bytes_emitted = 0

    def next_byte(self) -> int:
        if self.bytes_emitted >= len(self.data):
            raise Exhausted(f"byte vector of length {len(self.data)} exhausted")
        b = self.data[self.bytes_emitted]
        self.bytes_emitted += 1
        return b

    def __repr__(self):
        return f"ByteVector({len(self.data)} bytes, at {self.bytes_emitted})"


def as_source(source):
    """Wrap raw bytes-like input in a ``ByteVector``; pass providers through."""
    if hasattr(source, "next_byte"):
        return source
    return ByteVector(source)


class DoublePushBack(RuntimeError):
    pass


class NibbleReader:
    """Reads 12-bit candidates four bits at a time, high nibble of each byte first.

    ``push_back_low8`` parks the low 8 bits of a candidate so that the next
    candidate is completed with a single fresh nibble.
    """

    def __init__(self, source):
        self.source = as_source(source)
        self.pending = None
        self.fresh_nibbles_consumed = 0
        self._low = None  # low nibble of the last byte, not yet handed out

    def _next_nibble(self) -> int:
        if self._low is not None:
            nib, self._low = self._low, None
        else:
            b = self.source.next_byte()
            nib, self._low = b >> 4, b & 0x0F
        self.fresh_nibbles_consumed += 1
        return nib

    def next_candidate12(self) -> int:
        if self.pending is not None:
            value = (self.pending << 4) | self._next_nibble()
            self.pending = None
            return value
        n1 = self._next_nibble()
        n2 = self._next_nibble()
        n3 = self._next_nibble()
        return (n1 << 8) | (n2 << 4) | n3

    def push_back_low8(self, value: int) -> None:
        if self.pending is not None:
            raise DoublePushBack("a remainder is already held back")
        self.pending = value & 0xFF

    @property
    def fresh_bits(self) -> int:
        return 4 * self.fresh_nibbles_consumed

    @property
    def bytes_consumed(self) -> int:
        return math.ceil(self.fresh_nibbles_consumed / 2)
