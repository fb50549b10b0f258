"""Rejection samplers mapping a byte stream to a uniform element of Z_q^256.

All three samplers produce candidates in (d1, d2) pairs and accept a
candidate when it is below q and the polynomial is not yet full. A d2 that
is produced after the 256th coefficient was written is still drawn from the
stream and is counted as rejected, so ``accepted + rejected`` always equals
``candidates_total``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .bitstream import NibbleReader, as_source
from .xof import Exhausted

Q = 3329
N = 256
MASK12 = 4095
SPDM_THRESHOLD = 3584  # candidates at or above this keep their low 8 bits


class Polynomial:
    """256 coefficients in [0, q), in NTT representation."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients):
        coefficients = tuple(int(c) for c in coefficients)
        if len(coefficients) != N:
            raise ValueError(f"expected {N} coefficients, got {len(coefficients)}")
        if any(not 0 <= c < Q for c in coefficients):
            raise ValueError(f"coefficients must lie in [0, {Q})")
        self.coefficients = coefficients

    def __len__(self):
        return N

    def __iter__(self):
        return iter(self.coefficients)

    def __getitem__(self, i):
        return self.coefficients[i]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        head = ", ".join(map(str, self.coefficients[:4]))
        return f"Polynomial([{head}, ...])"

    def to_bytes_le16(self) -> bytes:
        return b"".join(c.to_bytes(2, "little") for c in self.coefficients)


@dataclass
class SampleReport:
    candidates_total: int = 0
    accepted: int = 0
    rejected: int = 0
    fresh_bits: int = 0
    bytes_consumed: int = 0
    blocks_squeezed: int | None = None

    @property
    def rejection_rate(self) -> float:
        return self.rejected / self.candidates_total if self.candidates_total else 0.0

    def __add__(self, other: "SampleReport") -> "SampleReport":
        if not isinstance(other, SampleReport):
            return NotImplemented
        merged = {}
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            merged[f.name] = None if a is None or b is None else a + b
        return SampleReport(**merged)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rejection_rate"] = self.rejection_rate
        return d


class SamplingExhausted(Exhausted):
    """The source ran dry before 256 coefficients were accepted.

    ``report`` holds the accounting up to that point; the partial
    polynomial is discarded.
    """

    def __init__(self, message, report: SampleReport):
        super().__init__(message)
        self.report = report


class _Acceptor:
    def __init__(self, source):
        self.coeffs = []
        self.report = SampleReport()
        self.source = source
        self._blocks0 = getattr(source, "blocks_squeezed", None)

    def next_byte(self):
        b = self.source.next_byte()
        self.report.bytes_consumed += 1
        return b

    def offer(self, d):
        self.report.candidates_total += 1
        if d < Q and len(self.coeffs) < N:
            self.coeffs.append(d)
            self.report.accepted += 1
        else:
            self.report.rejected += 1

    @property
    def full(self):
        return len(self.coeffs) >= N

    def finish_blocks(self):
        if self._blocks0 is not None:
            self.report.blocks_squeezed = self.source.blocks_squeezed - self._blocks0


def sample_conventional(source):
    """Three bytes per iteration: d1 from b0 and the low nibble of b1, d2 from the high nibble of b1 and b2."""
    src = as_source(source)
    acc = _Acceptor(src)
    try:
        while not acc.full:
            b0 = acc.next_byte()
            b1 = acc.next_byte()
            b2 = acc.next_byte()
            d1 = b0 + 256 * (b1 % 16)
            d2 = b1 // 16 + 16 * b2
            acc.offer(d1)
            acc.offer(d2)
    except Exhausted as exc:
        raise _exhausted(acc, exc) from exc
    acc.report.fresh_bits = 8 * acc.report.bytes_consumed
    acc.finish_blocks()
    return Polynomial(acc.coeffs), acc.report


def modified_d1(b0: int, b1: int) -> int:
    return (b0 | (b1 << 8)) & MASK12


def modified_d2(b0: int, b1: int) -> int:
    return (b1 | (b0 << 8)) & MASK12


def sample_modified(source):
    """Two bytes per iteration; each byte supplies the low 8 bits of one candidate
    and its low nibble the top 4 bits of the other."""
    src = as_source(source)
    acc = _Acceptor(src)
    try:
        while not acc.full:
            b0 = acc.next_byte()
            b1 = acc.next_byte()
            acc.offer(modified_d1(b0, b1))
            acc.offer(modified_d2(b0, b1))
    except Exhausted as exc:
        raise _exhausted(acc, exc) from exc
    acc.report.fresh_bits = 8 * acc.report.bytes_consumed
    acc.finish_blocks()
    return Polynomial(acc.coeffs), acc.report


def _spdm3_draw(reader: NibbleReader) -> int:
    d = reader.next_candidate12()
    if d >= SPDM_THRESHOLD:
        reader.push_back_low8(d)
    return d


def sample_spdm3(source):
    """Partial-discard sampler over 12-bit nibble-aligned candidates.

    A candidate at or above 3584 has only its top nibble discarded; its low
    8 bits become the high bits of the next candidate, which then costs a
    single fresh nibble. Candidates in [q, 3584) are dropped whole.

    The published pseudocode advances a byte index by +1/+2/+1 per pair,
    which would consume 4 bytes per pair in the common case; the nibble
    reader here realises the consumption that the reported bit counts imply.
    """
    src = as_source(source)
    reader = NibbleReader(src)
    acc = _Acceptor(src)
    try:
        while not acc.full:
            d1 = _spdm3_draw(reader)
            d2 = _spdm3_draw(reader)
            acc.offer(d1)
            acc.offer(d2)
    except Exhausted as exc:
        acc.report.fresh_bits = reader.fresh_bits
        acc.report.bytes_consumed = reader.bytes_consumed
        acc.finish_blocks()
        raise SamplingExhausted(str(exc), acc.report) from exc
    acc.report.fresh_bits = reader.fresh_bits
    acc.report.bytes_consumed = reader.bytes_consumed
    acc.finish_blocks()
    return Polynomial(acc.coeffs), acc.report


def _exhausted(acc, exc):
    acc.report.fresh_bits = 8 * acc.report.bytes_consumed
    acc.finish_blocks()
    return SamplingExhausted(str(exc), acc.report)


SAMPLERS = {
    "conventional": sample_conventional,
    "spdm3": sample_spdm3,
    "modified": sample_modified,
}


def get_sampler(name: str):
    try:
        return SAMPLERS[name]
    except KeyError:
        raise ValueError(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}") from None
