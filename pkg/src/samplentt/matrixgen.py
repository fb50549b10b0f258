"""k-by-k public matrix generation in the NTT domain."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .samplers import Polynomial, SampleReport, get_sampler
from .xof import new_stream

KYBER_LEVELS = {2: "Kyber512", 3: "Kyber768", 4: "Kyber1024"}


@dataclass
class MatrixA:
    k: int
    entries: list  # entries[i][j] -> Polynomial
    reports: list  # reports[i][j] -> SampleReport
    aggregate: SampleReport

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def to_json(self) -> str:
        return json.dumps([[list(p.coefficients) for p in row] for row in self.entries])

    def to_bytes_le16(self) -> bytes:
        return b"".join(p.to_bytes_le16() for row in self.entries for p in row)


def entry_seed(rho: bytes, i: int, j: int) -> bytes:
    # XOF(rho, j, i): column index first
    return bytes(rho) + bytes((j, i))


def generate_entry(rho: bytes, i: int, j: int, sampler="modified", cap_blocks=None):
    fn = get_sampler(sampler) if isinstance(sampler, str) else sampler
    return fn(new_stream(entry_seed(rho, i, j), cap_blocks))


def generate_matrix(rho: bytes, k: int, sampler="modified", cap_blocks=None) -> MatrixA:
    """Sample every entry (i, j) from SHAKE-128(rho || j || i), row-major."""
    if k not in KYBER_LEVELS:
        raise ValueError(f"k must be one of {sorted(KYBER_LEVELS)}, got {k}")
    if len(rho) != 32:
        raise ValueError("rho must be 32 bytes")
    entries, reports = [], []
    aggregate = SampleReport(blocks_squeezed=0)
    for i in range(k):
        row, row_reports = [], []
        for j in range(k):
            poly, rep = generate_entry(rho, i, j, sampler, cap_blocks)
            row.append(poly)
            row_reports.append(rep)
            aggregate = aggregate + rep
        entries.append(row)
        reports.append(row_reports)
    return MatrixA(k, entries, reports, aggregate)


__all__ = ["MatrixA", "Polynomial", "generate_matrix", "generate_entry", "entry_seed", "KYBER_LEVELS"]
