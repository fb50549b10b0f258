"""Vectorised versions of the three samplers for Monte Carlo runs.

Each kernel takes a ``(B, L)`` uint8 array of stream prefixes and returns
per-row accounting identical to what the scalar samplers report on the same
bytes. Rows that cannot finish within ``L`` bytes are flagged incomplete;
``sample_seeds`` extends those rows with more XOF output unless a squeeze
cap forbids it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .samplers import MASK12, N, Q, SPDM_THRESHOLD
from .xof import RATE_BYTES, shake128_batch

# Output blocks requested up front; covers all but a small tail of trials.
_INITIAL_BLOCKS = {"conventional": 4, "spdm3": 4, "modified": 3}


@dataclass
class BatchResult:
    complete: np.ndarray
    candidates: np.ndarray
    rejected: np.ndarray
    fresh_bits: np.ndarray
    bytes_consumed: np.ndarray
    coefficients: np.ndarray  # (B, 256); rows of incomplete trials are meaningless

    @property
    def blocks_squeezed(self) -> np.ndarray:
        return -(-self.bytes_consumed // RATE_BYTES)

    def __len__(self):
        return len(self.complete)


def _pairwise(d1, d2, bytes_per_group):
    b = d1.shape[0]
    cand = np.stack((d1, d2), axis=-1).reshape(b, -1)
    accept = cand < Q
    cum = np.cumsum(accept, axis=1, dtype=np.int32)
    complete = cum[:, -1] >= N if cand.shape[1] else np.zeros(b, dtype=bool)
    last = np.argmax(cum >= N, axis=1)
    groups = np.where(complete, last // 2 + 1, 0)
    coeffs = np.zeros((b, N), dtype=np.int16)
    keep = accept & (cum <= N) & complete[:, None]
    coeffs[complete] = cand[keep].reshape(-1, N)
    candidates = 2 * groups
    nbytes = bytes_per_group * groups
    return BatchResult(complete, candidates, candidates - N * complete, 8 * nbytes, nbytes, coeffs)


def conventional_kernel(data: np.ndarray) -> BatchResult:
    g = data.shape[1] // 3
    b = data[:, :3 * g].reshape(data.shape[0], g, 3).astype(np.int32)
    d1 = b[..., 0] + 256 * (b[..., 1] & 15)
    d2 = (b[..., 1] >> 4) + 16 * b[..., 2]
    return _pairwise(d1, d2, 3)


def modified_kernel(data: np.ndarray) -> BatchResult:
    g = data.shape[1] // 2
    b = data[:, :2 * g].reshape(data.shape[0], g, 2).astype(np.int32)
    d1 = (b[..., 0] | (b[..., 1] << 8)) & MASK12
    d2 = (b[..., 1] | (b[..., 0] << 8)) & MASK12
    return _pairwise(d1, d2, 2)


def spdm3_kernel(data: np.ndarray) -> BatchResult:
    rows_total, length = data.shape
    nib = np.empty((rows_total, 2 * length + 3), dtype=np.int32)
    nib[:, 0:2 * length:2] = data >> 4
    nib[:, 1:2 * length:2] = data & 15
    nib[:, 2 * length:] = 0  # guard so gathers past the end stay in bounds
    limit = 2 * length

    pos = np.zeros(rows_total, dtype=np.int64)
    pend = np.full(rows_total, -1, dtype=np.int64)
    j = np.zeros(rows_total, dtype=np.int64)
    cands = np.zeros(rows_total, dtype=np.int64)
    rej = np.zeros(rows_total, dtype=np.int64)
    complete = np.zeros(rows_total, dtype=bool)
    coeffs = np.zeros((rows_total, N), dtype=np.int16)
    active = np.arange(rows_total)

    def draw(rows):
        p = pos[rows]
        pe = pend[rows]
        held = pe >= 0
        need = np.where(held, 1, 3)
        ok = p + need <= limit
        n0 = nib[rows, p]
        n1 = nib[rows, p + 1]
        n2 = nib[rows, p + 2]
        val = np.where(held, pe * 16 + n0, n0 * 256 + n1 * 16 + n2)
        pos[rows] = np.where(ok, p + need, p)
        pend[rows] = np.where(ok, np.where(val >= SPDM_THRESHOLD, val & 255, -1), pe)
        return val, ok

    def offer(rows, d):
        cands[rows] += 1
        take = (d < Q) & (j[rows] < N)
        r = rows[take]
        coeffs[r, j[r]] = d[take]
        j[r] += 1
        rej[rows[~take]] += 1

    while active.size:
        d1, ok1 = draw(active)
        active = active[ok1]
        d1 = d1[ok1]
        d2, ok2 = draw(active)
        active, d1, d2 = active[ok2], d1[ok2], d2[ok2]
        offer(active, d1)
        offer(active, d2)
        done = j[active] >= N
        complete[active[done]] = True
        active = active[~done]

    nbytes = (pos + 1) // 2
    return BatchResult(complete, np.where(complete, cands, 0), np.where(complete, rej, 0),
                       np.where(complete, 4 * pos, 0), np.where(complete, nbytes, 0), coeffs)


KERNELS = {
    "conventional": conventional_kernel,
    "spdm3": spdm3_kernel,
    "modified": modified_kernel,
}


def trial_seeds(master_seed: bytes, start: int, count: int, k: int | None = None):
    """XOF inputs for trials ``start .. start+count-1``.

    Without ``k`` a trial seed is ``master_seed || le64(t)``. With ``k`` the
    trials are laid out as consecutive k-by-k matrices: trial t belongs to
    matrix ``t // k**2`` whose seed is ``master_seed || le64(matrix)``, and is
    entry ``(i, j) = divmod(t % k**2, k)``, appended as bytes ``j, i``.
    """
    seeds = []
    for t in range(start, start + count):
        if k is None:
            seeds.append(master_seed + t.to_bytes(8, "little"))
        else:
            m, e = divmod(t, k * k)
            i, jj = divmod(e, k)
            seeds.append(master_seed + m.to_bytes(8, "little") + bytes((jj, i)))
    return seeds


def sample_seeds(sampler: str, seeds, cap_blocks: int | None = None) -> BatchResult:
    """Run ``sampler`` on the SHAKE-128 stream of every seed."""
    kernel = KERNELS[sampler]
    blocks = _INITIAL_BLOCKS[sampler]
    if cap_blocks is not None:
        blocks = cap_blocks
    data = shake128_batch(seeds, blocks * RATE_BYTES)
    result = kernel(data)
    if cap_blocks is not None:
        return result
    seeds = list(seeds)
    while not result.complete.all():
        blocks *= 2
        redo = np.nonzero(~result.complete)[0]
        extra = kernel(shake128_batch([seeds[i] for i in redo], blocks * RATE_BYTES))
        for name in ("complete", "candidates", "rejected", "fresh_bits", "bytes_consumed", "coefficients"):
            getattr(result, name)[redo] = getattr(extra, name)
    return result
