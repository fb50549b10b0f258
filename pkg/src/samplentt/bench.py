"""Monte Carlo harness: fresh-bit consumption, two-squeeze success, rejection rate.

Every trial reads its own SHAKE-128 stream, seeded deterministically from
the master seed (see ``batch.trial_seeds``), so a configuration always
produces the same summary regardless of chunking.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .batch import sample_seeds, trial_seeds
from .matrixgen import KYBER_LEVELS
from .samplers import N, SAMPLERS

DEFAULT_MASTER_SEED = bytes(32)
DEFAULT_TRIALS = 10_000
TWO_SQUEEZE_BLOCKS = 2
CHUNK = 20_000

CSV_COLUMNS = ("sampler", "k", "trials", "mean_bits", "stderr_bits", "rejection_pct", "two_squeeze_pct")


@dataclass
class BenchConfig:
    samplers: tuple = tuple(SAMPLERS)
    k: int = 2
    trials: int = DEFAULT_TRIALS
    master_seed: bytes = DEFAULT_MASTER_SEED
    cap_blocks: int | None = None
    output_format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.k not in KYBER_LEVELS:
            raise ValueError(f"k must be one of {sorted(KYBER_LEVELS)}")
        unknown = set(self.samplers) - set(SAMPLERS)
        if unknown:
            raise ValueError(f"unknown samplers: {sorted(unknown)}")
        self.samplers = tuple(self.samplers)
        self.master_seed = bytes(self.master_seed)


@dataclass
class SamplerSummary:
    sampler: str
    k: int
    trials: int
    mean_bits: float | None = None
    stderr_bits: float | None = None
    rejection_pct: float | None = None
    stderr_rejection_pct: float | None = None
    pooled_rejection_pct: float | None = None
    two_squeeze_pct: float | None = None
    stderr_two_squeeze_pct: float | None = None
    mean_blocks: float | None = None
    cap_blocks: int | None = None
    capped_success_pct: float | None = None


@dataclass
class BenchSummary:
    rows: list = field(default_factory=list)

    def row(self, sampler: str) -> SamplerSummary:
        for r in self.rows:
            if r.sampler == sampler:
                return r
        raise KeyError(sampler)

    def merge(self, other: "BenchSummary") -> "BenchSummary":
        """Overlay the non-empty fields of ``other`` onto matching rows."""
        out = BenchSummary([SamplerSummary(**asdict(r)) for r in self.rows])
        for r in other.rows:
            try:
                mine = out.row(r.sampler)
            except KeyError:
                out.rows.append(SamplerSummary(**asdict(r)))
                continue
            for f in fields(r):
                v = getattr(r, f.name)
                if v is not None:
                    setattr(mine, f.name, v)
        return out

    def to_dict(self) -> list:
        return [asdict(r) for r in self.rows]

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(["" if getattr(r, c) is None else _fmt(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{'sampler':<14}{'k':>3}{'trials':>10}{'mean bits':>12}{'+/-':>8}{'reject %':>10}{'2-squeeze %':>13}"]
        for r in self.rows:
            lines.append(
                f"{r.sampler:<14}{r.k:>3}{r.trials:>10}{_cell(r.mean_bits, 4):>12}{_cell(r.stderr_bits, 3):>8}"
                f"{_cell(r.rejection_pct, 3):>10}{_cell(r.two_squeeze_pct, 3):>13}")
        return "\n".join(lines)


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def _cell(v, digits):
    return "-" if v is None else f"{v:.{digits}f}"


def _stderr(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0


def _collect(cfg: BenchConfig, sampler: str, cap_blocks=None):
    parts = []
    for start in range(0, cfg.trials, CHUNK):
        count = min(CHUNK, cfg.trials - start)
        seeds = trial_seeds(cfg.master_seed, start, count, cfg.k)
        parts.append(sample_seeds(sampler, seeds, cap_blocks=cap_blocks))
    cat = {name: np.concatenate([getattr(p, name) for p in parts])
           for name in ("complete", "candidates", "rejected", "fresh_bits", "bytes_consumed")}
    return cat


def run_bits_experiment(cfg: BenchConfig) -> BenchSummary:
    rows = []
    for s in cfg.samplers:
        res = _collect(cfg, s)
        bits = res["fresh_bits"].astype(np.float64)
        blocks = -(-res["bytes_consumed"] // 168)
        rows.append(SamplerSummary(s, cfg.k, cfg.trials, mean_bits=float(bits.mean()),
                                   stderr_bits=_stderr(bits), mean_blocks=float(blocks.mean())))
    return BenchSummary(rows)


def run_rejection_experiment(cfg: BenchConfig) -> BenchSummary:
    rows = []
    for s in cfg.samplers:
        res = _collect(cfg, s)
        rate = 100.0 * res["rejected"] / res["candidates"]
        pooled = 100.0 * res["rejected"].sum() / res["candidates"].sum()
        rows.append(SamplerSummary(s, cfg.k, cfg.trials, rejection_pct=float(rate.mean()),
                                   stderr_rejection_pct=_stderr(rate), pooled_rejection_pct=float(pooled)))
    return BenchSummary(rows)


def run_two_squeeze_experiment(cfg: BenchConfig) -> BenchSummary:
    """Fraction of trials completing within two 168-byte squeeze blocks."""
    rows = []
    for s in cfg.samplers:
        res = _collect(cfg, s, cap_blocks=TWO_SQUEEZE_BLOCKS)
        ok = res["complete"].astype(np.float64)
        rows.append(SamplerSummary(s, cfg.k, cfg.trials, two_squeeze_pct=100.0 * float(ok.mean()),
                                   stderr_two_squeeze_pct=100.0 * _stderr(ok)))
    return BenchSummary(rows)


def run_capped_experiment(cfg: BenchConfig) -> BenchSummary:
    """Success fraction under an arbitrary ``cfg.cap_blocks`` squeeze budget."""
    if cfg.cap_blocks is None:
        raise ValueError("cap_blocks must be set")
    rows = []
    for s in cfg.samplers:
        res = _collect(cfg, s, cap_blocks=cfg.cap_blocks)
        rows.append(SamplerSummary(s, cfg.k, cfg.trials, cap_blocks=cfg.cap_blocks,
                                   capped_success_pct=100.0 * float(res["complete"].mean())))
    return BenchSummary(rows)


def run_all(cfg: BenchConfig) -> BenchSummary:
    summary = run_bits_experiment(cfg).merge(run_rejection_experiment(cfg))
    summary = summary.merge(run_two_squeeze_experiment(cfg))
    if cfg.cap_blocks is not None:
        summary = summary.merge(run_capped_experiment(cfg))
    return summary


def generate_samples(sampler: str, n: int, master_seed: bytes = DEFAULT_MASTER_SEED) -> np.ndarray:
    """First ``n`` coefficients of the concatenated polynomials for trials 0, 1, 2, ..."""
    polys = -(-n // N)
    parts = []
    for start in range(0, polys, CHUNK):
        count = min(CHUNK, polys - start)
        res = sample_seeds(sampler, trial_seeds(master_seed, start, count))
        parts.append(res.coefficients.reshape(-1))
    return np.concatenate(parts)[:n].astype(np.int64)


def max_accepted_within(sampler: str, budget_bytes: int = 336) -> int:
    """Upper bound on coefficients a sampler can accept from ``budget_bytes`` bytes."""
    if sampler == "conventional":
        return 2 * (budget_bytes // 3)
    if sampler == "modified":
        return 2 * (budget_bytes // 2)
    if sampler == "spdm3":
        # an accepted value ends its chain, and every chain opens with a
        # three-nibble candidate, so each acceptance costs >= 3 fresh nibbles
        return (2 * budget_bytes) // 3
    raise ValueError(f"unknown sampler {sampler!r}")
