"""Randomness tests over sequences of coefficients in [0, q).

Each test returns a ``TestResult``. The four hypothesis tests pass when
``p_value >= alpha``; the entropy test passes when the empirical entropy is
within a sample-size dependent bound of log2(k).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .samplers import Q
from .tails import chi2_upper_tail, kolmogorov_sf, normal_two_sided

DEFAULT_ALPHA = 0.05
RUNS_THRESHOLD = 1665  # ceil(q / 2): b = 1 iff value >= 1665
RUNS_MIN_COUNT = 20
KS_MIN_SAMPLES = 1000
SERIAL_MIN_SAMPLES = 1000
ENTROPY_FULL_SCALE = 25_600_000
ENTROPY_FULL_SCALE_BOUND = 1e-3


class TooFewSamples(ValueError):
    pass


class DegenerateSequence(ValueError):
    pass


@dataclass
class TestResult:
    test_name: str
    statistic: float
    p_value: float
    alpha: float
    passed: bool
    params: dict = field(default_factory=dict)

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self) -> dict:
        return asdict(self)


def _as_samples(samples, k):
    x = np.asarray(samples)
    if x.ndim != 1:
        x = x.reshape(-1)
    if x.size and (x.min() < 0 or x.max() >= k):
        raise ValueError(f"samples must lie in [0, {k})")
    return x.astype(np.int64, copy=False)


def frequency_test(samples, alpha=DEFAULT_ALPHA, k=Q) -> TestResult:
    x = _as_samples(samples, k)
    n = x.size
    if n < 10 * k:
        raise TooFewSamples(f"frequency test needs at least {10 * k} samples, got {n}")
    counts = np.bincount(x, minlength=k)
    expected = n / k
    dev = counts - expected
    chi2 = float(np.sum(dev * dev) / expected)
    p = chi2_upper_tail(chi2, k - 1)
    params = {
        "df": k - 1, "n": n, "expected": expected,
        "mean": float(counts.mean()), "sigma": float(math.sqrt(np.mean(dev * dev))),
    }
    return TestResult("frequency", chi2, p, alpha, p >= alpha, params)


def pair_counts(samples, k=Q) -> np.ndarray:
    """Dense k*k table of overlapping adjacent pairs (x_t, x_{t+1}), flattened row-major."""
    x = _as_samples(samples, k)
    codes = x[:-1] * k + x[1:]
    return np.bincount(codes, minlength=k * k)


def serial_test(samples, alpha=DEFAULT_ALPHA, k=Q, min_samples=SERIAL_MIN_SAMPLES) -> TestResult:
    x = _as_samples(samples, k)
    n = x.size
    if n < max(2, min_samples):
        raise TooFewSamples(f"serial test needs at least {max(2, min_samples)} samples, got {n}")
    counts = pair_counts(x, k)
    pairs = n - 1
    cells = k * k
    # sum (O - E)^2 / E  ==  cells * sum(O^2) / pairs - pairs, evaluated exactly
    sumsq = int(np.dot(counts, counts))
    chi2 = (cells * sumsq - pairs * pairs) / pairs
    df = cells - 1
    p = chi2_upper_tail(chi2, df)
    params = {"df": df, "pairs": pairs, "expected": pairs / cells}
    return TestResult("serial", chi2, p, alpha, p >= alpha, params)


def runs_statistic(n0: int, n1: int, runs: int):
    """Return (mu_R, sigma_R, Z, two-sided p) for the Wald-Wolfowitz runs test."""
    n = n0 + n1
    two = 2 * n0 * n1
    mu = two / n + 1
    var = two * (two - n) / (n * n * (n - 1))
    sigma = math.sqrt(var)
    z = (runs - mu) / sigma
    return mu, sigma, z, normal_two_sided(z)


def runs_test(samples, alpha=DEFAULT_ALPHA, threshold=RUNS_THRESHOLD, k=Q) -> TestResult:
    x = _as_samples(samples, k)
    bits = x >= threshold
    n1 = int(bits.sum())
    n0 = int(bits.size - n1)
    if n0 < RUNS_MIN_COUNT or n1 < RUNS_MIN_COUNT:
        raise DegenerateSequence(f"need at least {RUNS_MIN_COUNT} of each symbol, got n0={n0}, n1={n1}")
    runs = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    mu, sigma, z, p = runs_statistic(n0, n1, runs)
    params = {"n0": n0, "n1": n1, "runs": runs, "mu": mu, "sigma": sigma, "threshold": threshold}
    return TestResult("runs", z, p, alpha, p >= alpha, params)


def ks_test(samples, alpha=DEFAULT_ALPHA, k=Q) -> TestResult:
    """One-sample KS against the discrete uniform law on {0, ..., k-1}.

    Both CDFs are step functions jumping at the integers, so the supremum
    is attained at an integer point.
    """
    x = _as_samples(samples, k)
    n = x.size
    if n < KS_MIN_SAMPLES:
        raise TooFewSamples(f"KS test needs at least {KS_MIN_SAMPLES} samples, got {n}")
    ecdf = np.cumsum(np.bincount(x, minlength=k)) / n
    cdf = np.arange(1, k + 1) / k
    d = float(np.max(np.abs(ecdf - cdf)))
    p = kolmogorov_sf(math.sqrt(n) * d)
    return TestResult("ks", d, p, alpha, p >= alpha, {"n": n, "D": d})


def entropy_bound(n: int, k: int = Q) -> float:
    if n >= ENTROPY_FULL_SCALE:
        return ENTROPY_FULL_SCALE_BOUND
    # ten times the expected plug-in bias (k - 1) / (2 n ln 2)
    return 10 * (k - 1) / (2 * n * math.log(2))


def entropy_test(samples, alpha=DEFAULT_ALPHA, k=Q, bound=None) -> TestResult:
    x = _as_samples(samples, k)
    n = x.size
    if n < 10 * k:
        raise TooFewSamples(f"entropy test needs at least {10 * k} samples, got {n}")
    counts = np.bincount(x, minlength=k)
    nz = counts[counts > 0].astype(np.float64)
    h = float(math.log2(n) - np.sum(nz * np.log2(nz)) / n)
    h_max = math.log2(k)
    deficit = h_max - h
    if bound is None:
        bound = entropy_bound(n, k)
    # G statistic 2 n ln2 (Hmax - H) is chi-square(k-1) under uniformity
    g = max(0.0, 2 * n * math.log(2) * deficit)
    p = chi2_upper_tail(g, k - 1)
    params = {"n": n, "H": h, "H_max": h_max, "deficit": deficit, "bound": bound, "G": g}
    return TestResult("entropy", h, p, alpha, deficit <= bound, params)


TESTS = {
    "frequency": frequency_test,
    "entropy": entropy_test,
    "ks": ks_test,
    "runs": runs_test,
    "serial": serial_test,
}

TABLE_LABELS = {
    "frequency": "Frequency Test",
    "entropy": "Entropy Test",
    "ks": "Kolmogorov-Smirnov (KS) Test",
    "runs": "Wald-Wolfowitz Test",
    "serial": "Serial Test",
}


def run_all(samples, alpha=DEFAULT_ALPHA) -> list[TestResult]:
    x = _as_samples(samples, Q)
    return [fn(x, alpha=alpha) for fn in TESTS.values()]


def format_table(results: dict) -> str:
    """Render ``{sampler: [TestResult, ...]}`` as a PASS/FAIL grid, one row per test."""
    samplers = list(results)
    width = max(len(v) for v in TABLE_LABELS.values()) + 2
    lines = ["".ljust(width) + "".join(s.ljust(14) for s in samplers)]
    for name, label in TABLE_LABELS.items():
        row = label.ljust(width)
        for s in samplers:
            match = [r for r in results[s] if r.test_name == name]
            cell = "-" if not match else ("PASS" if match[0].passed else "FAIL")
            row += cell.ljust(14)
        lines.append(row.rstrip())
    return "\n".join(lines)
