import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special, stats

from samplentt.tails import (
    NORMAL_APPROX_DF, chi2_upper_tail, kolmogorov_sf, normal_two_sided, regularized_gamma_q,
)


def chi2_tail_by_quadrature(x, df):
    half = df / 2.0
    log_norm = half * math.log(2.0) + math.lgamma(half)

    def pdf(t):
        return math.exp((half - 1) * math.log(t) - t / 2 - log_norm)

    # integrate out to where the density is negligible
    hi = max(x, df) + 40 * math.sqrt(2 * df) + 200
    mid = max(x, df)
    parts = [(x, mid), (mid, hi)] if mid > x else [(x, hi)]
    return sum(integrate.quad(pdf, a, b, epsabs=1e-13, epsrel=1e-11, limit=500)[0] for a, b in parts)


@pytest.mark.parametrize("df, x", [(1, 0.3), (1, 3.84), (5, 1.0), (5, 11.07), (3328, 3200.0),
                                   (3328, 3326.6658), (3328, 3500.0)])
def test_against_quadrature(df, x):
    assert chi2_upper_tail(x, df) == pytest.approx(chi2_tail_by_quadrature(x, df), abs=1e-6)


@given(st.integers(1, 5000), st.floats(0.01, 8000))
def test_against_scipy(df, x):
    assert chi2_upper_tail(x, df) == pytest.approx(stats.chi2.sf(x, df), abs=1e-9)


def test_reported_p_values():
    assert chi2_upper_tail(3326.6658, 3328) == pytest.approx(0.5033, abs=1e-3)
    assert chi2_upper_tail(11081986, 11082240) == pytest.approx(0.5215, abs=1e-3)


def test_edges():
    assert chi2_upper_tail(0, 10) == 1.0
    assert chi2_upper_tail(2 * NORMAL_APPROX_DF, 2 * NORMAL_APPROX_DF) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        chi2_upper_tail(-1, 3)
    with pytest.raises(ValueError):
        chi2_upper_tail(1, 0)
    with pytest.raises(ValueError):
        regularized_gamma_q(0, 1)


def test_monotone():
    xs = [3000 + 10 * i for i in range(60)]
    ps = [chi2_upper_tail(x, 3328) for x in xs]
    assert all(a >= b for a, b in zip(ps, ps[1:]))


@pytest.mark.parametrize("lam", [0.1, 0.3, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0])
def test_kolmogorov(lam):
    assert kolmogorov_sf(lam) == pytest.approx(special.kolmogorov(lam), abs=1e-9)


def test_normal_two_sided():
    assert normal_two_sided(1.96) == pytest.approx(0.05, abs=1e-4)
    assert normal_two_sided(-1.24) == normal_two_sided(1.24)
