import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tim_vwap.errors import DomainError
from tim_vwap.special_fn import HypParams, gamma, gauss_series, hyp2f1_special

KAPPA_GRID = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


@pytest.mark.parametrize("x,expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0), (2.0, 1.0)])
def test_gamma_examples(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-13)


@given(st.floats(1e-6, 30.0))
def test_gamma_matches_math_gamma(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


@given(st.integers(1, 25))
def test_gamma_factorial_identity(n):
    assert gamma(float(n)) == pytest.approx(math.factorial(n - 1), rel=1e-12)


@given(st.integers(0, 20))
def test_gamma_half_integer_identity(n):
    # Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    expected = math.factorial(2 * n) * math.sqrt(math.pi) / (4**n * math.factorial(n))
    assert gamma(n + 0.5) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.01, 29.0))
def test_gamma_recurrence(x):
    assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


@pytest.mark.parametrize("kappa,z", [(0.0, 0.5), (1.0, 0.5), (0.5, -0.1), (0.5, 1.1), (0.5, float("nan"))])
def test_hypparams_validation(kappa, z):
    with pytest.raises(DomainError):
        HypParams(kappa, z)


def test_hyp_examples():
    assert hyp2f1_special(HypParams(0.25, 0.0)) == 1.0
    assert hyp2f1_special(HypParams(0.25, 1.0)) == pytest.approx(-1.0, abs=1e-8)


def test_hyp_series_oracle_half():
    kappa, z = 0.5, 0.5
    a, b, c = 1.0, kappa - 1.0, (1.0 + kappa) / 2.0
    term, total = 1.0, 1.0
    for n in range(10_000):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
    assert hyp2f1_special(HypParams(kappa, z)) == pytest.approx(total, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("kappa", KAPPA_GRID)
def test_hyp_endpoints_on_grid(kappa):
    assert hyp2f1_special(HypParams(kappa, 0.0)) == 1.0
    assert abs(hyp2f1_special(HypParams(kappa, 1.0)) + 1.0) <= 1e-8
    # the approach to -1 is slow, like (1 - z)^((1 - kappa)/2); check it against mpmath
    for z in (1.0 - 1e-6, 1.0 - 1e-12):
        ref = float(mpmath.hyp2f1(1, kappa - 1, (1 + kappa) / 2, z))
        assert hyp2f1_special(HypParams(kappa, z)) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("kappa", KAPPA_GRID)
def test_hyp_monotone_decreasing(kappa):
    z = np.linspace(0.0, 1.0, 401)
    vals = np.array([hyp2f1_special(HypParams(kappa, float(x))) for x in z])
    assert np.all(np.diff(vals) < 0)


@given(st.floats(0.01, 0.99), st.floats(0.0, 0.6))
def test_hyp_agrees_with_gauss_series(kappa, z):
    series = gauss_series(1.0, kappa - 1.0, (1.0 + kappa) / 2.0, z, max_terms=5000)
    assert abs(hyp2f1_special(HypParams(kappa, z)) - series) <= 1e-10


@given(st.floats(0.01, 0.99), st.floats(0.0, 0.999999))
def test_hyp_matches_mpmath(kappa, z):
    ref = float(mpmath.hyp2f1(1, kappa - 1, (1 + kappa) / 2, z))
    assert hyp2f1_special(HypParams(kappa, z)) == pytest.approx(ref, rel=1e-10, abs=1e-12)
