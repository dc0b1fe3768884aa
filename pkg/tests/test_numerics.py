import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lhpp.errors import BracketError, DomainError, NumericalError, ParameterError
from lhpp.numerics import (Interval, bivar_norm_cdf, cholesky4, correlation4, find_root,
                           gauss_legendre, integrate, log_binomial, log_binomial_row, norm_cdf,
                           norm_inv)

mpmath.mp.dps = 40


def mp_bvn(x, y, rho):
    """P(X <= x, Y <= y) as a one-dimensional mpmath integral over X."""
    x, y, rho = mpmath.mpf(x), mpmath.mpf(y), mpmath.mpf(rho)
    s = mpmath.sqrt(1 - rho * rho)

    def f(u):
        return mpmath.npdf(u) * mpmath.ncdf((y - rho * u) / s)

    pts = sorted({-mpmath.inf, x} | ({y / rho} if rho != 0 and -40 < y / rho < x else set()) | ({0} if x > 0 else set()))
    return float(mpmath.quad(f, pts))


def test_norm_inv_edges():
    assert norm_inv(0.0) == -math.inf
    assert norm_inv(1.0) == math.inf
    assert norm_inv(0.5) == 0.0
    with pytest.raises(DomainError):
        norm_inv(1.5)
    with pytest.raises(DomainError):
        norm_inv(-1e-9)


def test_norm_cdf_matches_mpmath():
    for x in (-37.0, -8.5, -3.0, -0.2, 0.0, 1.7, 6.0):
        assert norm_cdf(x) == pytest.approx(float(mpmath.ncdf(x)), rel=1e-14, abs=1e-300)


@given(st.floats(1e-300, 1 - 1e-16))
def test_norm_inv_round_trip(p):
    assert norm_cdf(norm_inv(p)) == pytest.approx(p, rel=1e-12)


@pytest.mark.parametrize("x,y,rho", [
    (0.0, 0.0, 0.0), (0.3, -1.2, 0.5), (-2.0, 1.0, -0.7), (1.5, 1.5, 0.95), (-0.4, 2.2, 0.999),
    (-3.0, -3.0, 0.3), (0.7, -0.2, -0.999), (-6.0, 2.0, 0.42),
])
def test_bivariate_matches_mpmath(x, y, rho):
    assert abs(bivar_norm_cdf(x, y, rho) - mp_bvn(x, y, rho)) <= 1e-14


def test_bivariate_known_values():
    # P(X<=0, Y<=0) = 1/4 + asin(rho) / (2 pi)
    for rho in (-0.9, -0.3, 0.0, 0.4, 0.8):
        assert bivar_norm_cdf(0.0, 0.0, rho) == pytest.approx(0.25 + math.asin(rho) / (2 * math.pi), abs=1e-15)


def test_bivariate_limits():
    assert bivar_norm_cdf(math.inf, 0.3, 0.5) == pytest.approx(norm_cdf(0.3), abs=1e-15)
    assert bivar_norm_cdf(-math.inf, 0.3, 0.5) == 0.0
    assert bivar_norm_cdf(0.2, 0.7, 1.0) == pytest.approx(norm_cdf(0.2))
    assert bivar_norm_cdf(0.2, 0.7, -1.0) == pytest.approx(norm_cdf(0.2) - norm_cdf(-0.7))
    assert bivar_norm_cdf(0.2, -0.7, -1.0) == 0.0
    with pytest.raises(DomainError):
        bivar_norm_cdf(0.0, 0.0, 1.01)


@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(-0.99, 0.99))
def test_bivariate_properties(x, y, rho):
    v = bivar_norm_cdf(x, y, rho)
    assert 0.0 <= v <= min(norm_cdf(x), norm_cdf(y)) + 1e-15
    assert v == pytest.approx(bivar_norm_cdf(y, x, rho), abs=1e-15)
    # Frechet lower bound and rho monotonicity
    assert v >= norm_cdf(x) + norm_cdf(y) - 1.0 - 1e-15
    assert bivar_norm_cdf(x, y, min(rho + 0.01, 1.0)) >= v - 1e-15


def test_gauss_legendre_polynomial_exactness():
    x, w = gauss_legendre(10)
    assert w.sum() == pytest.approx(2.0, abs=1e-14)
    assert float(np.dot(w, x ** 18)) == pytest.approx(2.0 / 19.0, abs=1e-14)
    with pytest.raises(ValueError):
        x[0] = 1.0


def test_integrate():
    assert integrate(np.exp, Interval(0.0, 1.0)) == pytest.approx(math.e - 1.0, abs=1e-14)
    assert integrate(np.sin, Interval(2.0, 2.0)) == 0.0
    with pytest.raises(DomainError):
        integrate(np.exp, Interval(-math.inf, 0.0))
    with pytest.raises(NumericalError):
        integrate(lambda u: np.full_like(u, np.nan), Interval(-1.0, 1.0), nodes=3)


def test_interval():
    assert Interval(-math.inf, 3.0).clamped() == Interval(-8.5, 3.0)
    assert Interval(9.0, math.inf).clamped() == Interval(8.5, 8.5)
    with pytest.raises(DomainError):
        Interval(1.0, 0.0)


def test_find_root():
    r = find_root(lambda x: x ** 3 - 2.0, Interval(0.0, 2.0))
    assert r == pytest.approx(2.0 ** (1 / 3), abs=1e-12)
    assert find_root(lambda x: x, Interval(0.0, 1.0)) == 0.0
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1.0, Interval(-1.0, 1.0))


def test_find_root_tight_on_residual():
    # shallow function: |f| small but x far from the root is not accepted
    f = lambda x: 1e-13 * (x - 0.3)  # noqa: E731
    x = find_root(f, Interval(0.0, 1.0), tol=1e-20)
    assert abs(x - 0.3) <= 1e-11


GRID = np.linspace(0.0, 0.9, 5)


@pytest.mark.parametrize("rb", GRID)
@pytest.mark.parametrize("rr", GRID)
def test_cholesky_reproduces_matrix(rb, rr):
    for x in GRID:
        try:
            c = cholesky4(rb, rr, x)
        except ParameterError:
            eig = np.linalg.eigvalsh(correlation4(rb, rr, x))
            assert eig.min() < 1e-12
            continue
        target = correlation4(rb, rr, x)
        assert np.max(np.abs(c @ c.T - target)) <= 1e-12
        if np.linalg.eigvalsh(target).min() > 1e-10:
            assert np.max(np.abs(c - np.linalg.cholesky(target))) <= 1e-12


def test_cholesky_entry_variant_with_plus_sign_is_wrong():
    # Writing the last diagonal entry with (1 + rho_R) in the rho_RB^2 term
    # does not reproduce the matrix; the (1 - rho_R) form does.
    b, r, x = 0.1758, 0.1170, 0.1434
    c = cholesky4(b, r, x)
    d3 = 1.0 + b - 2.0 * x * x
    alt = c.copy()
    alt[3, 3] = math.sqrt(((1.0 + b) * (1.0 - r * r) - 4.0 * x * x * (1.0 + r)) / d3)
    target = correlation4(b, r, x)
    assert np.max(np.abs(alt @ alt.T - target)) > 1e-3
    assert np.max(np.abs(c @ c.T - target)) <= 1e-15


def test_cholesky_rejects_indefinite():
    with pytest.raises(ParameterError):
        cholesky4(0.0, 0.0, 0.9)


def test_log_binomial():
    for n in (0, 1, 5, 60, 61, 200):
        row = log_binomial_row(n)
        assert len(row) == n + 1
        for k in (0, n // 3, n):
            assert row[k] == pytest.approx(float(mpmath.log(mpmath.binomial(n, k))), abs=1e-10)
    with pytest.raises(DomainError):
        log_binomial(3, 4)
