import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from conftest import T, table_pool
from lhpp.errors import DomainError
from lhpp.instruments import (MarketParams, SurvivalCurve, Tranche, loan_par_spread, loan_price,
                              loan_price_curve, tranche_par_spread, tranche_price, tranche_survival,
                              tranche_survival_curve)
from lhpp.mc_oracle import McSettings, mc_tranche_survival


def quad_loan_price(s, lam, R, r, T):
    """Discounted coupon, recovery and redemption cash flows by adaptive quadrature."""
    f = lambda u: math.exp(-(r + lam) * u) * ((r + s) + R * lam)  # noqa: E731
    v, _ = sp_integrate.quad(f, 0.0, T, epsabs=1e-14, epsrel=1e-14)
    return v + math.exp(-(r + lam) * T)


def test_tranche_validation():
    with pytest.raises(DomainError):
        Tranche(0.5, 0.5)
    with pytest.raises(DomainError):
        Tranche(-0.1, 0.5)
    assert Tranche(0.1, 0.4).width == pytest.approx(0.3)
    with pytest.raises(DomainError):
        MarketParams(maturity=0.0)


@given(st.floats(0.0, 0.5), st.floats(0.0, 0.95), st.floats(0.0, 0.1), st.floats(0.5, 30.0))
def test_loan_at_par(lam, R, r, T_):
    m = MarketParams(rate=r, maturity=T_)
    assert loan_price(loan_par_spread(lam, R), lam, R, m) == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("s,lam,R,r", [(0.01, 0.03, 0.4, 0.02), (0.0, 0.1, 0.0, 0.05), (0.05, 0.0, 0.3, 0.0)])
def test_loan_price_matches_quadrature(s, lam, R, r):
    assert loan_price(s, lam, R, MarketParams(r, 7.0)) == pytest.approx(quad_loan_price(s, lam, R, r, 7.0), abs=1e-13)


def test_loan_price_from_curve():
    lam, R, m = 0.0277, 0.25, MarketParams(0.01, 10.0)
    times = np.linspace(0.0, 12.0, 4801)
    curve = SurvivalCurve(times, np.exp(-lam * times))
    v = loan_price_curve(0.0208, curve, R, m)
    assert v == pytest.approx(loan_price(0.0208, lam, R, m), abs=1e-6)
    with pytest.raises(DomainError):
        loan_price_curve(0.02, SurvivalCurve([0.0, 5.0], [1.0, 0.9]), R, m)


def test_survival_curve_validation():
    with pytest.raises(DomainError):
        SurvivalCurve([0.0, 2.0, 1.0], [1.0, 0.9, 0.8])
    assert SurvivalCurve([0.0, 2.0], [1.0, 0.8])(1.0) == pytest.approx(0.9)


def test_tranche_par_round_trip(pool, market):
    for tr in (Tranche(0.0, 0.03), Tranche(0.1, 0.3), Tranche(0.3, 1.0)):
        s = tranche_par_spread(tr, pool, market)
        assert s > 0.0
        assert tranche_price(tr, s, pool, market) == pytest.approx(1.0, abs=1e-13)
    m = MarketParams(0.03, 10.0)
    tr = Tranche(0.3, 1.0)
    assert tranche_price(tr, tranche_par_spread(tr, pool, m), pool, m) == pytest.approx(1.0, abs=1e-13)


def test_tranche_price_matches_adaptive_quadrature(pool):
    m = MarketParams(0.02, 10.0)
    tr = Tranche(0.05, 0.2)
    f = lambda u: math.exp(-0.02 * u) * tranche_survival(u, tr, pool)  # noqa: E731
    ann, _ = sp_integrate.quad(f, 0.0, 10.0, epsabs=1e-12, epsrel=1e-12)
    expected = (0.02 + 0.01) * ann + math.exp(-0.2) * tranche_survival(10.0, tr, pool)
    assert tranche_price(tr, 0.01, pool, m) == pytest.approx(expected, abs=1e-10)


def test_riskless_tranche_has_zero_spread():
    p = table_pool(lambda_bank=0.0, lambda_re=0.0)
    for r in (0.0, 0.04):
        assert tranche_par_spread(Tranche(0.3, 1.0), p, MarketParams(r, 10.0)) == pytest.approx(0.0, abs=1e-15)


def test_survival_curve_shape(pool):
    times = np.linspace(0.0, 10.0, 41)
    for tr in (Tranche(0.0, 0.05), Tranche(0.3, 1.0)):
        q = tranche_survival_curve(times, tr, pool)
        assert q[0] == 1.0
        assert np.all((q >= 0.0) & (q <= 1.0))
        assert np.all(np.diff(q) <= 1e-14)


def test_seniority_ordering(pool, market):
    spreads = [tranche_par_spread(Tranche(a, d), pool, market)
               for a, d in ((0.0, 0.1), (0.1, 0.2), (0.2, 0.3), (0.3, 1.0))]
    assert all(x > y for x, y in zip(spreads, spreads[1:]))
    assert spreads[-1] < loan_par_spread(pool.lambda_bank, pool.recovery_bank)


def test_price_partials(pool, market):
    tr = Tranche(0.3, 1.0)
    s = tranche_par_spread(tr, pool, market)
    h = 1e-4
    assert tranche_price(tr, s + h, pool, market) > tranche_price(tr, s - h, pool, market)
    h = 1e-3
    assert tranche_price(Tranche(0.3 + h, 1.0), s, pool, market) > tranche_price(Tranche(0.3 - h, 1.0), s, pool, market)


def test_senior_survival_matches_monte_carlo(pool):
    est = mc_tranche_survival(T, 0.3179, 1.0, pool, McSettings(paths=400_000, seed=11))
    assert est.brackets(tranche_survival(T, Tranche(0.3179, 1.0), pool))
