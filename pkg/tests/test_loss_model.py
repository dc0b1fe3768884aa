import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy import stats

from conftest import T, table_pool
from lhpp.errors import DomainError
from lhpp.loss_model import (attachment_threshold, default_prob, expected_capped_loss,
                             expected_capped_loss_curve, expected_capped_loss_lhplus, expected_loss,
                             hazard_from_pd, lhp_loss_cdf, loss_exceed_prob, loss_exceed_prob_lhplus)
from lhpp.mc_oracle import McSettings, mc_pool_loss


def vasicek_tail(x, p, rho, lgd):
    """P(L > x) for the infinitely granular pool, written out directly."""
    if x >= lgd:
        return 0.0
    if x <= 0.0:
        return 1.0
    z = (stats.norm.ppf(x / lgd) * math.sqrt(1 - rho) - stats.norm.ppf(p)) / math.sqrt(rho)
    return float(stats.norm.sf(z))


def test_params_validation():
    with pytest.raises(DomainError):
        table_pool(rho_bank=1.0)
    with pytest.raises(DomainError):
        table_pool(n_re=0)
    with pytest.raises(DomainError):
        table_pool(lambda_re=-0.1)
    with pytest.raises(DomainError):
        table_pool(n_re=2.5)
    p = table_pool(n_re=4, w_re=0.2)
    assert p.loan_notional == pytest.approx(0.05)
    assert p.max_loss == pytest.approx(0.8 * 0.75 + 0.2 * 0.75)


def test_hazard_round_trip():
    lam = hazard_from_pd(0.2421, 10.0)
    assert float(default_prob(lam, 10.0)) == pytest.approx(0.2421, rel=1e-14)
    assert hazard_from_pd(0.0, 5.0) == 0.0
    with pytest.raises(DomainError):
        hazard_from_pd(1.0, 5.0)


def test_threshold_clamping():
    p = table_pool(n_re=3, w_re=0.3)
    # three defaults alone exceed alpha: every factor level gives a loss above alpha
    assert attachment_threshold(0.2, 3, T, p) == math.inf
    # alpha above the largest possible loss with k defaults: never exceeded
    assert attachment_threshold(0.99, 1, T, p) == -math.inf
    a = attachment_threshold(0.3, 1, T, p)
    assert math.isfinite(a)


def test_threshold_matches_pathwise_event():
    p = table_pool(n_re=2, w_re=0.2)
    from lhpp.loss_model import conditional_lhp_pd
    for k in (0, 1, 2):
        a = attachment_threshold(0.3, k, T, p)
        if not math.isfinite(a):
            continue
        loss = lambda v: k * p.loan_lgd + p.bank_lgd * conditional_lhp_pd(v, T, p)  # noqa: E731
        assert loss(a) == pytest.approx(0.3, abs=1e-12)
        assert loss(a - 0.01) > 0.3 > loss(a + 0.01)


@pytest.mark.parametrize("alpha", [0.05, 0.2, 0.4, 0.7])
def test_pure_lhp_matches_vasicek(alpha):
    p = table_pool(n_re=0, w_re=0.0)
    pd = float(default_prob(p.lambda_bank, T))
    lgd = 1 - p.recovery_bank
    assert loss_exceed_prob(alpha, T, p) == pytest.approx(vasicek_tail(alpha, pd, p.rho_bank, lgd), abs=1e-12)
    assert 1.0 - lhp_loss_cdf(alpha, T, p) == pytest.approx(vasicek_tail(alpha, pd, p.rho_bank, lgd), abs=1e-12)
    ecl, _ = sp_integrate.quad(lambda x: vasicek_tail(x, pd, p.rho_bank, lgd), 0.0, alpha,
                               epsabs=1e-13, epsrel=1e-13, limit=200)
    assert expected_capped_loss(alpha, T, p) == pytest.approx(ecl, abs=1e-10)


@pytest.mark.parametrize("n", [1, 4, 9])
@pytest.mark.parametrize("alpha", [0.02, 0.12, 0.3])
def test_zero_correlation_is_binomial(n, alpha):
    p = table_pool(n_re=n, w_re=0.3, rho_bank=0.0, rho_re=0.0)
    p0 = float(default_prob(p.lambda_re, T))
    pt = float(default_prob(p.lambda_bank, T))
    k = np.arange(n + 1)
    pmf = stats.binom.pmf(k, n, p0)
    loss = k * p.loan_lgd + p.bank_lgd * pt
    assert loss_exceed_prob(alpha, T, p) == pytest.approx(float(pmf[loss > alpha].sum()), abs=1e-13)
    assert expected_capped_loss(alpha, T, p) == pytest.approx(float(np.dot(pmf, np.minimum(loss, alpha))), abs=1e-13)


@pytest.mark.parametrize("n", [1, 3, 9, 40, 150])
def test_capped_at_max_equals_expected_loss(n):
    p = table_pool(n_re=n, w_re=0.2)
    assert expected_capped_loss(1.0 - 1e-12, T, p) == pytest.approx(expected_loss(T, p), abs=1e-13)
    assert loss_exceed_prob(1.0 - 1e-12, T, p) == 0.0


@pytest.mark.parametrize("n", [2, 9])
def test_capped_loss_integrates_tail(n):
    p = table_pool(n_re=n)
    # E[min(L, a)] = int_0^a P(L > x) dx; the tail jumps at RE-default loss levels
    brk = [k * p.loan_lgd for k in range(1, n + 1) if k * p.loan_lgd < 0.35]
    val, _ = sp_integrate.quad(lambda x: loss_exceed_prob(x, T, p) if x > 0 else 1.0, 0.0, 0.35,
                               points=brk or None, limit=400, epsabs=1e-12)
    assert expected_capped_loss(0.35, T, p) == pytest.approx(val, abs=1e-9)


def test_lhplus_equivalence_grid():
    p = table_pool(n_re=1, w_re=0.1061)
    worst = 0.0
    for a in np.linspace(0.05, 0.95, 10):
        for t in np.linspace(1.0, 10.0, 10):
            worst = max(worst,
                        abs(loss_exceed_prob(a, t, p) - loss_exceed_prob_lhplus(a, t, p)),
                        abs(expected_capped_loss(a, t, p) - expected_capped_loss_lhplus(a, t, p)))
    assert worst <= 1e-8


def test_lhplus_requires_one_loan():
    with pytest.raises(DomainError):
        loss_exceed_prob_lhplus(0.3, T, table_pool(n_re=2))


@given(st.integers(0, 12), st.floats(0.0, 1.0), st.floats(0.0, 0.9), st.floats(0.0, 0.9))
def test_monotone_in_alpha(n, w, rb, rr):
    if n == 0:
        w = 0.0
    p = table_pool(n_re=n, w_re=w, rho_bank=rb, rho_re=rr)
    alphas = np.linspace(0.01, 0.99, 15)
    pe = [loss_exceed_prob(a, T, p) for a in alphas]
    ecl = [expected_capped_loss(a, T, p) for a in alphas]
    assert all(x >= y - 1e-12 for x, y in zip(pe, pe[1:]))
    assert all(x <= y + 1e-12 for x, y in zip(ecl, ecl[1:]))
    assert all(0.0 <= e <= a + 1e-15 for e, a in zip(ecl, alphas))
    assert ecl[-1] <= expected_loss(T, p) + 1e-12
    # concavity of alpha -> E[min(L, alpha)]
    d = np.diff(ecl)
    assert np.all(np.diff(d) <= 1e-10)


def test_curve_matches_pointwise():
    p = table_pool()
    times = np.array([0.0, 0.5, 3.0, 10.0])
    curve = expected_capped_loss_curve(0.3, times, p)
    assert curve[0] == 0.0
    for t, v in zip(times[1:], curve[1:]):
        assert v == pytest.approx(expected_capped_loss(0.3, t, p), abs=1e-15)


def test_riskless_pool():
    p = table_pool(lambda_bank=0.0, lambda_re=0.0)
    assert loss_exceed_prob(0.01, T, p) == 0.0
    assert expected_capped_loss(0.3, T, p) == 0.0


def test_matches_monte_carlo():
    p = table_pool()
    est = mc_pool_loss([0.3], T, p, McSettings(paths=400_000, seed=7, chunk=100_000))
    assert est.exceed[0].brackets(loss_exceed_prob(0.3, T, p))
    assert est.capped[0].brackets(expected_capped_loss(0.3, T, p))


def test_alpha_domain():
    with pytest.raises(DomainError):
        loss_exceed_prob(-0.1, T, table_pool())
    with pytest.raises(DomainError):
        expected_capped_loss(1.5, T, table_pool())


def test_alpha_zero():
    p = table_pool()
    assert expected_capped_loss(0.0, T, p) == 0.0
    assert loss_exceed_prob(0.0, T, p) == pytest.approx(1.0, abs=1e-12)
