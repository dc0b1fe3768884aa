"""RE spread sensitivities of tranches and loans.

A one basis point widening of the RE loan spread moves the RE hazard to
``lambda + bump / (1 - R)``.  It hits a tranche twice: directly through the
RE loans in the pool, and indirectly because the banks hold RE loans on
their own balance sheets.  The indirect channel runs
hazard -> RE default probability -> RE asset volatility -> enlarged bank
balance sheet -> bank default probability -> bank hazard.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .config import ScenarioConfig
from .errors import DomainError
from .instruments import MarketParams, Tranche, loan_par_spread, loan_price, tranche_par_spread, tranche_price
from .loss_model import PoolParams, default_prob, hazard_from_pd
from .merton import (BalanceSheet, CorrelationTriple, EnlargedMoments, enlarge_balance_sheet,
                     enlarged_pd, implied_asset_vol)

BUMP = 1e-4


def perturbed_hazard(lam: float, recovery: float, bump: float = BUMP) -> float:
    """Hazard after widening the credit-triangle spread by ``bump``."""
    if recovery >= 1.0:
        raise DomainError("recovery = 1 leaves the hazard undefined under a spread bump")
    return lam + bump / (1.0 - recovery)


def loan_pv01(lam: float, recovery: float, market: MarketParams, bump: float = BUMP) -> float:
    """Value change of a par loan when its spread widens by ``bump``."""
    s = loan_par_spread(lam, recovery)
    return loan_price(s, perturbed_hazard(lam, recovery, bump), recovery, market) - 1.0


@dataclass(frozen=True)
class BankState:
    """Bank-side quantities calibrated for a given RE hazard.

    Attributes:
        sigma_bank: bank asset volatility backed out of the bank PD.
        sigma_re: RE asset volatility backed out of the RE PD.
        moments: enlarged volatility and correlations (None without banks
            at risk, in which case no enlargement is applied).
        pd: enlarged bank default probability over the horizon.
        hazard: constant hazard matching ``pd``.
    """

    sigma_bank: float
    sigma_re: float
    moments: EnlargedMoments | None
    pd: float
    hazard: float


def bank_state(config: ScenarioConfig, re_hazard: float | None = None) -> BankState:
    """Enlarged bank default probability and correlations for an RE hazard.

    Args:
        config: scenario.
        re_hazard: RE hazard; defaults to the one implied by ``pool.re_pd_T``.
    """
    T = config.market.maturity
    pool = config.pool
    if re_hazard is None:
        re_pd = pool.re_pd_T
    else:
        re_pd = float(default_prob(re_hazard, T))
    if pool.bank_pd_T == 0.0:
        return BankState(0.0, 0.0, None, 0.0, 0.0)
    sigma_b = implied_asset_vol(pool.bank_pd_T, config.bank.leverage, T)
    sigma_r = 0.0 if re_pd == 0.0 else implied_asset_vol(re_pd, config.re_firm.leverage, T)
    bs = BalanceSheet(config.bank.leverage, config.bank.re_loan_weight, sigma_b, sigma_r)
    corr = CorrelationTriple(pool.rho_bank, pool.rho_re, pool.cross)
    moments = enlarge_balance_sheet(bs, corr)
    pd = enlarged_pd(bs, moments.sigma_bar, T)
    return BankState(sigma_b, sigma_r, moments, pd, hazard_from_pd(pd, T))


def scenario_pool(config: ScenarioConfig, re_hazard: float | None = None, *,
                  n_re: int | None = None, w_re: float | None = None) -> PoolParams:
    """Pool parameters with the bank leg built from the enlarged balance sheet."""
    pool = config.pool
    T = config.market.maturity
    lam_re = hazard_from_pd(pool.re_pd_T, T) if re_hazard is None else re_hazard
    state = bank_state(config, re_hazard)
    rho_bank = pool.rho_bank if state.moments is None else state.moments.rho_bar
    if not 0.0 <= rho_bank < 1.0:
        raise DomainError(f"enlarged bank correlation {rho_bank:.6g} outside [0, 1)")
    return PoolParams(
        lambda_bank=state.hazard,
        lambda_re=lam_re,
        recovery_bank=pool.recovery_bank,
        recovery_re=pool.recovery_re,
        rho_bank=rho_bank,
        rho_re=pool.rho_re,
        n_re=pool.n_re if n_re is None else n_re,
        w_re=pool.w_re if w_re is None else w_re,
    )


@dataclass(frozen=True)
class SensitivityReport:
    """Tranche values before and after the RE spread bump.

    ``pv01 = bumped_value - base_value`` and ``delta = pv01 / loan_pv01``.
    """

    base_value: float
    bumped_value: float
    pv01: float
    delta: float
    loan_pv01: float
    coupon_spread: float


def tranche_delta_re(pv01: float, loan_pv01_value: float) -> float:
    """Tranche RE sensitivity relative to that of a single RE loan."""
    if loan_pv01_value == 0.0:
        raise ZeroDivisionError("loan PV01 is zero")
    return pv01 / loan_pv01_value


def tranche_pv01_re(config: ScenarioConfig, tranche: Tranche, coupon_spread: float | None = None,
                    bump: float = BUMP, *, n_re: int | None = None, w_re: float | None = None,
                    indirect: bool = True) -> SensitivityReport:
    """PV01 of a tranche to a one basis point widening of the RE spread.

    Both states go through the full balance-sheet enlargement.  The coupon
    is held fixed (at the base-state par spread unless given).

    Args:
        config: scenario.
        tranche: tranche to value.
        coupon_spread: tranche spread; defaults to the base par spread.
        bump: spread widening.
        n_re, w_re: override the number and total weight of direct RE loans.
        indirect: also re-calibrate the bank leg in the bumped state.
    """
    market = config.market
    base = scenario_pool(config, n_re=n_re, w_re=w_re)
    lam_b = perturbed_hazard(base.lambda_re, base.recovery_re, bump)
    if indirect:
        bumped = scenario_pool(config, lam_b, n_re=n_re, w_re=w_re)
    else:
        bumped = base.with_(lambda_re=lam_b)
    s = tranche_par_spread(tranche, base, market) if coupon_spread is None else coupon_spread
    v0 = tranche_price(tranche, s, base, market)
    v1 = v0 if bump == 0.0 else tranche_price(tranche, s, bumped, market)
    loan = loan_pv01(base.lambda_re, base.recovery_re, market, bump)
    pv01 = v1 - v0
    delta = tranche_delta_re(pv01, loan) if loan != 0.0 else math.nan
    return SensitivityReport(v0, v1, pv01, delta, loan, s)
