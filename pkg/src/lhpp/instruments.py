"""Loan and CDO tranche valuation with continuous coupons.

A tranche pays ``r + s`` continuously on its remaining expected notional
and redeems the surviving notional at maturity; loans additionally pay the
recovery at default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .loss_model import PoolParams, expected_capped_loss_curve
from .numerics import DEFAULT_NODES, gauss_legendre

TIME_NODES = 64


@dataclass(frozen=True)
class Tranche:
    attach: float
    detach: float

    def __post_init__(self):
        if not 0.0 <= self.attach < self.detach <= 1.0:
            raise DomainError(f"need 0 <= attach < detach <= 1, got ({self.attach}, {self.detach})")

    @property
    def width(self) -> float:
        return self.detach - self.attach


@dataclass(frozen=True)
class MarketParams:
    rate: float = 0.0
    maturity: float = 10.0

    def __post_init__(self):
        if not self.maturity > 0.0:
            raise DomainError("maturity must be positive")


@dataclass(frozen=True)
class SurvivalCurve:
    """Expected surviving notional ``values[i]`` at ``times[i]``."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.shape != values.shape or times.ndim != 1 or times.size < 2:
            raise DomainError("survival curve needs matching 1-D grids of length >= 2")
        if np.any(np.diff(times) < 0.0):
            raise DomainError("survival curve times must be ordered")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)


def _annuity_factor(x: float, maturity: float) -> float:
    """``(1 - exp(-x T)) / x`` with the exact limit ``T`` at ``x = 0``."""
    if abs(x) < 1e-12:
        return maturity * (1.0 - 0.5 * x * maturity)
    return -math.expm1(-x * maturity) / x


def loan_price(coupon_spread: float, lam: float, recovery: float, market: MarketParams) -> float:
    """Price of a loan paying ``r + s`` continuously under a constant hazard ``lam``."""
    if not 0.0 <= recovery <= 1.0:
        raise DomainError(f"recovery={recovery!r} must lie in [0, 1]")
    r, T = market.rate, market.maturity
    x = r + lam
    if x < 0.0:
        raise DomainError("need rate + hazard >= 0")
    ann = _annuity_factor(x, T)
    return (r + coupon_spread) * ann + math.exp(-x * T) + recovery * lam * ann


def loan_par_spread(lam: float, recovery: float) -> float:
    """Credit-triangle spread ``lam (1 - R)``."""
    if not 0.0 <= recovery < 1.0:
        raise DomainError(f"recovery={recovery!r} must lie in [0, 1)")
    return lam * (1.0 - recovery)


def loan_price_curve(coupon_spread: float, survival: SurvivalCurve, recovery: float,
                     market: MarketParams) -> float:
    """Loan price from an arbitrary survival curve (trapezoid / Stieltjes sums on its grid)."""
    r, T = market.rate, market.maturity
    times, q = survival.times, survival.values
    if times[0] > 0.0 or times[-1] < T - 1e-12:
        raise DomainError(f"survival curve must span [0, {T}]")
    keep = times < T
    times = np.append(times[keep], T)
    q = np.append(q[keep], survival(T))
    disc = np.exp(-r * times)
    premium = float(np.trapezoid(disc * q, times))
    mid_disc = np.exp(-r * 0.5 * (times[1:] + times[:-1]))
    recovered = float(np.dot(mid_disc, q[:-1] - q[1:]))
    return (r + coupon_spread) * premium + math.exp(-r * T) * q[-1] + recovery * recovered


def tranche_survival_curve(times, tranche: Tranche, params: PoolParams,
                           nodes: int = DEFAULT_NODES) -> np.ndarray:
    """Expected surviving tranche notional at every ``t`` in ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0.0):
        raise DomainError("times must be non-negative")
    upper = expected_capped_loss_curve(tranche.detach, times, params, nodes)
    lower = expected_capped_loss_curve(tranche.attach, times, params, nodes)
    q = 1.0 - (upper - lower) / tranche.width
    return np.clip(q, 0.0, 1.0)


def tranche_survival(t: float, tranche: Tranche, params: PoolParams,
                     nodes: int = DEFAULT_NODES) -> float:
    return float(tranche_survival_curve(t, tranche, params, nodes)[0])


def _tranche_legs(tranche: Tranche, params: PoolParams, market: MarketParams,
                  time_nodes: int, nodes: int) -> tuple[float, float]:
    """Risky annuity ``int_0^T e^{-ru} q(u) du`` and discounted terminal notional."""
    T, r = market.maturity, market.rate
    x, w = gauss_legendre(time_nodes)
    u = 0.5 * T * (x + 1.0)
    grid = np.append(u, T)
    q = tranche_survival_curve(grid, tranche, params, nodes)
    annuity = 0.5 * T * float(np.dot(w, np.exp(-r * u) * q[:-1]))
    return annuity, math.exp(-r * T) * q[-1]


def tranche_price(tranche: Tranche, coupon_spread: float, params: PoolParams,
                  market: MarketParams, time_nodes: int = TIME_NODES,
                  nodes: int = DEFAULT_NODES) -> float:
    """Percentage value of a tranche paying ``r + s`` on its remaining notional."""
    annuity, terminal = _tranche_legs(tranche, params, market, time_nodes, nodes)
    return (market.rate + coupon_spread) * annuity + terminal


def tranche_par_spread(tranche: Tranche, params: PoolParams, market: MarketParams,
                       time_nodes: int = TIME_NODES, nodes: int = DEFAULT_NODES) -> float:
    """Spread at which the tranche is worth par.

    Raises:
        NumericalError: if the risky annuity vanishes.
    """
    annuity, terminal = _tranche_legs(tranche, params, market, time_nodes, nodes)
    if annuity <= 1e-300:
        raise NumericalError("tranche has zero risky annuity")
    return (1.0 - terminal) / annuity - market.rate
