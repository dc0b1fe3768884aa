"""Merton structural calibration and the bank balance-sheet enlargement.

A bank with assets ``A0`` and debt ``D0`` that books an RE loan of face
``F0`` ends up with assets ``A0 + F0`` and debt ``D0 + F0``.  To first order
in ``F0 / A0`` the enlarged log-return is ``ln A1 + F1 / A1``; its variance
and correlations have closed forms in the two asset volatilities and the
bank/RE correlation structure.

Notation: the RE-loan face value is called ``F0`` here (``re_loan_weight``
is ``F0 / A0``) to keep it apart from recovery rates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ApproximationError, DomainError
from .numerics import cholesky4, norm_cdf, norm_inv


@dataclass(frozen=True)
class BalanceSheet:
    """Bank balance sheet before the RE loan is booked.

    Attributes:
        leverage: debt-to-assets ratio ``D0 / A0``.
        re_loan_weight: RE-loan face relative to assets, ``F0 / A0``.
        sigma_bank: annual asset volatility of the bank.
        sigma_re: annual asset volatility of the RE borrower.
    """

    leverage: float
    re_loan_weight: float
    sigma_bank: float
    sigma_re: float

    def __post_init__(self):
        if not 0.0 < self.leverage < 1.0:
            raise DomainError("leverage must lie in (0, 1)")
        if self.re_loan_weight < 0.0:
            raise DomainError("re_loan_weight must be >= 0")
        if self.sigma_bank <= 0.0 or self.sigma_re < 0.0:
            raise DomainError("volatilities must be positive")

    @property
    def enlarged_leverage(self) -> float:
        """``(D0 + F0) / (A0 + F0)``."""
        k = self.re_loan_weight
        return (self.leverage + k) / (1.0 + k)


@dataclass(frozen=True)
class CorrelationTriple:
    rho_B: float
    rho_R: float
    rho_RB: float

    def __post_init__(self):
        for name in ("rho_B", "rho_R", "rho_RB"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name}={v!r} must lie in [0, 1)")
        cholesky4(self.rho_B, self.rho_R, self.rho_RB)


@dataclass(frozen=True)
class EnlargedMoments:
    sigma_bar: float
    rho_bar: float
    rho_bar_bre: float


def merton_pd(sigma: float, leverage: float, horizon: float) -> float:
    """Default probability ``Phi(c)``, ``c = (ln(D0/A0) + sigma^2 T / 2) / (sigma sqrt T)``.

    The risk-free rate cancels between the debt accrual and the asset drift.
    """
    if sigma <= 0.0 or horizon <= 0.0:
        raise DomainError("sigma and horizon must be positive")
    if leverage <= 0.0:
        raise DomainError("leverage must be positive")
    st = sigma * math.sqrt(horizon)
    return float(norm_cdf((math.log(leverage) + 0.5 * st * st) / st))


def implied_asset_vol(pd: float, leverage: float, horizon: float) -> float:
    """Asset volatility at which :func:`merton_pd` returns ``pd``.

    With ``x = sigma sqrt(T)`` the threshold equation is the quadratic
    ``x^2 / 2 - c x + ln(leverage) = 0``; for ``leverage < 1`` it has one
    positive root.
    """
    if not 0.0 < pd < 1.0:
        raise DomainError(f"pd={pd!r} must lie in (0, 1)")
    if not 0.0 < leverage < 1.0:
        raise DomainError(f"leverage={leverage!r} must lie in (0, 1)")
    if horizon <= 0.0:
        raise DomainError("horizon must be positive")
    c = norm_inv(pd)
    disc = c * c - 2.0 * math.log(leverage)
    x = c + math.sqrt(disc)
    if c < 0.0:
        # same root, without cancellation between c and sqrt(disc)
        x = -2.0 * math.log(leverage) / (math.sqrt(disc) - c)
    return x / math.sqrt(horizon)


def enlarge_balance_sheet(bs: BalanceSheet, corr: CorrelationTriple) -> EnlargedMoments:
    """Volatility and correlations of the bank after booking the RE loan.

    Returns the enlarged annual volatility, the bank-bank correlation and
    the bank-to-(another)-RE-firm correlation of ``ln A1 + F1 / A1``.

    Raises:
        ApproximationError: if the first-order variance is not positive or
            a correlation leaves (-1, 1).
    """
    sb, sr, k = bs.sigma_bank, bs.sigma_re, bs.re_loan_weight
    rb, rr, rx = corr.rho_B, corr.rho_R, corr.rho_RB
    try:
        e_cross = math.exp(sb * sb - rx * sb * sr)
        var = (sb * sb
               + k * k * math.exp(2.0 * sb * (sb - rx * sr)) * math.expm1(sb * sb + sr * sr - 2.0 * rx * sb * sr)
               - 2.0 * sb * k * (sb - rx * sr) * e_cross)
        cov_banks = (rb * sb * sb
                     - 2.0 * sb * k * e_cross * (rb * sb - rx * sr)
                     + k * k * math.exp(2.0 * sb * sb - 2.0 * rx * sb * sr)
                     * math.expm1(rb * sb * sb + rr * sr * sr - 2.0 * rx * sb * sr))
    except OverflowError:
        raise ApproximationError("enlarged moments overflow; volatilities far outside the linear regime") from None
    if not var > 0.0:
        raise ApproximationError(f"enlarged variance {var:.3g} is not positive")
    sigma_bar = math.sqrt(var)
    rho_bar = cov_banks / var
    rho_bre = (rx * sb + k * e_cross * (rr * sr - rx * sb)) / sigma_bar
    for name, v in (("rho_bar", rho_bar), ("rho_bar_bre", rho_bre)):
        if not -1.0 < v < 1.0:
            raise ApproximationError(f"{name}={v:.6g} outside (-1, 1)")
    return EnlargedMoments(sigma_bar, rho_bar, rho_bre)


def enlarged_pd(bs: BalanceSheet, sigma_bar: float, horizon: float) -> float:
    """Bank default probability after the RE loan is booked."""
    return merton_pd(sigma_bar, bs.enlarged_leverage, horizon)


def gaussian_exp_moments(sigma_x: float, sigma_y: float) -> tuple[float, float]:
    """``E[X e^{sx X}]`` and ``E[X e^{sx X + sy Y}]`` for independent standard normals."""
    m1 = sigma_x * math.exp(0.5 * sigma_x * sigma_x)
    return m1, m1 * math.exp(0.5 * sigma_y * sigma_y)
