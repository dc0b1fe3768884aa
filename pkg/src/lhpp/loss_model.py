"""Loss distribution of the LH++ pool.

The pool mixes an infinitely granular homogeneous portfolio of bank loans
(notional ``N = 1 - w``) with ``n`` identical large renewable-energy loans
(notional ``w / n`` each).  All obligors load on one systematic factor
``V``; conditional on ``V`` the bank leg loses a deterministic fraction and
the RE loans default independently, so every probability below reduces to
a binomial sum of one-dimensional factor integrals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

from .errors import DomainError
from .numerics import (
    DEFAULT_NODES,
    TAIL_CUTOFF,
    bivar_norm_cdf,
    gauss_legendre,
    log_binomial_row,
    norm_cdf,
    norm_inv,
    norm_pdf,
)

# Below this the bank correlation is treated as exactly zero in the
# threshold formula (removable singularity of the 1/sqrt(rho) factor).
RHO_FLOOR = 1e-10


@dataclass(frozen=True)
class PoolParams:
    """Copula and pool parameters of the LH++ model.

    Attributes:
        lambda_bank: hazard rate of the granular bank obligors (per year).
        lambda_re: hazard rate of each direct RE loan (per year).
        recovery_bank: recovery rate of bank loans.
        recovery_re: recovery rate of RE loans.
        rho_bank: asset correlation among bank obligors.
        rho_re: asset correlation among RE loans.
        n_re: number of direct RE loans.
        w_re: total notional of the direct RE loans; each has ``w_re / n_re``.
    """

    lambda_bank: float
    lambda_re: float
    recovery_bank: float
    recovery_re: float
    rho_bank: float
    rho_re: float
    n_re: int
    w_re: float

    def __post_init__(self):
        for name in ("lambda_bank", "lambda_re"):
            if not getattr(self, name) >= 0.0:
                raise DomainError(f"{name} must be >= 0")
        for name in ("recovery_bank", "recovery_re", "rho_bank", "rho_re"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name}={v!r} must lie in [0, 1)")
        if int(self.n_re) != self.n_re or self.n_re < 0:
            raise DomainError("n_re must be a non-negative integer")
        if not 0.0 <= self.w_re <= 1.0:
            raise DomainError("w_re must lie in [0, 1]")
        if self.n_re == 0 and self.w_re > 0.0:
            raise DomainError("w_re > 0 requires at least one RE loan")

    @property
    def bank_notional(self) -> float:
        return 1.0 - self.w_re

    @property
    def loan_notional(self) -> float:
        return self.w_re / self.n_re if self.n_re else 0.0

    @property
    def bank_lgd(self) -> float:
        """Loss of the whole bank leg if every obligor defaults, ``N (1 - R)``."""
        return self.bank_notional * (1.0 - self.recovery_bank)

    @property
    def loan_lgd(self) -> float:
        """Loss from one RE default, ``N0 (1 - R0)``."""
        return self.loan_notional * (1.0 - self.recovery_re)

    @property
    def max_loss(self) -> float:
        return self.bank_lgd + self.n_re * self.loan_lgd

    def with_(self, **changes) -> "PoolParams":
        return replace(self, **changes)


def default_prob(lam, t):
    """Cumulative default probability ``1 - exp(-lam t)`` under a constant hazard."""
    return -np.expm1(-np.multiply(lam, t))


def hazard_from_pd(pd: float, t: float) -> float:
    """Constant hazard that reproduces default probability ``pd`` at horizon ``t``."""
    if not 0.0 <= pd < 1.0:
        raise DomainError(f"pd={pd!r} must lie in [0, 1)")
    if t <= 0.0:
        raise DomainError("horizon must be positive")
    return -math.log1p(-pd) / t


def conditional_lhp_pd(v, t: float, params: PoolParams):
    """Default probability of a bank obligor given the factor value ``v``."""
    c = norm_inv(default_prob(params.lambda_bank, t))
    rho = params.rho_bank
    return norm_cdf((c - math.sqrt(rho) * np.asarray(v, dtype=float)) / math.sqrt(1.0 - rho))


def lhp_loss_cdf(x: float, t: float, params: PoolParams) -> float:
    """P(L_t <= x) for a pool that is purely the granular bank portfolio."""
    if params.w_re != 0.0:
        raise DomainError("lhp_loss_cdf requires w_re = 0")
    lgd = 1.0 - params.recovery_bank
    if x < 0.0:
        return 0.0
    if x >= lgd:
        return 1.0
    p = float(default_prob(params.lambda_bank, t))
    if p == 0.0:
        return 1.0
    c = norm_inv(p)
    rho = params.rho_bank
    if rho < RHO_FLOOR:
        return 1.0 if x >= lgd * p else 0.0
    return float(norm_cdf((norm_inv(x / lgd) * math.sqrt(1.0 - rho) - c) / math.sqrt(rho)))


def _threshold(alpha: float, k, c_t, params: PoolParams):
    """Vectorised A_t(alpha, k) over broadcastable ``k`` and ``c_t``."""
    k = np.asarray(k, dtype=float)
    c_t = np.asarray(c_t, dtype=float)
    num = alpha - k * params.loan_lgd
    n_lgd = params.bank_lgd
    with np.errstate(divide="ignore", invalid="ignore"):
        if n_lgd > 0.0:
            frac = np.clip(num / n_lgd, 0.0, 1.0)
        else:
            frac = np.where(num > 0.0, 1.0, 0.0)
        q = special.ndtri(frac)
        rho = params.rho_bank
        if rho < RHO_FLOOR:
            # sign of (c_t - q) decides whether the bank leg alone breaches
            a = np.where(c_t > q, np.inf, -np.inf)
        else:
            a = (c_t - q * math.sqrt(1.0 - rho)) / math.sqrt(rho)
    a = np.where(frac <= 0.0, np.inf, a)
    a = np.where(frac >= 1.0, -np.inf, a)
    # p_t in {0, 1}: c_t = -inf / +inf -> step in alpha
    a = np.where(np.isneginf(c_t) & (frac > 0.0), -np.inf, a)
    a = np.where(np.isposinf(c_t) & (frac < 1.0), np.inf, a)
    return a


def attachment_threshold(alpha: float, k: int, t: float, params: PoolParams) -> float:
    """Largest factor value at which ``k`` RE defaults still push the loss above ``alpha``.

    Returns ``+inf`` when ``k`` defaults alone exceed ``alpha`` and ``-inf``
    when even total loss of the bank leg cannot reach it.
    """
    if not 0 <= k <= params.n_re:
        raise DomainError(f"k={k} outside [0, {params.n_re}]")
    c_t = norm_inv(default_prob(params.lambda_bank, t))
    return float(_threshold(alpha, k, c_t, params))


def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha={alpha!r} must lie in [0, 1]")


def _factor_integrals(alpha: float, t, params: PoolParams, nodes: int):
    """Binomial-weighted factor integrals below and above A_t(alpha, k).

    Returns arrays of shape ``(len(t), n + 1)``:
    ``below[k]`` = C(n,k) E[1{V <= A} g^k (1-g)^(n-k)],
    ``above[k]`` = the same over ``V >= A``, and
    ``above_lhp[k]`` = the ``V >= A`` integral weighted additionally by the
    conditional bank default probability.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = params.n_re
    k = np.arange(n + 1, dtype=float)
    logc = log_binomial_row(n)
    p_t = default_prob(params.lambda_bank, t)
    p_0 = default_prob(params.lambda_re, t)
    c_t = special.ndtri(p_t)
    c_0 = special.ndtri(p_0)
    a = _threshold(alpha, k[None, :], c_t[:, None], params)  # (m, K)

    x, w = gauss_legendre(nodes)
    cut = TAIL_CUTOFF
    split = np.clip(a, -cut, cut)

    sr0 = math.sqrt(params.rho_re)
    sq0 = math.sqrt(1.0 - params.rho_re)
    srb = math.sqrt(params.rho_bank)
    sqb = math.sqrt(1.0 - params.rho_bank)

    def region(lo, hi):
        half = 0.5 * (hi - lo)
        v = half[..., None] * x + (0.5 * (hi + lo))[..., None]  # (m, K, nodes)
        z = (c_0[:, None, None] - sr0 * v) / sq0
        log_g = special.log_ndtr(z)
        log_1mg = special.log_ndtr(-z)
        kk = k[None, :, None]
        with np.errstate(invalid="ignore"):
            lw = logc[None, :, None] + np.where(kk > 0, kk * log_g, 0.0) \
                + np.where(n - kk > 0, (n - kk) * log_1mg, 0.0)
        dens = np.exp(lw) * norm_pdf(v)
        base = half * np.einsum("mkj,j->mk", dens, w)
        h = special.ndtr((c_t[:, None, None] - srb * v) / sqb)
        weighted = half * np.einsum("mkj,j->mk", dens * h, w)
        return base, weighted

    below, _ = region(np.full_like(split, -cut), split)
    above, above_lhp = region(split, np.full_like(split, cut))
    return below, above, above_lhp


def _sum_k(terms: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(row) for row in terms])


def loss_exceed_prob(alpha: float, t: float, params: PoolParams,
                     nodes: int = DEFAULT_NODES) -> float:
    """P(L_t > alpha), evaluated as a binomial sum of factor integrals."""
    _check_alpha(alpha)
    below, _, _ = _factor_integrals(alpha, t, params, nodes)
    return float(min(1.0, max(0.0, _sum_k(below)[0])))


def expected_capped_loss_curve(alpha: float, times, params: PoolParams,
                               nodes: int = DEFAULT_NODES) -> np.ndarray:
    """E[L_t ^ alpha] for every ``t`` in ``times`` (one vectorised pass)."""
    _check_alpha(alpha)
    below, above, above_lhp = _factor_integrals(alpha, times, params, nodes)
    k = np.arange(params.n_re + 1, dtype=float)
    terms = (alpha * below
             + params.loan_lgd * k[None, :] * above
             + params.bank_lgd * above_lhp)
    return np.minimum(_sum_k(terms), alpha)


def expected_capped_loss(alpha: float, t: float, params: PoolParams,
                         nodes: int = DEFAULT_NODES) -> float:
    """E[min(L_t, alpha)]."""
    return float(expected_capped_loss_curve(alpha, t, params, nodes)[0])


def expected_loss(t: float, params: PoolParams) -> float:
    """Unconditional E[L_t], by linearity of expectation."""
    p_t = float(default_prob(params.lambda_bank, t))
    p_0 = float(default_prob(params.lambda_re, t))
    return params.bank_lgd * p_t + params.n_re * params.loan_lgd * p_0


def _require_single_loan(params: PoolParams):
    if params.n_re != 1:
        raise DomainError(f"closed LH+ form needs n_re = 1, got {params.n_re}")


def loss_exceed_prob_lhplus(alpha: float, t: float, params: PoolParams) -> float:
    """P(L_t > alpha) for one large loan via bivariate normal probabilities."""
    _require_single_loan(params)
    _check_alpha(alpha)
    c_0 = norm_inv(default_prob(params.lambda_re, t))
    a0 = attachment_threshold(alpha, 0, t, params)
    a1 = attachment_threshold(alpha, 1, t, params)
    r = math.sqrt(params.rho_re)
    out = norm_cdf(a0) - bivar_norm_cdf(a0, c_0, r) + bivar_norm_cdf(a1, c_0, r)
    return float(min(1.0, max(0.0, out)))


def _trivariate(c_t: float, a: float, c_0: float, params: PoolParams, nodes: int) -> float:
    """P(Y <= c_t, V <= a, X <= c_0) for the (Y, V, X) block of the LH+ correlation matrix."""
    if a == -math.inf or c_t == -math.inf or c_0 == -math.inf:
        return 0.0
    x, w = gauss_legendre(nodes)
    lo, hi = -TAIL_CUTOFF, min(a, TAIL_CUTOFF)
    if hi <= lo:
        return 0.0
    half = 0.5 * (hi - lo)
    v = half * x + 0.5 * (hi + lo)
    rb, r0 = params.rho_bank, params.rho_re
    y_given = norm_cdf((c_t - math.sqrt(rb) * v) / math.sqrt(1.0 - rb))
    x_given = norm_cdf((c_0 - math.sqrt(r0) * v) / math.sqrt(1.0 - r0))
    return half * float(np.dot(w, y_given * x_given * norm_pdf(v)))


def expected_capped_loss_lhplus(alpha: float, t: float, params: PoolParams,
                                nodes: int = DEFAULT_NODES) -> float:
    """E[min(L_t, alpha)] for one large loan, written with Phi_2 / Phi_3 terms."""
    _require_single_loan(params)
    _check_alpha(alpha)
    c_t = norm_inv(default_prob(params.lambda_bank, t))
    c_0 = norm_inv(default_prob(params.lambda_re, t))
    a0 = attachment_threshold(alpha, 0, t, params)
    a1 = attachment_threshold(alpha, 1, t, params)
    r0 = math.sqrt(params.rho_re)
    rb = math.sqrt(params.rho_bank)
    loan_part = norm_cdf(c_0) - bivar_norm_cdf(a1, c_0, r0)
    bank_part = (norm_cdf(c_t) - bivar_norm_cdf(c_t, a0, rb)
                 + _trivariate(c_t, a0, c_0, params, nodes)
                 - _trivariate(c_t, a1, c_0, params, nodes))
    out = (alpha * loss_exceed_prob_lhplus(alpha, t, params)
           + params.loan_lgd * loan_part + params.bank_lgd * bank_part)
    return float(out)
