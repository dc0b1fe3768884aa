"""Senior-tranche structuring: attachment point and direct-RE weight.

For a given direct-RE weight ``w`` the senior tranche ``(alpha, 1)`` must
meet a AAA-style credit constraint; the smallest admissible ``alpha`` is
``alpha*(w)``.  The weight is then chosen to maximise the magnitude of the
tranche's RE sensitivity subject to ``alpha*(w) <= alpha_max``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import BracketError, DomainError, InfeasibleError
from .instruments import MarketParams, Tranche, tranche_par_spread, tranche_price, tranche_survival
from .loss_model import PoolParams, loss_exceed_prob
from .numerics import Interval, find_root

CONSTRAINTS = ("expected-loss", "hitting-prob")
ALPHA_LO = 1e-6
ALPHA_HI = (1.0 - 1e-6, 1.0 - 1e-9)
GAP_TOL = 1e-10


@dataclass(frozen=True)
class StructuringSpec:
    """Rating and size requirements for the senior tranche.

    Attributes:
        pd_aaa: AAA default probability over the deal horizon.
        alpha_max: largest admissible attachment point (minimum senior size).
        w_grid: number of grid points for the weight search on [0, 1].
        constraint: ``"expected-loss"`` (tranche EL <= pd_aaa (1 - R)) or
            ``"hitting-prob"`` (P(L >= alpha) <= pd_aaa).
    """

    pd_aaa: float
    alpha_max: float
    w_grid: int = 101
    constraint: str = "expected-loss"

    def __post_init__(self):
        if not 0.0 < self.pd_aaa < 1.0:
            raise DomainError("pd_aaa must lie in (0, 1)")
        if not 0.0 <= self.alpha_max <= 1.0:
            raise DomainError("alpha_max must lie in [0, 1]")
        if self.w_grid < 2:
            raise DomainError("w_grid needs at least 2 points")
        if self.constraint not in CONSTRAINTS:
            raise DomainError(f"constraint must be one of {CONSTRAINTS}")


@dataclass(frozen=True)
class StructuringResult:
    """Outcome of :func:`optimal_weight`.

    ``binding`` is ``"alpha_max"`` when the size constraint binds at
    ``w_star``, ``"full_weight"`` when ``w_star = 1`` and
    ``"feasible_boundary"`` when ``w_star`` sits on another edge of the
    feasible weight set.  ``characterization_ok`` is False if none applies.
    """

    w_star: float
    alpha_star: float
    pv01_re: float
    spread: float
    binding: str
    characterization_ok: bool
    grid: tuple = field(default=(), repr=False)


def el_constraint_gap(alpha: float, w: float, t: float, params: PoolParams,
                      spec: StructuringSpec) -> float:
    """Senior-tranche expected loss minus the AAA bound; negative means satisfied."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    pool = params.with_(w_re=w)
    el = 1.0 - tranche_survival(t, Tranche(alpha, 1.0), pool)
    return el - spec.pd_aaa * (1.0 - params.recovery_bank)


def hit_constraint_gap(alpha: float, w: float, t: float, params: PoolParams,
                       spec: StructuringSpec) -> float:
    """Probability that the senior tranche is hit minus the AAA default probability."""
    return loss_exceed_prob(alpha, t, params.with_(w_re=w)) - spec.pd_aaa


def constraint_gap(alpha: float, w: float, t: float, params: PoolParams,
                   spec: StructuringSpec) -> float:
    if spec.constraint == "expected-loss":
        return el_constraint_gap(alpha, w, t, params, spec)
    return hit_constraint_gap(alpha, w, t, params, spec)


@lru_cache(maxsize=4096)
def _attachment(w: float, params: PoolParams, spec: StructuringSpec, maturity: float) -> float:
    def gap(a):
        return constraint_gap(a, w, maturity, params, spec)

    if gap(ALPHA_LO) <= 0.0:
        return 0.0
    for hi in ALPHA_HI:
        if gap(hi) < 0.0:
            return find_root(gap, Interval(ALPHA_LO, hi), tol=GAP_TOL)
    raise InfeasibleError(f"credit constraint cannot be met for any alpha < 1 at w={w}")


def optimal_attachment(w: float, params: PoolParams, spec: StructuringSpec,
                       market: MarketParams) -> float:
    """Smallest attachment point meeting the credit constraint at weight ``w``.

    Returns 0 when every attachment point is admissible.

    Raises:
        InfeasibleError: if the constraint fails for every ``alpha < 1``.
    """
    return _attachment(float(w), params, spec, market.maturity)


Pv01Fn = Callable[[float, float, float], float]


def direct_pv01(params: PoolParams, market: MarketParams, bump: float = 1e-4) -> Pv01Fn:
    """PV01 of the senior tranche from bumping only the direct RE loans' spread."""

    def pv01(w, alpha, spread):
        base = params.with_(w_re=w)
        bumped = base.with_(lambda_re=base.lambda_re + bump / (1.0 - base.recovery_re))
        tranche = Tranche(alpha, 1.0)
        return (tranche_price(tranche, spread, bumped, market)
                - tranche_price(tranche, spread, base, market))

    return pv01


def optimal_weight(params: PoolParams, spec: StructuringSpec, market: MarketParams,
                   pv01: Pv01Fn | None = None) -> StructuringResult:
    """Direct-RE weight maximising ``|PV01_RE|`` of the binding-constraint senior tranche.

    ``pv01(w, alpha, spread)`` evaluates the sensitivity at weight ``w`` for
    the tranche ``(alpha, 1)`` paying ``spread``; by default only the direct
    RE loans are bumped.  The weight grid is refined around the best grid
    point: by root finding on ``alpha*(w) = alpha_max`` where the size
    constraint cuts the grid, and by bounded scalar search otherwise.

    Raises:
        InfeasibleError: if ``alpha*(w) > alpha_max`` for every weight.
    """
    pv01 = pv01 or direct_pv01(params, market)
    grid = np.linspace(0.0, 1.0, spec.w_grid)
    if params.n_re == 0:
        raise DomainError("optimising the RE weight needs n_re >= 1")

    def alpha_of(w):
        try:
            return optimal_attachment(w, params, spec, market)
        except InfeasibleError:
            return math.inf

    def evaluate(w):
        a = alpha_of(w)
        if not a <= spec.alpha_max:
            return None
        tranche = Tranche(a, 1.0)
        s = float(tranche_par_spread(tranche, params.with_(w_re=w), market))
        return float(a), s, float(pv01(w, a, s))

    rows = []
    for w in grid:
        rows.append((float(w), evaluate(float(w))))
    feasible = [i for i, (_, r) in enumerate(rows) if r is not None]
    if not feasible:
        raise InfeasibleError(
            f"alpha*(w) exceeds alpha_max={spec.alpha_max} for every weight on the grid")

    best = feasible[0]
    for i in feasible[1:]:
        if abs(rows[i][1][2]) > abs(rows[best][1][2]) + 1e-12:
            best = i
    w_best, (a_best, s_best, p_best) = rows[best]

    neighbours = [j for j in (best - 1, best + 1) if 0 <= j < len(rows)]
    cut = [j for j in neighbours if rows[j][1] is None]
    if cut:
        j = cut[0]
        lo, hi = sorted((w_best, rows[j][0]))
        try:
            w_b = find_root(lambda w: min(alpha_of(w), 2.0) - spec.alpha_max,
                            Interval(lo, hi), tol=1e-12)
        except BracketError:
            w_b = None
        if w_b is not None:
            # step back inside the feasible side of the cut
            cand = evaluate(w_b)
            if cand is None:
                step = 1e-12 if j < best else -1e-12
                w_b += step
                cand = evaluate(w_b)
            if cand is not None and abs(cand[2]) > abs(p_best):
                w_best, (a_best, s_best, p_best) = w_b, cand
    elif len(neighbours) == 2:
        lo, hi = rows[neighbours[0]][0], rows[neighbours[1]][0]
        res = optimize.minimize_scalar(lambda w: -abs(evaluate(w)[2]), bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-6})
        cand = evaluate(float(res.x))
        if cand is not None and abs(cand[2]) > abs(p_best):
            w_best, (a_best, s_best, p_best) = float(res.x), cand

    step = 1.0 / (spec.w_grid - 1)
    feasible_w = [rows[i][0] for i in feasible]
    if abs(a_best - spec.alpha_max) <= 1e-6 or (cut and abs(a_best - spec.alpha_max) <= 1e-3):
        binding, ok = "alpha_max", True
    elif w_best == 1.0:
        binding, ok = "full_weight", True
    elif w_best <= min(feasible_w) + step / 2 or w_best >= max(feasible_w) - step / 2:
        binding, ok = "feasible_boundary", True
    else:
        binding, ok = "interior", False
    return StructuringResult(
        w_star=float(w_best), alpha_star=float(a_best), pv01_re=float(p_best),
        spread=float(s_best), binding=binding, characterization_ok=ok,
        grid=tuple((w, None if r is None else r) for w, r in rows),
    )
