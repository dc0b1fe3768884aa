"""Brute-force Monte Carlo oracles for the closed-form results.

Paths are generated in fixed-size chunks; chunk ``i`` draws from its own
PCG64 stream keyed by ``(seed, i)`` and the per-chunk statistics are merged
in chunk order.  Estimates are therefore bit-identical whatever the number
of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .loss_model import PoolParams, _threshold, default_prob
from .merton import BalanceSheet, CorrelationTriple
from .numerics import cholesky4


@dataclass(frozen=True)
class McSettings:
    """Simulation size and seeding.

    Attributes:
        paths: total number of paths.
        seed: root seed; chunk ``i`` uses the stream ``(seed, i)``.
        chunk: paths per chunk (the unit of parallel work).
        antithetic: pair every draw with its negation.
        lhp_obligors: if set, simulate this many bank obligors per path
            instead of using the infinitely granular conditional loss.
    """

    paths: int = 1_000_000
    seed: int = 12345
    chunk: int = 100_000
    antithetic: bool = False
    lhp_obligors: int | None = None

    def __post_init__(self):
        if self.paths < 1 or self.chunk < 1:
            raise ValueError("paths and chunk must be >= 1")
        if self.antithetic and self.chunk % 2:
            raise ValueError("antithetic sampling needs an even chunk size")

    def chunk_sizes(self) -> list[int]:
        full, rest = divmod(self.paths, self.chunk)
        return [self.chunk] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    paths: int

    def z_score(self, value: float, se_floor: float = 0.0) -> float:
        """Distance of ``value`` from the estimate in standard errors."""
        se = max(self.std_error, se_floor)
        if se == 0.0:
            return 0.0 if value == self.mean else math.inf
        return abs(value - self.mean) / se

    def brackets(self, value: float, n_se: float = 3.0, se_floor: float = 0.0) -> bool:
        return self.z_score(value, se_floor) <= n_se


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _run_chunks(work: Callable[[np.random.Generator, int], object], mc: McSettings,
                workers: int = 1) -> list:
    sizes = mc.chunk_sizes()
    jobs = [(i, size) for i, size in enumerate(sizes)]

    def run(job):
        i, size = job
        return work(chunk_rng(mc.seed, i), size)

    if workers <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


def _normals(rng: np.random.Generator, shape: tuple[int, ...], antithetic: bool) -> np.ndarray:
    if not antithetic:
        return rng.standard_normal(shape)
    half = rng.standard_normal((shape[0] // 2,) + shape[1:])
    return np.concatenate([half, -half])


def _mean_and_se(sums: np.ndarray, sumsq: np.ndarray, count: int) -> tuple[np.ndarray, np.ndarray]:
    mean = sums / count
    if count < 2:
        return mean, np.zeros_like(mean)
    var = np.maximum(sumsq - count * mean * mean, 0.0) / (count - 1)
    return mean, np.sqrt(var / count)


def sample_pool_loss(rng: np.random.Generator, size: int, t: float, params: PoolParams,
                     antithetic: bool = False, lhp_obligors: int | None = None):
    """Draw ``size`` pool losses at time ``t``.

    Returns ``(loss, factor, defaults)``: the pool loss fraction, the
    systematic factor and the number of defaulted RE loans on each path.
    """
    n = params.n_re
    p_t = float(default_prob(params.lambda_bank, t))
    p_0 = float(default_prob(params.lambda_re, t))
    c_t = special.ndtri(p_t)
    c_0 = special.ndtri(p_0)
    z = _normals(rng, (size, 1 + n), antithetic)
    v = z[:, 0]
    if n:
        x = math.sqrt(params.rho_re) * v[:, None] + math.sqrt(1.0 - params.rho_re) * z[:, 1:]
        defaults = np.count_nonzero(x <= c_0, axis=1)
    else:
        defaults = np.zeros(size, dtype=np.int64)
    rb = params.rho_bank
    if lhp_obligors is None:
        bank_fraction = special.ndtr((c_t - math.sqrt(rb) * v) / math.sqrt(1.0 - rb))
    else:
        eps = rng.standard_normal((size, lhp_obligors))
        y = math.sqrt(rb) * v[:, None] + math.sqrt(1.0 - rb) * eps
        bank_fraction = np.count_nonzero(y <= c_t, axis=1) / lhp_obligors
    loss = defaults * params.loan_lgd + params.bank_lgd * bank_fraction
    return loss, v, defaults


def _assert_threshold_identity(loss, v, defaults, alphas, t, params):
    """Pathwise: L > alpha exactly when V < A_t(alpha, #defaults)."""
    c_t = special.ndtri(float(default_prob(params.lambda_bank, t)))
    for alpha in alphas:
        a = _threshold(alpha, defaults, c_t, params)
        clear = np.abs(loss - alpha) > 1e-10
        if not np.array_equal((loss > alpha)[clear], (v < a)[clear]):
            raise AssertionError(f"pool loss disagrees with factor threshold at alpha={alpha}")


@dataclass(frozen=True)
class PoolLossEstimates:
    alphas: tuple[float, ...]
    exceed: tuple[McEstimate, ...]
    capped: tuple[McEstimate, ...]


def mc_pool_loss(alphas: Sequence[float], t: float, params: PoolParams, mc: McSettings,
                 workers: int = 1) -> PoolLossEstimates:
    """P(L_t > alpha) and E[min(L_t, alpha)] for several ``alpha`` from one simulation."""
    alphas = tuple(float(a) for a in alphas)
    a_arr = np.array(alphas)

    def work(rng, size):
        loss, v, k = sample_pool_loss(rng, size, t, params, mc.antithetic, mc.lhp_obligors)
        if mc.lhp_obligors is None:
            _assert_threshold_identity(loss, v, k, alphas, t, params)
        hit = (loss[:, None] > a_arr).astype(float)
        capped = np.minimum(loss[:, None], a_arr)
        if mc.antithetic:
            h = size // 2
            hit = 0.5 * (hit[:h] + hit[h:])
            capped = 0.5 * (capped[:h] + capped[h:])
        return (hit.shape[0], hit.sum(0), (hit * hit).sum(0), capped.sum(0), (capped * capped).sum(0))

    parts = _run_chunks(work, mc, workers)
    count = sum(p[0] for p in parts)
    stats = [np.sum([p[i] for p in parts], axis=0) for i in range(1, 5)]
    m_hit, se_hit = _mean_and_se(stats[0], stats[1], count)
    m_cap, se_cap = _mean_and_se(stats[2], stats[3], count)
    paths = mc.paths
    return PoolLossEstimates(
        alphas,
        tuple(McEstimate(float(m), float(s), paths) for m, s in zip(m_hit, se_hit)),
        tuple(McEstimate(float(m), float(s), paths) for m, s in zip(m_cap, se_cap)),
    )


def mc_loss_exceed_prob(alpha: float, t: float, params: PoolParams, mc: McSettings,
                        workers: int = 1) -> McEstimate:
    return mc_pool_loss([alpha], t, params, mc, workers).exceed[0]


def mc_expected_capped_loss(alpha: float, t: float, params: PoolParams, mc: McSettings,
                            workers: int = 1) -> McEstimate:
    return mc_pool_loss([alpha], t, params, mc, workers).capped[0]


def mc_tranche_survival(t: float, attach: float, detach: float, params: PoolParams,
                        mc: McSettings, workers: int = 1) -> McEstimate:
    """Expected surviving tranche notional, as a sample mean over pool-loss paths."""
    width = detach - attach

    def work(rng, size):
        loss, _, _ = sample_pool_loss(rng, size, t, params, mc.antithetic, mc.lhp_obligors)
        q = 1.0 - (np.minimum(loss, detach) - np.minimum(loss, attach)) / width
        if mc.antithetic:
            q = 0.5 * (q[: size // 2] + q[size // 2:])
        return q.size, q.sum(), (q * q).sum()

    parts = _run_chunks(work, mc, workers)
    count = sum(p[0] for p in parts)
    m, se = _mean_and_se(np.sum([p[1] for p in parts]), np.sum([p[2] for p in parts]), count)
    return McEstimate(float(m), float(se), mc.paths)


def _merge_comoments(parts):
    """Chan-style pooled mean and co-moment matrix, merged in chunk order."""
    n_tot, mean_tot, m2_tot = 0, None, None
    for n, mean, m2 in parts:
        if mean_tot is None:
            n_tot, mean_tot, m2_tot = n, mean, m2
            continue
        delta = mean - mean_tot
        n_new = n_tot + n
        m2_tot = m2_tot + m2 + np.outer(delta, delta) * (n_tot * n / n_new)
        mean_tot = mean_tot + delta * (n / n_new)
        n_tot = n_new
    return n_tot, mean_tot, m2_tot


def _moment_stats(cov: np.ndarray) -> np.ndarray:
    var = cov[0, 0]
    return np.array([
        var,
        cov[0, 1] / math.sqrt(cov[0, 0] * cov[1, 1]),
        cov[0, 2] / math.sqrt(cov[0, 0] * cov[2, 2]),
    ])


MOMENT_BATCHES = 10


@dataclass(frozen=True)
class EnlargedMomentEstimates:
    var: McEstimate
    rho_ij: McEstimate
    rho_bre: McEstimate


def mc_enlarged_moments(bs: BalanceSheet, corr: CorrelationTriple, mc: McSettings,
                        workers: int = 1) -> EnlargedMomentEstimates:
    """Sample variance and correlations of the first-order enlarged log-return.

    Draws the one-year Brownian values of two banks and two RE firms
    through the Cholesky factor, forms ``ln A1 + F1 / A1`` for both banks
    and measures its variance, the bank-bank correlation and the
    correlation of bank i with RE firm j.  Standard errors are batch-means
    errors over ``MOMENT_BATCHES`` sub-batches per chunk.
    """
    chol = cholesky4(corr.rho_B, corr.rho_R, corr.rho_RB)
    sb, sr, k = bs.sigma_bank, bs.sigma_re, bs.re_loan_weight
    shift = 0.5 * (sb * sb - sr * sr)

    def work(rng, size):
        w = _normals(rng, (size, 4), mc.antithetic) @ chol.T
        y_i = sb * w[:, 0] + k * np.exp(shift + sr * w[:, 2] - sb * w[:, 0])
        y_j = sb * w[:, 1] + k * np.exp(shift + sr * w[:, 3] - sb * w[:, 1])
        data = np.column_stack([y_i, y_j, w[:, 3]])
        out = []
        for block in np.array_split(data, MOMENT_BATCHES if size >= 4 * MOMENT_BATCHES else 1):
            mean = block.mean(axis=0)
            centred = block - mean
            out.append((block.shape[0], mean, centred.T @ centred))
        return out

    parts = [b for chunk in _run_chunks(work, mc, workers) for b in chunk]
    n_tot, _, m2 = _merge_comoments(parts)
    pooled = _moment_stats(m2 / (n_tot - 1))
    per_batch = np.array([_moment_stats(p[2] / (p[0] - 1)) for p in parts if p[0] > 1])
    if len(per_batch) > 1:
        se = per_batch.std(axis=0, ddof=1) / math.sqrt(len(per_batch))
    else:
        se = np.full(3, math.inf)
    paths = mc.paths
    return EnlargedMomentEstimates(*(McEstimate(float(m), float(s), paths) for m, s in zip(pooled, se)))


def mc_exact_enlarged_pd(bs: BalanceSheet, corr: CorrelationTriple, horizon: float,
                         mc: McSettings, workers: int = 1) -> McEstimate:
    """Frequency of ``A_T + F_T <= D0 + F0`` (in forward terms) without linearisation."""
    sb, sr, k = bs.sigma_bank, bs.sigma_re, bs.re_loan_weight
    rt = math.sqrt(horizon)
    rx = corr.rho_RB
    barrier = bs.leverage + k

    def work(rng, size):
        z = _normals(rng, (size, 2), mc.antithetic)
        zb = z[:, 0]
        zr = rx * zb + math.sqrt(1.0 - rx * rx) * z[:, 1]
        assets = np.exp(-0.5 * sb * sb * horizon + sb * rt * zb)
        loan = k * np.exp(-0.5 * sr * sr * horizon + sr * rt * zr)
        hit = (assets + loan <= barrier).astype(float)
        return size, hit.sum(), hit.sum()

    parts = _run_chunks(work, mc, workers)
    count = sum(p[0] for p in parts)
    m, se = _mean_and_se(np.sum([p[1] for p in parts]), np.sum([p[2] for p in parts]), count)
    return McEstimate(float(m), float(se), mc.paths)


def mc_gaussian_exp_moments(sigma_x: float, sigma_y: float, mc: McSettings,
                      workers: int = 1) -> tuple[McEstimate, McEstimate]:
    """Sample versions of ``E[X e^{sx X}]`` and ``E[X e^{sx X + sy Y}]``."""

    def work(rng, size):
        z = rng.standard_normal((size, 2))
        a = z[:, 0] * np.exp(sigma_x * z[:, 0])
        b = a * np.exp(sigma_y * z[:, 1])
        return size, np.array([a.sum(), b.sum()]), np.array([(a * a).sum(), (b * b).sum()])

    parts = _run_chunks(work, mc, workers)
    count = sum(p[0] for p in parts)
    m, se = _mean_and_se(np.sum([p[1] for p in parts], axis=0), np.sum([p[2] for p in parts], axis=0), count)
    return (McEstimate(float(m[0]), float(se[0]), mc.paths),
            McEstimate(float(m[1]), float(se[1]), mc.paths))
