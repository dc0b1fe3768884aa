"""Scalar probability functions, quadrature, root finding and small linear algebra.

Everything here is pure and stateless.  Infinite arguments are accepted
wherever a probability threshold may legitimately be ``+-inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import optimize, special

from .errors import BracketError, DomainError, NumericalError, ParameterError

# Mass of the standard normal beyond +-8.5 is below 1e-17.
TAIL_CUTOFF = 8.5
DEFAULT_NODES = 200


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise DomainError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    def clamped(self, cutoff: float = TAIL_CUTOFF) -> "Interval":
        """Intersect with ``[-cutoff, cutoff]``; empty intersections collapse to a point."""
        lo = min(max(self.lo, -cutoff), cutoff)
        hi = min(max(self.hi, -cutoff), cutoff)
        return Interval(lo, max(lo, hi))


def norm_cdf(x):
    """Standard normal distribution function (vectorised, exact at +-inf)."""
    return special.ndtr(x)


def norm_pdf(x):
    return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)


def norm_inv(p):
    """Inverse of :func:`norm_cdf`, with ``norm_inv(0) = -inf`` and ``norm_inv(1) = +inf``.

    Raises:
        DomainError: if any finite ``p`` lies outside ``[0, 1]``.
    """
    arr = np.asarray(p, dtype=float)
    bad = (arr < 0.0) | (arr > 1.0)
    if np.any(bad):
        raise DomainError(f"probability outside [0, 1]: {arr[bad].ravel()[0]!r}")
    out = special.ndtri(arr)
    return float(out) if out.ndim == 0 else out


# Gauss-Legendre half-rules used by the bivariate normal routine; the
# abscissae are given on [0, 1] of the symmetric rule.
_BVN_W = (
    np.array([0.1713244923791705, 0.3607615730481384, 0.4679139345726904]),
    np.array([0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
              0.2031674267230659, 0.2334925365383547, 0.2491470458134029]),
    np.array([0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
              0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
              0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
              0.1527533871307259]),
)
_BVN_X = (
    np.array([0.9324695142031522, 0.6612093864662647, 0.2386191860831970]),
    np.array([0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
              0.5873179542866171, 0.3678314989981802, 0.1252334085114692]),
    np.array([0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
              0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
              0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
              0.07652652113349733]),
)


def _bvn_upper(h: float, k: float, r: float) -> float:
    """P(X > h, Y > k) for standard normals with correlation r (Genz 2004)."""
    if h == math.inf or k == math.inf:
        return 0.0
    if h == -math.inf:
        return 1.0 if k == -math.inf else float(special.ndtr(-k))
    if k == -math.inf:
        return float(special.ndtr(-h))
    if r == 0.0:
        return float(special.ndtr(-h) * special.ndtr(-k))

    ar = abs(r)
    rule = 0 if ar < 0.3 else (1 if ar < 0.75 else 2)
    w = np.concatenate([_BVN_W[rule], _BVN_W[rule]])
    x = np.concatenate([1.0 - _BVN_X[rule], 1.0 + _BVN_X[rule]])
    two_pi = 2.0 * math.pi
    hk = h * k

    if ar < 0.925:
        hs = (h * h + k * k) / 2.0
        asr = math.asin(r) / 2.0
        sn = np.sin(asr * x)
        bvn = float(np.dot(np.exp((sn * hk - hs) / (1.0 - sn * sn)), w))
        bvn = bvn * asr / two_pi + float(special.ndtr(-h) * special.ndtr(-k))
        return min(1.0, max(0.0, bvn))

    if r < 0.0:
        k = -k
        hk = -hk
    bvn = 0.0
    if ar < 1.0:
        as_ = 1.0 - r * r
        a = math.sqrt(as_)
        bs = (h - k) ** 2
        asr = -(bs / as_ + hk) / 2.0
        c = (4.0 - hk) / 8.0
        d = (12.0 - hk) / 80.0
        if asr > -100.0:
            bvn = a * math.exp(asr) * (1.0 - c * (bs - as_) * (1.0 - d * bs) / 3.0 + c * d * as_ * as_)
        if hk > -100.0:
            b = math.sqrt(bs)
            sp = math.sqrt(two_pi) * float(special.ndtr(-b / a))
            bvn -= math.exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0)
        a /= 2.0
        xs = (a * x) ** 2
        asr_v = -(bs / xs + hk) / 2.0
        keep = asr_v > -100.0
        xs = xs[keep]
        sp_v = 1.0 + c * xs * (1.0 + 5.0 * d * xs)
        rs = np.sqrt(1.0 - xs)
        ep = np.exp(-(hk / 2.0) * xs / (1.0 + rs) ** 2) / rs
        bvn = (a * float(np.dot(np.exp(asr_v[keep]) * (sp_v - ep), w[keep])) - bvn) / two_pi
    if r > 0.0:
        bvn += float(special.ndtr(-max(h, k)))
    elif h >= k:
        bvn = -bvn
    else:
        if h < 0.0:
            band = float(special.ndtr(k) - special.ndtr(h))
        else:
            band = float(special.ndtr(-h) - special.ndtr(-k))
        bvn = band - bvn
    return min(1.0, max(0.0, bvn))


def bivar_norm_cdf(x: float, y: float, rho: float) -> float:
    """Bivariate standard normal distribution function P(X <= x, Y <= y).

    Uses Genz's Gauss-Legendre scheme on the Drezner-Wesolowsky
    representation, accurate to about 1e-15.  ``x`` and ``y`` may be
    infinite.

    Raises:
        DomainError: if ``|rho| > 1``.
    """
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation {rho!r} outside [-1, 1]")
    if math.isnan(x) or math.isnan(y):
        return math.nan
    if rho == 1.0:
        return float(special.ndtr(min(x, y)))
    if rho == -1.0:
        return max(0.0, float(special.ndtr(x) - special.ndtr(-y)))
    return _bvn_upper(-x, -y, rho)


@lru_cache(maxsize=32)
def gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``nodes``-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def integrate(f: Callable[[np.ndarray], np.ndarray], interval: Interval,
              nodes: int = DEFAULT_NODES) -> float:
    """Gauss-Legendre quadrature of a vectorised ``f`` over a finite interval."""
    if nodes < 2:
        raise DomainError("quadrature needs at least 2 nodes")
    lo, hi = interval.lo, interval.hi
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("integrate() needs a finite interval; clamp it first")
    if hi == lo:
        return 0.0
    x, w = gauss_legendre(nodes)
    half = 0.5 * (hi - lo)
    vals = np.asarray(f(half * x + 0.5 * (hi + lo)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("integrand returned non-finite values")
    return half * float(np.dot(w, vals))


def find_root(f: Callable[[float], float], bracket: Interval, tol: float = 1e-12) -> float:
    """Bracketing root finder (Brent's method; never leaves the bracket).

    Returns an ``x`` with ``|f(x)| <= tol`` or bracket width below 1e-12.

    Raises:
        BracketError: if ``f`` has the same strict sign at both ends.
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    x = optimize.brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(f(x)) > tol and abs(hi - lo) > 1e-12:
        # Brent's stopping rule is on x; tighten on |f| with plain bisection.
        a, b, fa = lo, hi, flo
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = f(m)
            if abs(fm) <= tol or b - a <= 1e-12:
                return m
            if fa * fm <= 0.0:
                b = m
            else:
                a, fa = m, fm
        return 0.5 * (a + b)
    return x


def cholesky4(rho_B: float, rho_R: float, rho_RB: float) -> np.ndarray:
    """Closed-form lower Cholesky factor of the two-bank/two-RE-firm correlation matrix.

    The target matrix orders the variables as (bank i, bank j, RE firm i,
    RE firm j)::

        [[1,      rho_B,  rho_RB, rho_RB],
         [rho_B,  1,      rho_RB, rho_RB],
         [rho_RB, rho_RB, 1,      rho_R ],
         [rho_RB, rho_RB, rho_R,  1     ]]

    Raises:
        ParameterError: if the target matrix is not positive semidefinite.
    """
    b, r, x = float(rho_B), float(rho_R), float(rho_RB)
    if not (-1.0 < b < 1.0):
        raise ParameterError(f"rho_B={b} must lie in (-1, 1)")
    d3 = 1.0 + b - 2.0 * x * x
    d4 = (1.0 + b) * (1.0 - r * r) - 4.0 * x * x * (1.0 - r)
    if d3 <= 0.0 or d4 < -1e-14:
        raise ParameterError(
            f"correlation matrix not positive semidefinite for rho_B={b}, rho_R={r}, rho_RB={x}")
    s = math.sqrt(1.0 - b * b)
    c32 = x * (1.0 - b) / s
    c33 = math.sqrt(d3 / (1.0 + b))
    c43 = (r + r * b - 2.0 * x * x) / math.sqrt((1.0 + b) * d3)
    c44 = math.sqrt(max(d4, 0.0) / d3)
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [b, s, 0.0, 0.0],
        [x, c32, c33, 0.0],
        [x, c32, c43, c44],
    ])


def correlation4(rho_B: float, rho_R: float, rho_RB: float) -> np.ndarray:
    """The 4x4 target matrix factorised by :func:`cholesky4`."""
    b, r, x = rho_B, rho_R, rho_RB
    return np.array([
        [1.0, b, x, x],
        [b, 1.0, x, x],
        [x, x, 1.0, r],
        [x, x, r, 1.0],
    ])


def log_binomial(n: int, k: int) -> float:
    """Natural log of the binomial coefficient C(n, k)."""
    if not (0 <= k <= n):
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n <= 60:
        return math.log(math.comb(n, k))
    return float(special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1))


def log_binomial_row(n: int) -> np.ndarray:
    """``log C(n, k)`` for ``k = 0..n``."""
    return np.array([log_binomial(n, k) for k in range(n + 1)])
