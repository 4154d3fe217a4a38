"""Independent ground truth for the samplers and estimators.

Nothing here draws random numbers. Values come from closed forms, continued
fractions, or Richardson-extrapolated trapezoid quadrature, and each result
carries an error bound. The rest of the package is validated against these
functions, so they deliberately avoid sharing code paths with the Monte Carlo
machinery (only ``math`` and ``numpy`` are used).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Method",
    "OracleResult",
    "regularized_beta",
    "regularized_gamma_q",
    "beta_coordinate_cdf",
    "reference_tail_xp",
    "romberg",
    "exact_small_n",
]

_TINY = 1e-300
_EPS = 1e-16


class Method(str, Enum):
    CLOSED_FORM = "closed-form"
    QUAD_1D = "1-D quadrature"
    QUAD_2D = "2-D quadrature"
    SERIES = "high-precision series"


@dataclass(frozen=True)
class OracleResult:
    value: float
    method: Method
    abs_error_bound: float


# ---------------------------------------------------------------------------
# continued fractions


def _beta_cf(a, b, x, max_iter=10_000):
    """Modified Lentz evaluation of the incomplete-beta continued fraction (vectorised)."""
    x = np.asarray(x, dtype=float)
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h = np.where(done, h, h * d * c)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < _EPS
        if done.all():
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b})")


def regularized_beta(a: float, b: float, x):
    """Regularised incomplete beta ``I_x(a, b)``; accepts scalars or arrays."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)) or np.any(~np.isfinite(xa)):
        raise ValueError("x must lie in [0, 1]")
    out = np.empty_like(xa)
    lo = xa <= 0.0
    hi = xa >= 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    if mid.any():
        xm = xa[mid]
        lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        front = np.exp(lbeta + a * np.log(xm) + b * np.log1p(-xm))
        direct = xm < (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xm)
        if direct.any():
            res[direct] = front[direct] * _beta_cf(a, b, xm[direct]) / a
        if (~direct).any():
            res[~direct] = 1.0 - front[~direct] * _beta_cf(b, a, 1.0 - xm[~direct]) / b
        out[mid] = res
    return float(out) if np.ndim(x) == 0 else out


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularised incomplete gamma ``Q(a, x) = Γ(a, x) / Γ(a)``."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0 or not math.isfinite(x):
        raise ValueError("x must be finite and non-negative")
    if x == 0:
        return 1.0
    log_front = a * math.log(x) - x - math.lgamma(a)
    if x < a + 1.0:
        # series for the lower function P
        ap, total, term = a, 1.0 / a, 1.0 / a
        for _ in range(100_000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                return 1.0 - total * math.exp(log_front)
        raise ArithmeticError("incomplete gamma series did not converge")
    # Lentz continued fraction for Q
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 100_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(log_front) * h
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def beta_coordinate_cdf(p: float, n: int, x):
    """CDF of ``coords_1 ** p`` for a uniform point on the positive quadrant of the l_p sphere.

    The law is Beta(1/p, (n-1)/p).
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    xa = np.asarray(x, dtype=float)
    if np.any((xa < 0) | (xa > 1)) or np.any(~np.isfinite(xa)):
        raise ValueError("x must lie in [0, 1]")
    if n == 1:
        out = np.where(xa >= 1.0, 1.0, 0.0)
        return float(out) if np.ndim(x) == 0 else out
    return regularized_beta(1.0 / p, (n - 1) / p, x)


def reference_tail_xp(p: float, u: float) -> float:
    """Exact ``P(x**p > u)`` for a p-exponential ``x``; ``x**p`` is Gamma(1/p)."""
    if p <= 0:
        raise ValueError("p must be positive")
    if u < 0:
        raise ValueError("u must be non-negative")
    return regularized_gamma_q(1.0 / p, float(u))


# ---------------------------------------------------------------------------
# quadrature


def romberg(f, a: float, b: float, tol: float = 1e-9, max_levels: int = 20, min_levels: int = 4):
    """Romberg integration of a vectorised ``f`` over ``[a, b]``.

    Returns ``(value, error_estimate)`` where the estimate is the last change
    of the diagonal of the Richardson table.
    """
    if b == a:
        return 0.0, 0.0
    h = b - a
    fa, fb = np.asarray(f(np.array([a, b])), dtype=float)
    rows = [[0.5 * h * (fa + fb)]]
    err = math.inf
    for k in range(1, max_levels + 1):
        h *= 0.5
        m = 1 << (k - 1)
        nodes = a + h * (2 * np.arange(m) + 1)
        trap = 0.5 * rows[-1][0] + h * float(np.sum(f(nodes)))
        row = [trap]
        for j in range(1, k + 1):
            factor = 4.0**j
            row.append(row[j - 1] + (row[j - 1] - rows[-1][j - 1]) / (factor - 1.0))
        err = abs(row[-1] - rows[-1][-1])
        rows.append(row)
        if k >= min_levels and err < tol:
            break
    return rows[-1][-1], err


def _smoothstep(a: float, b: float):
    """Change of variables ``[0,1] -> [a,b]`` with vanishing derivative at both ends."""
    w = b - a

    def phi(v):
        return a + w * v * v * (3.0 - 2.0 * v)

    def dphi(v):
        return 6.0 * w * v * (1.0 - v)

    return phi, dphi


def _romberg_smooth(f, a: float, b: float, tol: float, max_levels: int):
    phi, dphi = _smoothstep(a, b)
    return romberg(lambda v: f(phi(v)) * dphi(v), 0.0, 1.0, tol=tol, max_levels=max_levels)


# ---------------------------------------------------------------------------
# small-n tail probabilities


def _qnorm2(s, g, q):
    """q-norm of the planar vector ``(s, g)`` (small-ell scale)."""
    if math.isinf(q):
        return np.maximum(s, g)
    m = np.maximum(s, g)
    m = np.where(m == 0, 1.0, m)
    return m * ((s / m) ** q + (g / m) ** q) ** (1.0 / q)


def _arc_root(level, p, q):
    """Solve ``||(z, (1-z^p)^{1/p})||_q = level`` for ``z`` in ``[0, 2^{-1/p}]`` by bisection.

    ``level`` may be an array. The left-hand side decreases on that interval.
    """
    level = np.asarray(level, dtype=float)
    lo = np.zeros_like(level)
    hi = np.full_like(level, 2.0 ** (-1.0 / p))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = (1.0 - mid**p) ** (1.0 / p)
        above = _qnorm2(mid, g, q) > level
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
            break
    return 0.5 * (lo + hi)


def _arc_range(p, q):
    """(min, max) of the q-norm over the quadrant arc of the unit l_p circle."""
    s = 2.0 ** (-1.0 / p)
    return float(_qnorm2(np.array(s), np.array(s), q)), 1.0


def _arc_fraction_quadrature(level, p, q, tol, max_levels):
    """Cone-measure fraction of the quadrant l_p arc where the q-norm exceeds ``level``."""
    lo_norm, hi_norm = _arc_range(p, q)
    if level < lo_norm:
        return 1.0, 0.0
    if level >= hi_norm:
        return 0.0, 0.0
    z = float(_arc_root(level, p, q))
    star = 2.0 ** (-1.0 / p)
    expo = 1.0 / p - 1.0

    def density(s):
        return (1.0 - s**p) ** expo

    num, e1 = romberg(density, 0.0, z, tol=tol, max_levels=max_levels)
    den, e2 = romberg(density, 0.0, star, tol=tol, max_levels=max_levels)
    val = num / den
    err = (e1 + val * e2) / den + 1e-15
    return min(max(float(val), 0.0), 1.0), float(err)


def _arc_fraction_closed(level, p, q):
    """Vectorised closed form of the arc fraction via the incomplete beta function."""
    level = np.asarray(level, dtype=float)
    lo_norm, hi_norm = _arc_range(p, q)
    out = np.where(level < lo_norm, 1.0, 0.0)
    mid = (level >= lo_norm) & (level < hi_norm)
    if mid.any():
        z = _arc_root(level[mid], p, q)
        out[mid] = 2.0 * regularized_beta(1.0 / p, 1.0 / p, np.clip(z**p, 0.0, 1.0))
    return out


def _mu3_small_ell(level, p, q, tol, max_levels):
    """μ(||s||_q > level) for the uniform point on the 3-dimensional quadrant sphere.

    The cone measure has density ∝ s3^{1-p} in the (s1, s2) chart. Fixing s1
    leaves a quadrant arc of radius ρ = (1 - s1^p)^{1/p}, whose measure is
    ∝ ρ^{2-p}; the remaining event is an arc-fraction problem.
    """
    if math.isinf(q):
        def residual(s1):
            return np.where(s1 > level, -1.0, level)
    else:
        def residual(s1):
            r = level**q - s1**q
            return np.where(r <= 0, -1.0, np.abs(r) ** (1.0 / q))

    def fraction(s1):
        s1 = np.asarray(s1, dtype=float)
        rho = np.maximum((1.0 - s1**p), 0.0) ** (1.0 / p)
        res = residual(s1)
        out = np.ones_like(s1)
        live = (res >= 0) & (rho > 0)
        if live.any():
            out[live] = _arc_fraction_closed(res[live] / rho[live], p, q)
        dead = (res >= 0) & (rho <= 0)
        out[dead] = 0.0
        return out

    def weight(s1):
        s1 = np.asarray(s1, dtype=float)
        out = np.zeros_like(s1)
        inside = s1 < 1.0
        # integrable endpoint singularity when p > 2
        out[inside] = (1.0 - s1[inside] ** p) ** ((2.0 - p) / p)
        return out

    # breakpoints where the arc fraction leaves 0 or 1: the scaled residual
    # level crosses the arc maximum (1) or the arc minimum
    arc_min, _ = _arc_range(p, q)

    def scaled(s1):
        s1 = np.asarray(s1, dtype=float)
        rho = np.maximum(1.0 - s1**p, 0.0) ** (1.0 / p)
        res = residual(s1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(res < 0, -1.0, np.where(rho > 0, res / rho, np.inf))

    grid = np.linspace(0.0, 1.0, 4097)
    sg = scaled(grid)
    cuts = [0.0]
    for level_k in (1.0, arc_min):
        side = sg >= level_k
        for i in np.nonzero(side[1:] != side[:-1])[0]:
            lo_s, hi_s = grid[i], grid[i + 1]
            lo_side = side[i]
            while hi_s - lo_s > 1e-16:
                m = 0.5 * (lo_s + hi_s)
                if (float(scaled(m)) >= level_k) == lo_side:
                    lo_s = m
                else:
                    hi_s = m
                if m in (lo_s, hi_s) and hi_s - lo_s <= np.spacing(m):
                    break
            cuts.append(0.5 * (lo_s + hi_s))
    cuts = sorted(set(cuts)) + [1.0]

    def integrand(s1):
        return weight(s1) * fraction(s1)

    num, err = 0.0, 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b > a:
            v, e = _romberg_smooth(integrand, a, b, tol, max_levels)
            num += v
            err += e
    den, e_den = _romberg_smooth(weight, 0.0, 1.0, tol, max_levels)
    val = num / den
    return min(max(float(val), 0.0), 1.0), float((err + val * e_den) / den) + 1e-14


def _mu_small_ell(level, p, q, n, tol, max_levels):
    if n == 1:
        return (1.0 if level < 1.0 else 0.0), 0.0
    if n == 2:
        return _arc_fraction_quadrature(level, p, q, tol, max_levels)
    return _mu3_small_ell(level, p, q, tol, max_levels)


def exact_small_n(p: float, q: float, n: int, t: float, body: str = "mu-sphere",
                  tol: float = 1e-9, max_levels: int = 18) -> OracleResult:
    """Exact μ or ν of ``{||u||_{L_q^n} > t}`` for ``n <= 3``.

    ``body`` is ``"mu-sphere"`` (normalized cone measure on the positive
    quadrant of the L_p^n sphere) or ``"nu-ball"`` (normalized volume of the
    L_p^n ball). ``q`` may be ``math.inf``.
    """
    if n not in (1, 2, 3):
        raise NotImplementedError("exact_small_n supports n in {1, 2, 3} only")
    if p <= 0:
        raise ValueError("p must be positive")
    if q < p:
        raise ValueError("q must satisfy q >= p")
    if t < 0:
        raise ValueError("t must be non-negative")
    if body not in ("mu-sphere", "nu-ball"):
        raise ValueError(f"unknown body {body!r}")

    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    scale = n ** (1.0 / p - inv_q)  # big-L norm = scale * small-ell norm on the sphere
    cap = scale  # largest possible value of the big-L q-norm

    if body == "mu-sphere":
        if n == 1:
            return OracleResult(1.0 if t < 1.0 else 0.0, Method.CLOSED_FORM, 0.0)
        val, err = _mu_small_ell(t / scale, p, q, n, tol, max_levels)
        method = Method.QUAD_1D if n == 2 else Method.QUAD_2D
        return OracleResult(val, method, err)

    # ν(A) = n ∫_0^1 r^{n-1} μ(A / r) dr = ∫_0^1 μ(||u||_q > t s^{-1/n}) ds
    if n == 1:
        return OracleResult(max(0.0, 1.0 - t), Method.CLOSED_FORM, 0.0)
    if t == 0:
        return OracleResult(1.0, Method.CLOSED_FORM, 0.0)
    s_zero = min(1.0, (t / cap) ** n)  # below: threshold above the cap, μ = 0
    s_full = min(1.0, t**n)  # above: threshold below 1, μ = 1
    lo, hi = s_zero, max(s_zero, s_full) if t < 1.0 else 1.0
    full_part = 1.0 - hi if t < 1.0 else 0.0
    if hi <= lo:
        return OracleResult(full_part, Method.CLOSED_FORM, 0.0)

    if n == 2:
        def integrand(s):
            s = np.asarray(s, dtype=float)
            out = np.zeros_like(s)
            pos = s > 0
            out[pos] = _arc_fraction_closed(t * s[pos] ** (-1.0 / n) / scale, p, q)
            return out

        v, e = _romberg_smooth(integrand, lo, hi, tol, max_levels)
        return OracleResult(min(1.0, float(v) + full_part), Method.QUAD_2D, float(e) + 1e-14)

    errs = []

    def integrand3(s):
        out = np.zeros_like(s)
        for i, si in enumerate(s):
            if si > 0:
                out[i], e = _mu3_small_ell(t * si ** (-1.0 / n) / scale, p, q, 1e-9, 10)
                errs.append(e)
        return out

    v, e = _romberg_smooth(integrand3, lo, hi, tol, 7)
    inner_err = (hi - lo) * (max(errs) if errs else 0.0)
    return OracleResult(min(1.0, float(v) + full_part), Method.QUAD_2D, float(e + inner_err))
