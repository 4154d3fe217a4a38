"""Ball measure from sphere measure through the radial decomposition.

For a norm-threshold event the normalized ball volume is

    nu(||u||_q > t) = n * int_0^1 r^{n-1} mu(||u||_q > t / r) dr
                    = int_0^1 mu(||u||_q > t * s^{-1/n}) ds      (s = r^n)

The second form has a flat weight. It is what gets integrated here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .samplers import Normalization, SpherePoint
from .stats import KSResult, ks_test
from .tails import EmpiricalTail, norm_cap

__all__ = [
    "Quadrature",
    "RadialProfile",
    "NuResult",
    "nu_from_mu",
    "nu_from_empirical",
    "radial_cdf_check",
]


class Quadrature(str, Enum):
    TRAPEZOID = "trapezoid"
    GAUSS_LEGENDRE = "gauss-legendre"


@dataclass(frozen=True)
class RadialProfile:
    grid: np.ndarray  # radii in (0, 1], increasing
    mu_values: np.ndarray  # mu(||u||_q > t / r)
    mu_low: np.ndarray
    mu_high: np.ndarray
    quadrature: Quadrature


@dataclass(frozen=True)
class NuResult:
    value: float
    low: float
    high: float
    quad_error: float
    profile: RadialProfile


def _nodes(kind: Quadrature, order: int):
    """Nodes and weights on [0, 1]."""
    if kind is Quadrature.GAUSS_LEGENDRE:
        x, w = np.polynomial.legendre.leggauss(order)
        return 0.5 * (x + 1.0), 0.5 * w
    x = np.linspace(0.0, 1.0, order)
    w = np.full(order, 1.0 / (order - 1))
    w[0] = w[-1] = 0.5 / (order - 1)
    return x, w


def _as_triple(v):
    if isinstance(v, tuple):
        val, lo, hi = v
        return float(val), float(lo), float(hi)
    v = float(v)
    return v, v, v


def _integrate(segments, kind, order, evaluate):
    nodes, weights = _nodes(kind, order)
    total = np.zeros(3)
    s_all, m_all = [], []
    for a, b in segments:
        s = a + (b - a) * nodes
        if kind is Quadrature.TRAPEZOID:
            # endpoints sit on breakpoints: take the one-sided limit from inside the segment
            eps = 1e-13 * (b - a)
            s[0], s[-1] = a + eps, b - eps
        vals = np.array([evaluate(si) for si in s])
        total += (b - a) * weights @ vals
        s_all.append(s)
        m_all.append(vals)
    return total, s_all, m_all


def nu_from_mu(p: float, q: float, n: int, t: float, mu_estimator, order: int = 64,
               quadrature: Quadrature | str = Quadrature.GAUSS_LEGENDRE, breakpoints=(),
               geometric_cutoffs: bool = True) -> NuResult:
    """Integrate a sphere-measure tail estimate into a ball-measure tail.

    ``mu_estimator(threshold)`` must return ``mu(||u||_{L_q^n} > threshold)``,
    either as a float or as a ``(value, ci_low, ci_high)`` triple. For a fixed
    ``t`` the radius ``r`` corresponds to ``threshold = t / r``.

    Quadrature runs on the ``s = r^n`` scale, composite over the segments cut by
    ``breakpoints`` (given as radii). When ``geometric_cutoffs`` is set, the
    integrand is taken as exactly 0 where ``t/r`` exceeds the largest possible
    norm and exactly 1 where ``t/r < 1`` (every point of the sphere has
    normalized q-norm at least 1 when ``q >= p``).

    The band ``[low, high]`` integrates the estimator's interval endpoints and
    widens both sides by the quadrature error. That error is estimated as the
    change when the order is halved.
    """
    if order < 2:
        raise ValueError("quadrature order must be >= 2")
    if t < 0:
        raise ValueError("t must be non-negative")
    kind = Quadrature(quadrature)

    fixed = 0.0  # contribution of the region where mu == 1 exactly
    lo_s, hi_s = 0.0, 1.0
    if geometric_cutoffs:
        if t == 0:
            lo_s = hi_s = 1.0
            fixed = 1.0
        else:
            lo_s = min(1.0, (t / norm_cap(p, q, n)) ** n)
            if t < 1.0:
                hi_s = max(lo_s, t**n)
                fixed = 1.0 - hi_s
    cuts = {lo_s, hi_s}
    for r in breakpoints:
        s = float(r) ** n
        if lo_s < s < hi_s:
            cuts.add(s)
    cuts = sorted(cuts)
    segments = [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]

    def evaluate(s):
        if s <= 0.0:
            return (0.0, 0.0, 0.0)
        return _as_triple(mu_estimator(t * s ** (-1.0 / n)))

    total, s_all, m_all = _integrate(segments, kind, order, evaluate)
    half = max(2, order // 2)
    coarse, _, _ = _integrate(segments, kind, half, evaluate) if segments else (np.zeros(3), [], [])
    qerr = float(abs(total[0] - coarse[0])) if segments else 0.0

    value = fixed + total[0]
    low = max(0.0, fixed + total[1] - qerr)
    high = min(1.0, fixed + total[2] + qerr)

    if s_all:
        s_cat = np.concatenate(s_all)
        m_cat = np.concatenate(m_all)
        order_idx = np.argsort(s_cat)
        radii = s_cat[order_idx] ** (1.0 / n)
        mv = m_cat[order_idx]
    else:
        radii, mv = np.empty(0), np.empty((0, 3))
    profile = RadialProfile(radii, mv[:, 0], mv[:, 1], mv[:, 2], kind)
    return NuResult(float(value), float(low), float(high), qerr, profile)


def nu_from_empirical(tail: EmpiricalTail, t: float, n: int) -> float:
    """Exact radial integral of the step-function estimate held by ``tail``.

    Each draw ``R_j`` contributes ``int_0^1 1[R_j > t s^{-1/n}] ds = 1 - min(1, (t/R_j)^n)``.
    """
    r = tail.sorted
    if t <= 0:
        return 1.0
    with np.errstate(divide="ignore"):
        contrib = 1.0 - np.minimum(1.0, np.exp(n * (math.log(t) - np.log(r))))
    return float(contrib.mean())


@dataclass(frozen=True)
class RadialCheck:
    ks: KSResult

    @property
    def statistic(self) -> float:
        return self.ks.statistic

    @property
    def underpowered(self) -> bool:
        return self.ks.underpowered

    @property
    def rejects(self) -> bool:
        return not self.ks.passed


def radial_cdf_check(p: float, n: int, samples, level: float = 1e-3) -> RadialCheck:
    """KS test that ``(sum |coords|^p)^{n/p}`` is uniform on (0, 1) for small-ell ball samples.

    ``samples`` may be a batched :class:`SpherePoint`, a list of single points,
    or an array of shape ``(m, n)``. Big-L points are rescaled to small-ell.
    """
    if isinstance(samples, SpherePoint):
        coords = np.atleast_2d(samples.coords)
        if samples.convention.normalization is Normalization.BIG_L:
            coords = coords / samples.convention.scale
    elif isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], SpherePoint):
        coords = np.array([s.coords / s.convention.scale for s in samples])
    else:
        coords = np.atleast_2d(np.asarray(samples, dtype=float))
    if coords.size == 0:
        raise ValueError("radial_cdf_check needs at least one sample")
    stat = (np.abs(coords) ** p).sum(axis=1) ** (n / p)
    return RadialCheck(ks_test(stat, lambda x: np.clip(x, 0.0, 1.0), level))
