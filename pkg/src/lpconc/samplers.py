"""Exact uniform sampling on l_p spheres and balls, plus normalized norms.

With ``x_1..x_n`` i.i.d. p-exponential and ``S = (sum x_i^p)^{1/p}``, the
vector ``x / S`` is uniform on the positive quadrant of the unit l_p sphere
(normalized cone measure) and is independent of ``S``. Independent signs give
the full sphere. A radial factor ``U^{1/n}`` gives the ball.

Two scalings are in use. ``small-ell`` is the unit ball ``sum |t_i|^p <= 1``.
``big-L`` is the normalized ball ``n^{-1} sum |t_i|^p <= 1``, which is
``n^{1/p}`` times larger.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .distributions import PExponentialSpec, sample_p_exponential

log = logging.getLogger(__name__)

__all__ = [
    "Normalization",
    "Region",
    "BodyConvention",
    "SpherePoint",
    "p_exponential_rows",
    "sample_quadrant_sphere",
    "sample_full_sphere",
    "sample_ball",
    "big_l_norm",
    "ratio_statistic",
]


class Normalization(str, Enum):
    SMALL_ELL = "small-ell"
    BIG_L = "big-L"


class Region(str, Enum):
    QUADRANT_SPHERE = "quadrant-sphere"
    FULL_SPHERE = "full-sphere"
    FULL_BALL = "full-ball"


@dataclass(frozen=True)
class BodyConvention:
    p: float
    n: int
    normalization: Normalization = Normalization.SMALL_ELL
    region: Region = Region.QUADRANT_SPHERE

    @property
    def scale(self) -> float:
        """Factor taking small-ell coordinates to this convention."""
        return self.n ** (1.0 / self.p) if self.normalization is Normalization.BIG_L else 1.0


@dataclass(frozen=True)
class SpherePoint:
    """One sample, or a batch of samples along the leading axes of ``coords``.

    ``source_S`` is the l_p norm of the raw p-exponential vector that produced
    the direction. It plays no role in the geometry and is retained so that
    independence of direction and radius can be tested.
    """

    coords: np.ndarray
    convention: BodyConvention
    source_S: float | np.ndarray

    def to_big_l(self) -> "SpherePoint":
        if self.convention.normalization is Normalization.BIG_L:
            return self
        conv = replace(self.convention, normalization=Normalization.BIG_L)
        return SpherePoint(self.coords * conv.scale, conv, self.source_S)


def _pow(y, r):
    if r == 1.0:
        return y
    if r == 2.0:
        return y * y
    if r == 4.0:
        y2 = y * y
        return y2 * y2
    return y**r


def p_exponential_rows(p: float, n: int, stream: np.random.Generator, rows: int) -> np.ndarray:
    """``rows`` i.i.d. p-exponential vectors of length ``n``, shape ``(rows, n)``.

    Rows that are identically zero (a probability-zero event) are redrawn.
    """
    spec = PExponentialSpec(p)
    x = sample_p_exponential(spec, stream, (rows, n))
    bad = ~np.any(x > 0, axis=1)
    while bad.any():
        log.warning("redrawing %d all-zero p-exponential rows", int(bad.sum()))
        x[bad] = sample_p_exponential(spec, stream, (int(bad.sum()), n))
        bad = ~np.any(x > 0, axis=1)
    return x


def _check_pn(p, n):
    if not p > 0 or not math.isfinite(p):
        raise ValueError("p must be a finite positive number")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")


def _quadrant(p, n, stream, rows):
    x = p_exponential_rows(p, n, stream, rows)
    m = x.max(axis=1)
    S = m * _pow(x / m[:, None], p).sum(axis=1) ** (1.0 / p)
    return x / S[:, None], S


def _finish(coords, S, conv, size):
    if size is None:
        return SpherePoint(coords[0], conv, float(S[0]))
    return SpherePoint(coords, conv, S)


def sample_quadrant_sphere(p: float, n: int, stream: np.random.Generator, size: int | None = None) -> SpherePoint:
    """Uniform point(s) on ``{t_i >= 0, sum t_i^p = 1}`` (small-ell scale)."""
    _check_pn(p, n)
    coords, S = _quadrant(p, n, stream, 1 if size is None else size)
    assert np.all(coords >= 0)
    assert np.allclose(_pow(coords, p).sum(axis=1), 1.0, rtol=1e-9, atol=0)
    conv = BodyConvention(p, n, Normalization.SMALL_ELL, Region.QUADRANT_SPHERE)
    return _finish(coords, S, conv, size)


def _signs(stream, shape):
    return 2.0 * stream.integers(0, 2, size=shape, dtype=np.int8) - 1.0


def sample_full_sphere(p: float, n: int, stream: np.random.Generator, size: int | None = None) -> SpherePoint:
    """Uniform point(s) on the full small-ell sphere: quadrant point times independent signs."""
    _check_pn(p, n)
    rows = 1 if size is None else size
    coords, S = _quadrant(p, n, stream, rows)
    coords = coords * _signs(stream, coords.shape)
    conv = BodyConvention(p, n, Normalization.SMALL_ELL, Region.FULL_SPHERE)
    return _finish(coords, S, conv, size)


def sample_ball(p: float, n: int, convention: Normalization | str, stream: np.random.Generator,
                size: int | None = None) -> SpherePoint:
    """Uniform point(s) in the l_p ball under the requested normalization.

    The direction comes from :func:`sample_full_sphere` and the radius is
    ``R = U^{1/n}``, computed as ``exp(log(U)/n)``.
    """
    _check_pn(p, n)
    norm = Normalization(convention)
    rows = 1 if size is None else size
    coords, S = _quadrant(p, n, stream, rows)
    coords = coords * _signs(stream, coords.shape)
    u = 1.0 - stream.random(rows)
    radius = np.exp(np.log(u) / n)
    coords = coords * radius[:, None]
    conv = BodyConvention(p, n, norm, Region.FULL_BALL)
    if norm is Normalization.BIG_L:
        coords = coords * conv.scale
    assert np.all(_pow(np.abs(coords), p).sum(axis=1) / (n if norm is Normalization.BIG_L else 1) <= 1.0 + 1e-12)
    return _finish(coords, S, conv, size)


def big_l_norm(u, r: float) -> float | np.ndarray:
    """Normalized norm ``(n^{-1} sum |u_i|^r)^{1/r}`` along the last axis; ``r = inf`` gives ``max |u_i|``."""
    a = np.abs(np.asarray(u, dtype=float))
    if a.ndim == 0 or a.shape[-1] == 0:
        raise ValueError("big_l_norm requires a non-empty vector")
    if not np.all(np.isfinite(a)):
        raise ValueError("entries must be finite")
    if not (r > 0):
        raise ValueError("r must be positive or inf")
    m = a.max(axis=-1)
    if math.isinf(r):
        out = m
    else:
        safe = np.where(m > 0, m, 1.0)
        y = a / np.expand_dims(safe, -1)
        out = m * _pow(y, r).mean(axis=-1) ** (1.0 / r)
    return float(out) if np.ndim(out) == 0 else out


def ratio_statistic(x, p: float, q: float) -> float | np.ndarray:
    """``n^{1/p - 1/q} ||x||_q / ||x||_p`` along the last axis.

    Under i.i.d. p-exponential ``x`` this has the law of the big-L q-norm of a
    uniform point on the big-L p-sphere. Evaluated with the row maximum
    factored out, so large ``q`` does not overflow.
    """
    a = np.asarray(x, dtype=float)
    if a.ndim == 0 or a.shape[-1] == 0:
        raise ValueError("ratio_statistic requires a non-empty vector")
    if np.any(a < 0):
        raise ValueError("entries must be non-negative")
    if not (0 < p <= q):
        raise ValueError("need 0 < p <= q")
    n = a.shape[-1]
    m = a.max(axis=-1)
    if np.any(m == 0):
        raise ValueError("ratio_statistic is undefined for the zero vector")
    y = a / np.expand_dims(m, -1)
    sp = _pow(y, p).sum(axis=-1) ** (1.0 / p)
    if math.isinf(q):
        out = n ** (1.0 / p) / sp
    elif q == p:
        out = n**0.0 * sp / sp
    else:
        out = n ** (1.0 / p - 1.0 / q) * _pow(y, q).sum(axis=-1) ** (1.0 / q) / sp
    return float(out) if np.ndim(out) == 0 else out
