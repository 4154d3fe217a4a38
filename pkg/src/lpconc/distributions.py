"""The p-exponential family: density ``c_p * exp(-t**p)`` on ``(0, inf)``.

If ``x`` has this density then ``x**p`` is Gamma(1/p, 1). Sampling, the
Laplace transform of ``x**p``, two-sided tail bounds and moments all follow
from that fact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS

__all__ = [
    "PExponentialSpec",
    "TailBoundPair",
    "ln_gamma",
    "normalizing_constant",
    "sample_p_exponential",
    "laplace_transform_xp",
    "laplace_bounds_xp",
    "tail_bounds_xp",
    "moment_xq",
    "log_moment_xq",
    "qnorm_regime_scale",
    "expected_qnorm_envelope",
]


def ln_gamma(x: float) -> float:
    """``ln Γ(x)`` for finite ``x > 0``."""
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise ValueError(f"ln_gamma requires a finite positive argument, got {x!r}")
    return math.lgamma(x)


def normalizing_constant(p: float) -> float:
    """``c_p = p / Γ(1/p) = 1 / Γ(1 + 1/p)``."""
    if not p > 0 or not math.isfinite(p):
        raise ValueError(f"p must be a finite positive number, got {p!r}")
    return math.exp(-ln_gamma(1.0 + 1.0 / p))


@dataclass(frozen=True)
class PExponentialSpec:
    """Shape parameter of a p-exponential variable.

    ``c_p`` is derived from ``p`` on access and never stored. Values ``p < 1``
    are accepted but flagged by :attr:`caveat`: the upper tail bound and the
    large-deviation constants with explicit ``1/p`` scaling assume ``p >= 1``.
    """

    p: float

    def __post_init__(self):
        if not self.p > 0 or not math.isfinite(self.p):
            raise ValueError(f"p must be a finite positive number, got {self.p!r}")

    @property
    def c_p(self) -> float:
        return normalizing_constant(self.p)

    @property
    def caveat(self) -> bool:
        return self.p < 1

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, self.c_p * np.exp(-np.abs(t) ** self.p), 0.0)


@dataclass(frozen=True)
class TailBoundPair:
    lower: float
    upper: float
    upper_valid: bool


def _uniform_open(stream: np.random.Generator, size):
    # (0, 1]: never returns exactly zero
    return 1.0 - stream.random(size)


def sample_p_exponential(spec: PExponentialSpec, stream: np.random.Generator, size=None):
    """Draw from the density ``c_p exp(-t^p)``.

    The draw is ``G ** (1/p)`` with ``G ~ Gamma(1/p)``. Shapes below one are
    handled by the boost identity ``Gamma(a) = Gamma(a + 1) * U ** (1/a)``. After
    the ``1/p`` power this reads ``x = Gamma(1 + 1/p) ** (1/p) * U``, so tiny
    shapes never underflow. ``p = 1`` and ``p = 2`` use the exact shortcuts
    Exp(1) and ``|N(0, 1/2)|``.

    Returns a float when ``size`` is None, otherwise an array of that shape.
    """
    p = spec.p
    shape = () if size is None else size
    if p == 1.0:
        x = stream.standard_exponential(shape)
    elif p == 2.0:
        x = np.abs(stream.standard_normal(shape)) * math.sqrt(0.5)
    elif p > 1.0:
        g = stream.standard_gamma(1.0 + 1.0 / p, shape)
        x = g ** (1.0 / p) * _uniform_open(stream, shape)
    else:
        x = stream.standard_gamma(1.0 / p, shape) ** (1.0 / p)
    if size is None:
        return float(x)
    return x


def laplace_transform_xp(h: float, p: float) -> float:
    """``E exp(-h x^p) = (1 + h) ** (-1/p)``."""
    if h < 0:
        raise ValueError("h must be non-negative")
    if not p > 0:
        raise ValueError("p must be positive")
    return math.exp(-math.log1p(h) / p)


def laplace_bounds_xp(h: float, p: float) -> tuple[float, float | None]:
    """Exponential sandwich for the Laplace transform.

    The lower bound ``exp(-h/p)`` holds for every ``h > 0``; the upper bound
    ``exp(-h/(2p))`` only for ``0 < h <= 1`` and is ``None`` outside that range.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    lower = math.exp(-h / p)
    upper = math.exp(-h / (2.0 * p)) if h <= 1.0 else None
    return lower, upper


def tail_bounds_xp(u: float, spec: PExponentialSpec) -> TailBoundPair:
    """Lower and upper bounds on ``P(x^p > u)``.

    ``lower = (c_p / 2p) e^{-2u}`` for all ``u > 0``. For ``p >= 1, u >= 1`` the
    upper bound is ``(c_p / p) e^{-u/2}``; otherwise the universal form
    ``C e^{-u/2}`` with ``C = CONSTANTS.tail_C``, clipped to 1. The universal form
    is only claimed for ``p >= 1``, so ``upper_valid`` is False when ``p < 1``.
    """
    if not u > 0:
        raise ValueError("u must be positive")
    p, cp = spec.p, spec.c_p
    lower = cp / (2.0 * p) * math.exp(-2.0 * u)
    if p >= 1 and u >= 1:
        upper = cp / p * math.exp(-u / 2.0)
    else:
        upper = CONSTANTS.tail_C * math.exp(-u / 2.0)
    upper = min(1.0, upper)
    return TailBoundPair(lower=min(lower, 1.0), upper=upper, upper_valid=p >= 1)


def log_moment_xq(p: float, q: float) -> float:
    """``ln E x^q``."""
    if not p > 0:
        raise ValueError("p must be positive")
    if q < 0:
        raise ValueError("q must be non-negative")
    return -ln_gamma(1.0 + 1.0 / p) - math.log(p) + ln_gamma((q + 1.0) / p)


def moment_xq(p: float, q: float) -> float:
    """``E x^q = (c_p / p) Γ((q + 1) / p)``, evaluated in log space.

    Returns ``inf`` when the moment itself exceeds the float range; use
    :func:`log_moment_xq` there.
    """
    lm = log_moment_xq(p, q)
    return math.exp(lm) if lm < 709.0 else math.inf


def qnorm_regime_scale(p: float, q: float, n: int) -> float:
    """Order of ``E (sum x_i^q)^{1/q}``: ``q^{1/p} n^{1/q}`` if ``q <= ln n``, else ``(ln n)^{1/p}``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 1 <= p <= q < math.inf:
        raise ValueError("need 1 <= p <= q < inf")
    ln_n = math.log(n)
    if q <= ln_n:
        return q ** (1.0 / p) * n ** (1.0 / q)
    return ln_n ** (1.0 / p)


def expected_qnorm_envelope(p: float, q: float, n: int) -> tuple[float, float]:
    """``(kappa1 * M, kappa2 * M)`` with ``M = qnorm_regime_scale(p, q, n)``."""
    m = qnorm_regime_scale(p, q, n)
    return CONSTANTS.kappa1 * m, CONSTANTS.kappa2 * m
