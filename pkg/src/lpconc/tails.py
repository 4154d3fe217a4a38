"""Monte Carlo tail probabilities for normalized norms on l_p spheres and balls.

Estimated quantities::

    mu(||u||_{L_q^n} > t)   u uniform on the positive quadrant of the L_p^n sphere
    nu(||u||_{L_q^n} > t)   u uniform in the L_p^n ball

The sphere measure is sampled through the ratio statistic of i.i.d.
p-exponential vectors, and the ball measure through explicit ball points. Each
estimate carries an exact (Clopper–Pearson) interval. Analytic envelopes of the
form ``exp(-c t^p n^{p/q})`` use the frozen constants in
:mod:`lpconc.constants`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constants import CONSTANTS
from .samplers import _pow, p_exponential_rows, sample_ball
from .stats import clopper_pearson
from .streams import batch_rows, chunk_sizes, make_stream

__all__ = [
    "Body",
    "TailQuery",
    "TailEstimate",
    "BoundEnvelope",
    "InsufficientDataError",
    "EmpiricalTail",
    "FitPoint",
    "ExponentFit",
    "threshold_T",
    "decay_constants",
    "bound_envelope",
    "envelope_grid",
    "sample_statistics",
    "tail_counts",
    "estimate_tail",
    "estimate_tail_grid",
    "fit_exponent",
    "infinity_norm_tail",
]

CI_LEVEL = 0.99
MIN_FIT_HITS = 50
# below this n the large-n statements are unverified
MIN_VERIFIED_N = 64


class Body(str, Enum):
    MU_SPHERE = "mu-sphere"
    NU_BALL = "nu-ball"


def _inv(q: float) -> float:
    return 0.0 if math.isinf(q) else 1.0 / q


def norm_cap(p: float, q: float, n: int) -> float:
    """Largest value of ``||u||_{L_q^n}`` on the L_p^n sphere, attained at ``n^{1/p} e_1``."""
    return n ** (1.0 / p - _inv(q))


def exponent_arg(p: float, q: float, n: int, t: float) -> float:
    """``t^p n^{p/q}``; the ``n`` factor is 1 for ``q = inf``."""
    return t**p * n ** (p * _inv(q))


def threshold_T(p: float, q: float, n: int) -> float:
    """``tau * min(q, ln n)^{1/p}``.

    Finite ``q`` uses ``CONSTANTS.tau``; ``q = inf`` uses ``CONSTANTS.tau_inf``
    with ``min(q, ln n) = ln n``. For ``n = 1`` the log term is clamped to a
    tiny positive value, so ``T`` is essentially zero.
    """
    if not p > 0 or not q > 0:
        raise ValueError("p and q must be positive")
    ln_n = max(math.log(n), 1e-300)
    if math.isinf(q):
        return CONSTANTS.tau_inf * ln_n ** (1.0 / p)
    return CONSTANTS.tau * min(q, ln_n) ** (1.0 / p)


def decay_constants(p: float, q: float) -> tuple[float, float, bool]:
    """``(c, C, moreover)`` for the envelope ``exp(-C a) <= P <= exp(-c a)``.

    When ``q > 2p`` the constants are ``gamma_lo / p`` and ``gamma_hi / p``.
    Otherwise (``moreover`` is False) the upper-bound rate is shrunk by
    ``(q/p - 1)``, the order expected when ``q`` approaches ``p``.
    """
    moreover = q > 2 * p
    c = CONSTANTS.gamma_lo / p
    if not moreover:
        c *= max(q / p - 1.0, 0.0)
    return c, CONSTANTS.gamma_hi / p, moreover


@dataclass(frozen=True)
class TailQuery:
    p: float
    q: float
    n: int
    t: float
    body: Body = Body.MU_SPHERE
    allow_degenerate: bool = False  # permits q == p (ratio identically 1); tests only

    def __post_init__(self):
        if not self.p > 0 or not math.isfinite(self.p):
            raise ValueError("p must be a finite positive number")
        if self.q < self.p or (self.q == self.p and not self.allow_degenerate):
            raise ValueError("q must exceed p")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.t > 0:
            raise ValueError("t must be positive")
        object.__setattr__(self, "body", Body(self.body))

    @property
    def caveat(self) -> bool:
        return self.p < 1

    @property
    def cap(self) -> float:
        return norm_cap(self.p, self.q, self.n)

    @property
    def T(self) -> float:
        return threshold_T(self.p, self.q, self.n)

    @property
    def upper_valid(self) -> bool:
        return self.t > self.T

    @property
    def lower_valid(self) -> bool:
        return 2.0 <= self.t <= 0.5 * self.cap

    @property
    def n_verified(self) -> bool:
        return self.n >= MIN_VERIFIED_N


@dataclass(frozen=True)
class TailEstimate:
    hits: int
    trials: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    chunks: int
    level: float = CI_LEVEL

    @classmethod
    def from_counts(cls, hits: int, trials: int, seed: int, chunks: int, level: float = CI_LEVEL):
        lo, hi = clopper_pearson(int(hits), int(trials), level)
        p_hat = hits / trials
        return cls(int(hits), int(trials), p_hat, min(lo, p_hat), max(hi, p_hat), seed, chunks, level)


@dataclass(frozen=True)
class BoundEnvelope:
    exponent_arg: float
    lower: float
    upper: float
    c_used: float
    C_used: float
    T_used: float
    upper_valid: bool
    lower_valid: bool
    moreover: bool
    caveat: bool
    n_verified: bool
    beyond_cap: bool


def bound_envelope(query: TailQuery) -> BoundEnvelope:
    p, q, n, t = query.p, query.q, query.n, query.t
    arg = exponent_arg(p, q, n, t)
    c, C, moreover = decay_constants(p, q)
    beyond = t >= query.cap
    if beyond:
        lower = upper = 0.0
    else:
        lower, upper = math.exp(-C * arg), math.exp(-c * arg)
    return BoundEnvelope(arg, lower, upper, c, C, query.T, query.upper_valid, query.lower_valid,
                         moreover, query.caveat, query.n_verified, beyond)


def envelope_grid(p: float, q: float, n: int, points: int = 6, floor: float = 1e-5) -> list[float]:
    """Evenly spaced ``t`` values in the two-sided validity window where the lower envelope is at least ``floor``.

    The window is ``max(2, T) < t <= cap / 2``. Returns an empty list when the
    restriction leaves nothing, which happens in the deep-tail regime.
    """
    _, C, _ = decay_constants(p, q)
    T = threshold_T(p, q, n)
    lo = max(2.0, np.nextafter(T, math.inf))
    hi = 0.5 * norm_cap(p, q, n)
    # exp(-C t^p n^{p/q}) >= floor
    t_floor = (math.log(1.0 / floor) / (C * n ** (p * _inv(q)))) ** (1.0 / p)
    hi = min(hi, t_floor)
    if hi <= lo:
        return []
    if points == 1:
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, points)]


# ---------------------------------------------------------------------------
# sampling kernels


def _ratio_rows(x, p, q):
    n = x.shape[1]
    top = float(x.max())
    if not math.isinf(q) and top > 0 and max(p, q) * math.log(max(top, 1.0)) < 600.0:
        y = x  # no overflow possible; skip the row-max rescaling
    else:
        y = x / x.max(axis=1)[:, None]
    sp = _pow(y, p).sum(axis=1) ** (1.0 / p)
    if math.isinf(q):
        return n ** (1.0 / p) / sp
    if q == p:
        return sp / sp
    return n ** (1.0 / p - 1.0 / q) * _pow(y, q).sum(axis=1) ** (1.0 / q) / sp


def _ball_norm_rows(coords, q):
    a = np.abs(coords)
    m = a.max(axis=1)
    if math.isinf(q):
        return m
    safe = np.where(m > 0, m, 1.0)
    return m * _pow(a / safe[:, None], q).mean(axis=1) ** (1.0 / q)


def _chunk_statistics(p, q, n, body, rows, seed, chunk):
    stream = make_stream(seed, chunk, family=0 if body is Body.MU_SPHERE else 1)
    out = np.empty(rows)
    step = batch_rows(n)
    for start in range(0, rows, step):
        k = min(step, rows - start)
        if body is Body.MU_SPHERE:
            out[start:start + k] = _ratio_rows(p_exponential_rows(p, n, stream, k), p, q)
        else:
            pts = sample_ball(p, n, "big-L", stream, size=k)
            out[start:start + k] = _ball_norm_rows(pts.coords, q)
    return out


def _chunk_counts(args):
    p, q, n, body, rows, seed, chunk, thresholds = args
    stats_ = _chunk_statistics(p, q, n, body, rows, seed, chunk)
    return np.array([(stats_ > t).sum() for t in thresholds], dtype=np.int64)


def _chunk_stats_job(args):
    p, q, n, body, rows, seed, chunk = args
    return _chunk_statistics(p, q, n, body, rows, seed, chunk)


def _run(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def sample_statistics(p: float, q: float, n: int, trials: int, seed: int, body: Body | str = Body.MU_SPHERE,
                      chunks: int = 1, workers: int = 1) -> np.ndarray:
    """All ``trials`` draws of the tail statistic, concatenated in chunk order."""
    body = Body(body)
    sizes = chunk_sizes(trials, chunks)
    jobs = [(p, q, n, body, sizes[k], seed, k) for k in range(chunks)]
    return np.concatenate(_run(_chunk_stats_job, jobs, workers))


def tail_counts(p: float, q: float, n: int, thresholds, trials: int, seed: int,
                body: Body | str = Body.MU_SPHERE, chunks: int = 1, workers: int = 1) -> np.ndarray:
    """Exceedance counts ``#{stat > t}`` for each threshold, without keeping the draws."""
    body = Body(body)
    thresholds = [float(t) for t in thresholds]
    sizes = chunk_sizes(trials, chunks)
    jobs = [(p, q, n, body, sizes[k], seed, k, thresholds) for k in range(chunks)]
    return np.sum(_run(_chunk_counts, jobs, workers), axis=0)


def estimate_tail(query: TailQuery, trials: int, seed: int, chunks: int = 1, workers: int = 1) -> TailEstimate:
    """Estimate ``mu`` or ``nu`` of ``{||u||_{L_q^n} > t}`` with a 99% Clopper–Pearson interval."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = tail_counts(query.p, query.q, query.n, [query.t], trials, seed, query.body, chunks, workers)[0]
    return TailEstimate.from_counts(hits, trials, seed, chunks)


def estimate_tail_grid(p: float, q: float, n: int, t_grid, trials: int, seed: int,
                       body: Body | str = Body.MU_SPHERE, chunks: int = 1, workers: int = 1) -> list[TailEstimate]:
    """Estimates at every ``t`` in ``t_grid`` from one shared population of draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    counts = tail_counts(p, q, n, t_grid, trials, seed, body, chunks, workers)
    return [TailEstimate.from_counts(h, trials, seed, chunks) for h in counts]


def infinity_norm_tail(p: float, n: int, t: float, trials: int, seed: int, chunks: int = 1,
                       workers: int = 1) -> TailEstimate:
    """``mu(||u||_inf > t)``: the ratio statistic with ``q = inf``, i.e. ``n^{1/p} max x_i / S``."""
    return estimate_tail(TailQuery(p, math.inf, n, t), trials, seed, chunks, workers)


class EmpiricalTail:
    """Exceedance probabilities of one sample population, at any threshold.

    Calling the object with a threshold ``s`` returns ``(p_hat, ci_low,
    ci_high)`` for ``P(stat > s)``. Estimates at different thresholds share
    the same draws, so the curve is monotone.
    """

    def __init__(self, statistics, seed: int = 0, chunks: int = 1, level: float = CI_LEVEL):
        self.sorted = np.sort(np.asarray(statistics, dtype=float))
        self.trials = self.sorted.size
        if self.trials == 0:
            raise ValueError("empty sample population")
        self.seed, self.chunks, self.level = seed, chunks, level

    def hits(self, threshold: float) -> int:
        return int(self.trials - np.searchsorted(self.sorted, threshold, side="right"))

    def estimate(self, threshold: float) -> TailEstimate:
        return TailEstimate.from_counts(self.hits(threshold), self.trials, self.seed, self.chunks, self.level)

    def __call__(self, threshold: float) -> tuple[float, float, float]:
        e = self.estimate(threshold)
        return e.p_hat, e.ci_low, e.ci_high


# ---------------------------------------------------------------------------
# exponent fitting


@dataclass(frozen=True)
class FitPoint:
    t: float
    exponent_arg: float
    estimate: TailEstimate
    in_window: bool
    admissible: bool
    reason: str = ""

    @property
    def rate(self) -> float:
        """``-ln(p_hat) / exponent_arg``; infinite when no hits."""
        e = self.estimate
        return math.inf if e.hits == 0 else -math.log(e.p_hat) / self.exponent_arg

    @property
    def rate_low(self) -> float:
        return -math.log(self.estimate.ci_high) / self.exponent_arg

    @property
    def rate_high(self) -> float:
        lo = self.estimate.ci_low
        return math.inf if lo <= 0 else -math.log(lo) / self.exponent_arg


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    slope_low: float
    slope_high: float
    points: list = field(default_factory=list)

    @property
    def used(self) -> list:
        return [pt for pt in self.points if pt.admissible]


class InsufficientDataError(ValueError):
    """Raised by :func:`fit_exponent` when fewer than two grid points carry enough hits."""

    def __init__(self, message: str, table: list):
        super().__init__(message)
        self.table = table


def _origin_slope(a, y):
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.dot(a, y) / np.dot(a, a))


def fit_exponent(p: float, q: float, n: int, t_grid, trials: int, seed: int, *,
                 body: Body | str = Body.MU_SPHERE, chunks: int = 1, workers: int = 1,
                 min_hits: int = MIN_FIT_HITS, require_window: bool = True,
                 estimates: list[TailEstimate] | None = None) -> ExponentFit:
    """Empirical decay rate ``c`` in ``P(||u||_q > t) ~ exp(-c t^p n^{p/q})``.

    Least squares through the origin of ``-ln p_hat`` against ``t^p n^{p/q}``
    over grid points with at least ``min_hits`` hits. ``slope_low`` and
    ``slope_high`` repeat the fit on the interval endpoints. Pass precomputed
    ``estimates`` (aligned with ``t_grid``) to skip sampling. With
    ``require_window`` every grid point must lie in ``[max(2, T), cap/2]``.
    """
    t_grid = [float(t) for t in t_grid]
    T = threshold_T(p, q, n)
    lo_w, hi_w = max(2.0, T), 0.5 * norm_cap(p, q, n)
    in_window = [lo_w <= t <= hi_w for t in t_grid]
    if require_window and not all(in_window):
        bad = [t for t, ok in zip(t_grid, in_window) if not ok]
        raise ValueError(f"t values {bad} lie outside the validity window [{lo_w:.6g}, {hi_w:.6g}]")
    if estimates is None:
        estimates = estimate_tail_grid(p, q, n, t_grid, trials, seed, body, chunks, workers)
    table = []
    for t, est, ok in zip(t_grid, estimates, in_window):
        enough = est.hits >= min_hits
        table.append(FitPoint(t, exponent_arg(p, q, n, t), est, ok, enough,
                              "" if enough else f"hits {est.hits} < {min_hits}"))
    used = [pt for pt in table if pt.admissible]
    if len(used) < 2:
        raise InsufficientDataError(f"only {len(used)} grid point(s) with >= {min_hits} hits", table)
    a = [pt.exponent_arg for pt in used]
    slope = _origin_slope(a, [-math.log(pt.estimate.p_hat) for pt in used])
    s_lo = _origin_slope(a, [-math.log(pt.estimate.ci_high) for pt in used])
    s_hi = _origin_slope(a, [-math.log(pt.estimate.ci_low) for pt in used])
    return ExponentFit(slope, s_lo, s_hi, table)
