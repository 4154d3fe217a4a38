"""Binomial intervals and goodness-of-fit tests used throughout the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

# KS samples smaller than this are reported as underpowered
MIN_KS_SAMPLES = 50


def clopper_pearson(hits: int, trials: int, level: float = 0.99) -> tuple[float, float]:
    """Exact binomial confidence interval for ``hits / trials``.

    Two-sided at ``level`` in general; when ``hits`` is 0 (or ``trials``) the
    open side is dropped and the one-sided limit at ``level`` is returned.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= hits <= trials:
        raise ValueError("hits must lie in [0, trials]")
    alpha = 1.0 - level
    if hits == 0:
        return 0.0, float(-np.expm1(np.log(alpha) / trials))
    if hits == trials:
        return float(np.exp(np.log(alpha) / trials)), 1.0
    lo = stats.beta.ppf(alpha / 2, hits, trials - hits + 1)
    hi = stats.beta.ppf(1 - alpha / 2, hits + 1, trials - hits)
    return float(lo), float(hi)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float
    critical: float
    samples: int
    level: float
    underpowered: bool

    @property
    def passed(self) -> bool:
        return self.statistic <= self.critical


def ks_test(data, cdf, level: float = 1e-3) -> KSResult:
    """One-sample Kolmogorov–Smirnov test of ``data`` against a vectorised ``cdf``."""
    data = np.asarray(data, dtype=float).ravel()
    if data.size == 0:
        raise ValueError("KS test needs at least one sample")
    res = stats.kstest(data, cdf)
    crit = float(stats.kstwo.ppf(1.0 - level, data.size))
    return KSResult(float(res.statistic), float(res.pvalue), crit, int(data.size), level,
                    data.size < MIN_KS_SAMPLES)


def ks_two_sample(a, b, level: float = 1e-3) -> KSResult:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    res = stats.ks_2samp(a, b)
    en = a.size * b.size / (a.size + b.size)
    crit = float(stats.kstwo.ppf(1.0 - level, max(1, round(en))))
    return KSResult(float(res.statistic), float(res.pvalue), crit, int(min(a.size, b.size)), level,
                    min(a.size, b.size) < MIN_KS_SAMPLES)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    pvalue: float
    dof: int
    level: float

    @property
    def passed(self) -> bool:
        return self.pvalue > self.level


def chi2_independence(a, b, bins: int = 10, level: float = 1e-3) -> ChiSquareResult:
    """Chi-square test of independence on an empirical ``bins x bins`` quantile grid."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size or a.size < bins * bins:
        raise ValueError("need paired samples with at least bins**2 entries")
    qs = np.linspace(0, 1, bins + 1)[1:-1]
    ia = np.searchsorted(np.quantile(a, qs), a, side="right")
    ib = np.searchsorted(np.quantile(b, qs), b, side="right")
    table = np.zeros((bins, bins), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    stat, pval, dof, _ = stats.chi2_contingency(table, correction=False)
    return ChiSquareResult(float(stat), float(pval), int(dof), level)
