import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from lpconc import CONSTANTS
from lpconc.distributions import (
    PExponentialSpec,
    expected_qnorm_envelope,
    laplace_bounds_xp,
    laplace_transform_xp,
    ln_gamma,
    moment_xq,
    normalizing_constant,
    qnorm_regime_scale,
    sample_p_exponential,
    tail_bounds_xp,
)
from lpconc.oracle import reference_tail_xp
from lpconc.streams import make_stream


def test_ln_gamma_values(oracle_values):
    assert ln_gamma(1.0) == 0.0
    assert ln_gamma(2.0) == 0.0
    assert ln_gamma(0.5) == pytest.approx(oracle_values["ln_gamma_half"], rel=1e-14)


@pytest.mark.parametrize("x", np.geomspace(1e-3, 1e3, 25))
def test_ln_gamma_relative_error(x):
    assert ln_gamma(x) == pytest.approx(special.gammaln(x), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_ln_gamma_domain(bad):
    with pytest.raises(ValueError):
        ln_gamma(bad)


def test_normalizing_constant(oracle_values):
    assert normalizing_constant(1.0) == pytest.approx(1.0, rel=1e-15)
    assert normalizing_constant(2.0) == pytest.approx(oracle_values["c2"], rel=1e-14)
    assert 0.99 < normalizing_constant(100.0) < 1.01
    with pytest.raises(ValueError):
        normalizing_constant(0.0)


def test_c_p_range_for_p_at_least_one():
    for p in np.linspace(1, 100, 200):
        assert 0.88 <= normalizing_constant(p) <= 1.13


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0, 10.0])
def test_density_integrates_to_one(p):
    spec = PExponentialSpec(p)
    val, _ = integrate.quad(lambda t: spec.pdf(t), 0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert abs(val - 1.0) < 1e-10


def test_spec_validation_and_caveat():
    with pytest.raises(ValueError):
        PExponentialSpec(-1.0)
    assert PExponentialSpec(0.5).caveat
    assert not PExponentialSpec(1.0).caveat


def test_sample_scalar_and_shape():
    s = make_stream(3)
    x = sample_p_exponential(PExponentialSpec(3.0), s)
    assert isinstance(x, float) and x > 0
    arr = sample_p_exponential(PExponentialSpec(3.0), s, (4, 5))
    assert arr.shape == (4, 5) and np.all(arr > 0)


def test_exponential_cdf_p1():
    x = sample_p_exponential(PExponentialSpec(1.0), make_stream(11), 100_000)
    res = stats.kstest(x, lambda t: 1 - np.exp(-t))
    assert res.statistic < stats.kstwo.ppf(0.999, x.size)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 5.0])
def test_power_is_gamma(p):
    x = sample_p_exponential(PExponentialSpec(p), make_stream(12, int(p * 10)), 100_000)
    res = stats.kstest(x**p, stats.gamma(1.0 / p).cdf)
    assert res.statistic < stats.kstwo.ppf(0.999, x.size)


def test_half_gaussian_mean():
    x = sample_p_exponential(PExponentialSpec(2.0), make_stream(13), 1_000_000)
    se = x.std() / math.sqrt(x.size)
    assert abs(x.mean() - 1 / math.sqrt(math.pi)) < 3 * se
    assert moment_xq(2.0, 1.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)


def test_laplace_transform():
    assert laplace_transform_xp(0.0, 3.0) == 1.0
    assert laplace_transform_xp(1.0, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert laplace_transform_xp(3.0, 2.0) == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ValueError):
        laplace_transform_xp(-0.1, 1.0)


def test_laplace_monte_carlo_h3_p2():
    x = sample_p_exponential(PExponentialSpec(2.0), make_stream(14), 1_000_000)
    v = np.exp(-3 * x**2)
    assert abs(v.mean() - 0.5) < 4 * v.std() / math.sqrt(v.size)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 4.0])
def test_laplace_sandwich(p):
    for h in np.linspace(1e-4, 1.0, 200):
        lo, hi = laplace_bounds_xp(h, p)
        v = laplace_transform_xp(h, p)
        assert lo <= v <= hi
    lo, hi = laplace_bounds_xp(2.0, p)
    assert hi is None and lo <= laplace_transform_xp(2.0, p)


def test_tail_bounds_examples():
    b = tail_bounds_xp(1.0, PExponentialSpec(1.0))
    assert b.lower == pytest.approx(0.5 * math.exp(-2), rel=1e-14)
    assert b.upper == pytest.approx(math.exp(-0.5), rel=1e-14)
    assert b.lower <= math.exp(-1) <= b.upper
    b = tail_bounds_xp(4.0, PExponentialSpec(2.0))
    assert b.lower <= math.erfc(2.0) <= b.upper
    assert tail_bounds_xp(1e-12, PExponentialSpec(1.0)).lower == pytest.approx(0.5)


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_tail_sandwich_grid(p):
    spec = PExponentialSpec(p)
    for u in np.geomspace(1e-3, 50, 40):
        b = tail_bounds_xp(u, spec)
        assert b.upper_valid
        assert 0 <= b.lower <= reference_tail_xp(p, u) <= b.upper <= 1


def test_tail_bounds_caveat_small_p():
    b = tail_bounds_xp(2.0, PExponentialSpec(0.5))
    assert not b.upper_valid
    assert b.upper == pytest.approx(min(1.0, CONSTANTS.tail_C * math.exp(-1.0)))


def test_moments():
    assert moment_xq(1.0, 0.0) == pytest.approx(1.0, rel=1e-14)
    assert moment_xq(1.0, 2.0) == pytest.approx(2.0, rel=1e-14)
    assert moment_xq(2.0, 2.0) == pytest.approx(0.5, rel=1e-14)
    # (q+1)/p far beyond the float range of Gamma: log space keeps it finite
    assert math.isfinite(math.log(moment_xq(1.0, 150.0)))


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_moments_monte_carlo(p):
    x = sample_p_exponential(PExponentialSpec(p), make_stream(15, int(p)), 1_000_000)
    for q in (1.0, 2.0, 4.0):
        v = x**q
        assert abs(v.mean() - moment_xq(p, q)) < 4 * v.std() / math.sqrt(v.size)


def test_regime_scale():
    assert qnorm_regime_scale(1, 10, 100) == pytest.approx(math.log(100))
    n = 64
    assert qnorm_regime_scale(1, 1, n) == pytest.approx(n)  # E sum x_i = n
    n = round(math.exp(4))
    a = 4 ** 0.5 * n ** 0.25
    b = math.log(n) ** 0.5
    assert qnorm_regime_scale(2, 4, n) in (pytest.approx(a), pytest.approx(b))
    # at q = ln n the two forms differ by exactly n^{1/q} = e, a constant factor
    assert a / b == pytest.approx((4 / math.log(n)) ** 0.5 * n ** 0.25)
    assert a / b < math.e * 1.01
    with pytest.raises(ValueError):
        qnorm_regime_scale(1, 2, 1)


def test_expected_qnorm_envelope_order():
    lo, hi = expected_qnorm_envelope(2, 4, 256)
    assert CONSTANTS.kappa1 < 1 < CONSTANTS.kappa2
    assert lo < qnorm_regime_scale(2, 4, 256) < hi


def test_moment_overflow_reports_inf():
    from lpconc.distributions import log_moment_xq

    assert moment_xq(0.2, 50.0) == math.inf
    assert math.isfinite(log_moment_xq(0.2, 50.0))
