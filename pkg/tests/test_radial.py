import math

import numpy as np
import pytest

from lpconc.oracle import exact_small_n
from lpconc.radial import Quadrature, nu_from_empirical, nu_from_mu, radial_cdf_check
from lpconc.samplers import sample_ball, sample_full_sphere
from lpconc.streams import make_stream
from lpconc.tails import EmpiricalTail, norm_cap


def test_full_measure_at_zero():
    r = nu_from_mu(1, 2, 64, 0.0, lambda s: 1.0)
    assert r.value == pytest.approx(1.0, abs=1e-14)
    r = nu_from_mu(1, 2, 64, 0.0, lambda s: 1.0, geometric_cutoffs=False)
    assert r.value == pytest.approx(1.0, abs=1e-12)


def test_zero_above_cap():
    r = nu_from_mu(1, 2, 64, norm_cap(1, 2, 64) * 1.01, lambda s: 1.0)
    assert r.value == 0.0


@pytest.mark.parametrize("kind", list(Quadrature))
@pytest.mark.parametrize("r0", [0.3, 0.77, 0.95])
def test_indicator_closed_form(kind, r0):
    n, t = 40, 1.7
    # mu(t / r) = 1 exactly for r > r0: a threshold step
    def mu(th):
        return 1.0 if th < t / r0 else 0.0

    res = nu_from_mu(1, 2, n, t, mu, order=64, quadrature=kind, breakpoints=[r0], geometric_cutoffs=False)
    assert res.value == pytest.approx(1 - r0**n, abs=1e-10)


def test_order_validation():
    with pytest.raises(ValueError):
        nu_from_mu(1, 2, 8, 1.0, lambda s: 0.5, order=1)


def test_profile_monotone():
    x = np.sort(make_stream(1).random(1000) * 3 + 1)
    tail = EmpiricalTail(x)
    res = nu_from_mu(1, 2, 16, 1.5, tail)
    assert np.all(np.diff(res.profile.mu_values) >= 0)
    assert np.all(np.diff(res.profile.grid) >= 0)
    assert res.low <= res.value <= res.high


def test_empirical_step_integral():
    tail = EmpiricalTail([2.0, 3.0])
    # (1 - (1.5/2)^n + 1 - (1.5/3)^n) / 2
    n = 3
    assert nu_from_empirical(tail, 1.5, n) == pytest.approx((2 - 0.75**3 - 0.5**3) / 2)


def test_radial_against_oracle_n2():
    p, q, t = 1.0, 2.0, 1.2
    exact = exact_small_n(p, q, 2, t, "nu-ball")

    def mu(th):
        r = exact_small_n(p, q, 2, th)
        return r.value, r.value - r.abs_error_bound, r.value + r.abs_error_bound

    res = nu_from_mu(p, q, 2, t, mu, order=48)
    assert abs(res.value - exact.value) <= 1e-6


def test_radial_check_accepts_ball_rejects_sphere():
    ball = sample_ball(1.0, 8, "small-ell", make_stream(2), size=100_000)
    assert not radial_cdf_check(1.0, 8, ball).rejects
    sph = sample_full_sphere(1.0, 8, make_stream(3), size=2000)
    assert radial_cdf_check(1.0, 8, sph).rejects
    small = sample_ball(1.0, 8, "big-L", make_stream(4), size=10)
    chk = radial_cdf_check(1.0, 8, small)
    assert chk.underpowered and math.isfinite(chk.statistic)
    with pytest.raises(ValueError):
        radial_cdf_check(1.0, 8, np.empty((0, 8)))
