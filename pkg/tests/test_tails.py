import math

import numpy as np
import pytest

from lpconc import CONSTANTS
from lpconc.tails import (
    Body,
    EmpiricalTail,
    InsufficientDataError,
    TailEstimate,
    TailQuery,
    bound_envelope,
    decay_constants,
    envelope_grid,
    estimate_tail,
    estimate_tail_grid,
    exponent_arg,
    fit_exponent,
    infinity_norm_tail,
    norm_cap,
    sample_statistics,
    threshold_T,
)


def test_threshold_T_examples():
    tau = CONSTANTS.tau
    assert threshold_T(1, 10, math.exp(20)) == pytest.approx(10 * tau)
    assert threshold_T(1, 10, math.exp(5)) == pytest.approx(5 * tau)
    assert threshold_T(2, 8, 10**9) <= tau * 8**0.5 + 1e-12
    assert threshold_T(1, math.inf, 1024) == pytest.approx(CONSTANTS.tau_inf * math.log(1024))


def test_query_validation():
    with pytest.raises(ValueError):
        TailQuery(2, 2, 10, 1.0)
    with pytest.raises(ValueError):
        TailQuery(2, 1, 10, 1.0)
    with pytest.raises(ValueError):
        TailQuery(1, 2, 0, 1.0)
    with pytest.raises(ValueError):
        TailQuery(1, 2, 10, 0.0)
    assert TailQuery(2, 2, 10, 1.0, allow_degenerate=True).cap == 1.0
    assert TailQuery(0.5, 2, 10, 1.0).caveat


def test_window_flags():
    q = TailQuery(1, 4, 256, 1.5)
    assert not q.lower_valid and not q.upper_valid
    q = TailQuery(1, 4, 256, 3.0)
    assert q.lower_valid and q.upper_valid
    assert not TailQuery(1, 4, 256, 40.0).lower_valid
    assert not TailQuery(1, 4, 32, 3.0).n_verified


def test_envelope_generic_and_moreover():
    env = bound_envelope(TailQuery(1, 4, 256, 3.0))
    assert env.moreover
    assert env.c_used == pytest.approx(CONSTANTS.gamma_lo) and env.C_used == pytest.approx(CONSTANTS.gamma_hi)
    assert env.exponent_arg == pytest.approx(3.0 * 256**0.25)
    assert env.lower <= env.upper
    env = bound_envelope(TailQuery(1, 1.5, 256, 3.0))
    assert not env.moreover and env.c_used == pytest.approx(CONSTANTS.gamma_lo * 0.5)
    assert env.c_used <= env.C_used


def test_envelope_beyond_cap_is_zero():
    env = bound_envelope(TailQuery(1, 2, 16, 4.5))
    assert env.beyond_cap and env.upper == 0.0 and env.lower == 0.0


def test_infinity_exponent_arg():
    assert exponent_arg(2, math.inf, 1024, 3.0) == pytest.approx(9.0)
    assert norm_cap(2, math.inf, 1024) == pytest.approx(32.0)


def test_decay_constants_shrink_near_p():
    c = [decay_constants(1, q)[0] for q in (1.2, 1.5, 2.0, 2.5)]
    assert c == sorted(c)


def test_envelope_grid_window():
    g = envelope_grid(1, 4, 256)
    assert len(g) == 6
    T = threshold_T(1, 4, 256)
    assert g[0] > T and g[0] >= 2
    assert all(math.exp(-CONSTANTS.gamma_hi * exponent_arg(1, 4, 256, t)) >= 1e-5 * (1 - 1e-12) for t in g)
    assert envelope_grid(1, 2, 1024) == []  # deep tail only


def test_degenerate_q_equals_p():
    lo = estimate_tail(TailQuery(2, 2, 8, 0.9, allow_degenerate=True), 1000, 1)
    hi = estimate_tail(TailQuery(2, 2, 8, 1.1, allow_degenerate=True), 1000, 1)
    assert lo.p_hat == 1.0 and hi.p_hat == 0.0


def test_beyond_cap_zero_hits():
    e = estimate_tail(TailQuery(1, 2, 16, 4.01), 10_000, 2)
    assert e.hits == 0 and e.ci_low == 0.0 and 0 < e.ci_high < 1e-3
    e = infinity_norm_tail(1, 16, 16.01, 10_000, 2)
    assert e.hits == 0


def test_infinity_norm_n1():
    assert infinity_norm_tail(1.5, 1, 1.01, 1000, 3).p_hat == 0.0
    assert infinity_norm_tail(1.5, 1, 0.99, 1000, 3).p_hat == 1.0


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        estimate_tail(TailQuery(1, 2, 4, 1.1), 0, 1)


def test_estimate_invariants():
    e = estimate_tail(TailQuery(1, 4, 64, 1.5), 20_000, 4)
    assert isinstance(e, TailEstimate)
    assert e.ci_low <= e.p_hat <= e.ci_high
    assert e.p_hat == e.hits / e.trials and e.seed == 4 and e.chunks == 1


def test_determinism_across_workers():
    args = (1.0, 4.0, 64, [1.2, 1.5, 2.0], 30_000, 9)
    a = estimate_tail_grid(*args, chunks=6, workers=1)
    b = estimate_tail_grid(*args, chunks=6, workers=3)
    assert a == b


def test_statistics_order_is_chunk_order():
    s1 = sample_statistics(1.0, 3.0, 16, 1000, 5, chunks=4, workers=1)
    s2 = sample_statistics(1.0, 3.0, 16, 1000, 5, chunks=4, workers=2)
    assert np.array_equal(s1, s2)


def test_ball_statistics_bounded():
    s = sample_statistics(1.0, 3.0, 16, 5000, 6, body=Body.NU_BALL)
    assert np.all(s <= norm_cap(1, 3, 16) + 1e-12)


def test_monotone_in_t():
    ests = estimate_tail_grid(1.0, 4.0, 128, np.linspace(1.2, 3.0, 10), 50_000, 7)
    hits = [e.hits for e in ests]
    assert hits == sorted(hits, reverse=True)


def test_empirical_tail_matches_grid():
    stats_ = sample_statistics(1.0, 4.0, 64, 20_000, 8)
    tail = EmpiricalTail(stats_, seed=8)
    grid = estimate_tail_grid(1.0, 4.0, 64, [1.3, 1.8], 20_000, 8)
    assert [tail.hits(t) for t in (1.3, 1.8)] == [e.hits for e in grid]
    v, lo, hi = tail(1.3)
    assert lo <= v <= hi
    with pytest.raises(ValueError):
        EmpiricalTail([])


def test_fit_requires_window():
    with pytest.raises(ValueError):
        fit_exponent(1, 4, 256, [1.0, 3.0], 1000, 1)


def test_fit_insufficient_data_carries_table():
    with pytest.raises(InsufficientDataError) as exc:
        fit_exponent(1, 4, 256, [3.0, 3.3], 2000, 1)
    assert len(exc.value.table) == 2
    assert all(not pt.admissible for pt in exc.value.table)


def test_fit_slope_and_consistency():
    grid = envelope_grid(1, 4, 256, points=4)
    a = fit_exponent(1, 4, 256, grid, 400_000, 21)
    assert a.slope_low <= a.slope <= a.slope_high
    assert len(a.used) >= 2
    b = fit_exponent(1, 4, 256, grid, 800_000, 22)
    assert max(a.slope_low, b.slope_low) <= min(a.slope_high, b.slope_high)


def test_fit_point_rates():
    fit = fit_exponent(1, 4, 256, [2.0, 2.2], 20_000, 3, require_window=False)
    pt = fit.points[0]
    assert pt.rate_low <= pt.rate <= pt.rate_high
    assert not pt.in_window or pt.t >= 2
