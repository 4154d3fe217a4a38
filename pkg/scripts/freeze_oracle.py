"""Freeze oracle reference values into tests/fixtures/oracle_values.json.

Each value is computed by ``lpconc.oracle`` and, where a second route exists,
cross-checked against mpmath at 30 digits before it is written.

    python scripts/freeze_oracle.py
"""

import json
import math
from pathlib import Path

import mpmath as mp

from lpconc.oracle import exact_small_n, reference_tail_xp

mp.mp.dps = 30
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "oracle_values.json"

MU2_CASES = [(1.0, 2.0), (1.0, math.inf), (2.0, 4.0)]
TS = [1.05, 1.2, 1.3]


def mu2_mpmath(p, q, t):
    """mu at n = 2 from the Beta(1/p, 1/p) law of s1^p, with mpmath root finding."""
    p, t = mp.mpf(p), mp.mpf(t)
    inv_q = 0 if math.isinf(q) else 1 / mp.mpf(q)
    level = t / mp.mpf(2) ** (1 / p - inv_q)

    def g(b):  # small-ell q-norm of (b^{1/p}, (1-b)^{1/p}) minus the level
        x, y = b ** (1 / p), (1 - b) ** (1 / p)
        return (max(x, y) if math.isinf(q) else (x**q + y**q) ** inv_q) - level

    # the norm is symmetric about b = 1/2 and largest at the ends
    if g(mp.mpf("0.5")) > 0:
        return mp.mpf(1)
    if g(mp.mpf(0)) <= 0:
        return mp.mpf(0)
    b0 = mp.findroot(g, (mp.mpf(0), mp.mpf("0.5")), solver="anderson")
    a = 1 / p
    return 2 * mp.betainc(a, a, 0, b0, regularized=True)


def main():
    rows = []
    for p, q in MU2_CASES:
        for t in TS:
            r = exact_small_n(p, q, 2, t)
            ref = float(mu2_mpmath(p, q, t))
            assert abs(r.value - ref) <= max(r.abs_error_bound, 1e-12) + 1e-12, (p, q, t, r, ref)
            rows.append(dict(kind="mu", p=p, q=q, n=2, t=t, value=r.value, bound=r.abs_error_bound,
                             method=r.method.value, crosscheck=ref))
    for p, q, n, t, body in [(1.0, 2.0, 2, 1.2, "nu-ball"), (2.0, 4.0, 2, 1.1, "nu-ball"),
                             (1.0, 2.0, 3, 1.2, "mu-sphere"), (2.0, 4.0, 3, 1.1, "mu-sphere"),
                             (1.0, 2.0, 3, 1.2, "nu-ball")]:
        r = exact_small_n(p, q, n, t, body)
        rows.append(dict(kind="mu" if body == "mu-sphere" else "nu", p=p, q=q, n=n, t=t, value=r.value,
                         bound=r.abs_error_bound, method=r.method.value, crosscheck=None))
    tails = []
    for p, u in [(1.0, 1.0), (2.0, 4.0), (4.0, 10.0), (0.5, 3.0)]:
        v = reference_tail_xp(p, u)
        ref = float(mp.gammainc(1 / mp.mpf(p), u, mp.inf, regularized=True))
        assert abs(v - ref) <= 1e-12
        tails.append(dict(p=p, u=u, value=v, crosscheck=ref))
    data = dict(version=1, exact_small_n=rows, tail_xp=tails,
                ln_gamma_half=float(mp.log(mp.sqrt(mp.pi))), c2=float(2 / mp.sqrt(mp.pi)))
    OUT.write_text(json.dumps(data, indent=1, default=lambda v: "inf" if v == math.inf else v,
                              allow_nan=True) + "\n")
    print(f"wrote {len(rows)} small-n values and {len(tails)} tail values to {OUT}")


if __name__ == "__main__":
    main()
