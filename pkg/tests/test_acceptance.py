"""Acceptance criteria, each at its stated tolerance; one PASS/FAIL line per criterion."""

import cmath
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, g_set

from appell.asym import asymp_theorem1_terms, asymptotic_total, two_term_closed_form
from appell.attractor import arc_corners, attractor_arcs, hausdorff_one_sided, roots_rescaled
from appell.bernoulli import bernoulli_asymp, bernoulli_rescaled_oracle, eval_corollary1, eval_sd_bernoulli
from appell.contour import eval_theorem1
from appell.core import appell_coefficients, bernoulli, eval_rescaled_direct, polynomial
from appell.sdpath import psi, theta_path, theta_taylor_coeffs
from appell.sdrep import eval_theorem2

SQ2 = math.sqrt(2)


def record(k: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)


def _near_boundary(g, x, margin=1e-6) -> bool:
    """True when a zero sits within margin of the real axis or of the curve in theta."""
    radius = 3.0 / abs(x) if g.zero_directions is None else 40.0
    for zeta, _ in g.zeros(radius):
        w = zeta * x
        if abs(abs(w) - 1) < margin:
            return True
        th = complex(cmath.phase(w), -math.log(abs(w)))
        if abs(th.real) < math.pi and abs(float(psi(th))) < margin:
            return True
    return False


def _random_points(rng, count, g):
    out = []
    while len(out) < count:
        r = math.exp(rng.uniform(math.log(0.05), math.log(3.0)))
        x = complex(cmath.rect(r, rng.uniform(-math.pi, math.pi)))
        if not _near_boundary(g, x):
            out.append(x)
    return out


def test_criterion_1_representation_equivalence():
    rng = np.random.default_rng(20240601)
    worst, where, count = 0.0, None, 0
    t0 = time.perf_counter()
    for name, g in g_set().items():
        for n in (5, 10, 20, 40, 60):
            for x in _random_points(rng, 20, g):
                exact = eval_rescaled_direct(g, n, x)
                t1 = eval_theorem1(g, n, x).total
                t2 = eval_theorem2(g, n, x).total
                gap = max(t1.rel_diff(exact), t2.rel_diff(exact), t1.rel_diff(t2))
                count += 1
                if gap > worst:
                    worst, where = gap, (name, n, x)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 60
    record(1, ok, f"max rel gap {worst:.2e} over {count} cases (at {where[0]}, n={where[1]}, "
                  f"x={where[2]:.4f}); {elapsed:.1f} s single-threaded (limits 1e-8, 60 s)")
    assert ok


def test_criterion_2_theta_path():
    tau = np.linspace(-6, 6, 24001)
    th, _ = theta_path(tau)
    resid = float(np.max(np.abs(np.exp(1j * th) - 1j * th - (1 - tau**2))))
    d0 = abs(theta_path(0.0)[1][0] - SQ2)
    printed = np.array([0, SQ2, -1j / 3, -1 / (9 * SQ2), 2j / 135, 1 / (540 * SQ2), 4j / 8505,
                        139 / (340200 * SQ2), -2j / 25515])
    coef = float(np.max(np.abs(theta_taylor_coeffs(8).taylor - printed)))
    ok = resid <= 1e-11 and d0 <= 1e-14 and coef <= 1e-12
    record(2, ok, f"residual {resid:.2e} on [-6,6] (<=1e-11), |theta'(0)-sqrt2| {d0:.1e} (<=1e-14), "
                  f"Taylor through tau^8 {coef:.1e} (<=1e-12)")
    assert ok


def _bernoulli_points():
    rng = np.random.default_rng(7)
    pts = []
    # zero exactly on the real axis in theta (|2 pi k x| = 1): half weight
    for k, ang in [(1, 0.4), (2, 2.2), (3, -1.0), (1, -2.7)]:
        pts.append(("on_axis", cmath.rect(1 / (2 * math.pi * k), ang)))
    for q in (0.3, -0.12, 0.02, 1.1):
        pts.append(("imaginary", complex(0, q)))
    while len(pts) < 50:
        x = cmath.rect(math.exp(rng.uniform(math.log(0.03), math.log(2.5))), rng.uniform(-math.pi, math.pi))
        if not _near_boundary(bernoulli(), x):
            pts.append(("generic", x))
    return pts


def test_criterion_3_bernoulli_triple():
    ns = (5, 12, 30, 60)
    worst, kinds = 0.0, {"on_axis": 0, "imaginary": 0, "generic": 0}
    half_seen = 0
    for i, (kind, x) in enumerate(_bernoulli_points()):
        n = ns[i % len(ns)]
        exact = bernoulli_rescaled_oracle(n, x)
        c1 = eval_corollary1(n, x)
        sd = eval_sd_bernoulli(n, x)
        if any(r.weight == 0.5 for r in c1.breakdown.residues):
            half_seen += 1
        if kind == "imaginary":
            assert not sd.extra.is_zero
        worst = max(worst, c1.total.rel_diff(exact), sd.total.rel_diff(exact), c1.total.rel_diff(sd.total))
        kinds[kind] += 1
    ok = worst <= 1e-8 and half_seen >= 3 and kinds["imaginary"] >= 3
    record(3, ok, f"max rel gap {worst:.2e} over 50 points (<=1e-8); half-weight cases {half_seen}, "
                  f"imaginary-axis (polylog) cases {kinds['imaginary']}")
    assert ok


def _slope(ns, errs):
    return float(np.polyfit(np.log(ns), np.log(errs), 1)[0])


def test_criterion_4_asymptotic_order():
    ns = [32, 64, 128, 256]
    eb = [bernoulli_asymp(n, 2.0).value().rel_diff(bernoulli_rescaled_oracle(n, 2.0)) for n in ns]
    sb = _slope(ns, eb)
    g = polynomial([-2, 2, -1, 1])
    x = -0.5 + 0.3j
    terms = {n: asymp_theorem1_terms(g, n, x) for n in ns}
    assert all(terms[n][0].kind == "saddle" for n in ns)
    ep = [asymptotic_total(terms[n], 2).rel_diff(eval_rescaled_direct(g, n, x)) for n in ns]
    sp = _slope(ns, ep)
    rng = np.random.default_rng(11)
    ident = 0.0
    for _ in range(10):
        xx = cmath.rect(rng.uniform(0.2, 3.0), rng.uniform(-math.pi, math.pi))
        for n in (10, 64):
            a = bernoulli_asymp(n, xx).value().to_complex()
            b = two_term_closed_form(bernoulli(), n, xx)
            ident = max(ident, abs(a - b) / abs(b))
    ok = -2.4 <= sb <= -1.6 and -2.4 <= sp <= -1.6 and ident <= 1e-12
    record(4, ok, f"slopes Bernoulli x=2: {sb:.3f}, (z-1)(z^2+2) x={x}: {sp:.3f} (in [-2.4,-1.6]); "
                  f"specialization identity {ident:.1e} (<=1e-12)")
    assert ok


def test_criterion_5_attractor():
    g = polynomial([-2, 2, -1, 1])
    arcs = attractor_arcs(g, 4000)
    d = {n: hausdorff_one_sided(roots_rescaled(g, n), arcs) for n in (50, 100, 150)}
    corners = arc_corners(arcs)
    cusp = max(min(abs(c - t) for c in corners) for t in (1.0, 1j / SQ2, -1j / SQ2))
    ok = d[50] > d[100] > d[150] and d[150] <= 0.08 and cusp <= 0.02
    record(5, ok, f"d50={d[50]:.4f} d100={d[100]:.4f} d150={d[150]:.4f} (decreasing, d150<=0.08); "
                  f"cusp distance to 1, +-i/sqrt2: {cusp:.1e} (<=0.02)")
    assert ok


def test_criterion_6_invariants():
    rng = np.random.default_rng(5)
    fails = []
    # derivative identity p_n' = n p_{n-1}
    for g in g_set().values():
        for n in range(1, 25):
            dp = appell_coefficients(g, n).derivative().coefficients
            prev = appell_coefficients(g, n - 1).coefficients
            if not np.allclose(dp, n * prev, rtol=1e-12, atol=1e-12 * np.abs(dp).max()):
                fails.append(f"derivative {g.name} n={n}")
    # PV continuity across |zeta x| = 1
    for g in (polynomial([-1, 1]), polynomial([-2, 2, -1, 1])):
        for zeta, _ in g.zeros():
            x1 = cmath.rect(1 / abs(zeta), rng.uniform(-math.pi, math.pi))
            vals = [eval_theorem1(g, 15, x1 * (1 + s)).total for s in (-1e-9, 0.0, 1e-9)]
            exact = eval_rescaled_direct(g, 15, x1)
            if max(v.rel_diff(exact) for v in vals) > 1e-6:
                fails.append(f"continuity {g.name} zeta={zeta}")
    # psi sign convention along C
    tau = np.linspace(-5, 5, 401)[1:-1]
    th, _ = theta_path(tau)
    on = np.max(np.abs(psi(th)))
    above = np.all(psi(th + 1e-3j) > 0) and np.all(psi(th - 1e-3j) < 0)
    if on > 1e-10 or not above:
        fails.append("psi sign")
    # arc residuals
    res = max(float(np.max(a.residuals())) for a in attractor_arcs(polynomial([-2, 2, -1, 1]), 2000))
    res = max(res, max(float(np.max(a.residuals())) for a in attractor_arcs(bernoulli(), 1000)))
    if res > 1e-10:
        fails.append(f"arc residual {res:.1e}")
    # deterministic CLI output
    argv = [sys.executable, "-m", "appell", "compare", "--g", "bernoulli", "--n", "8,16",
            "--grid", "-0.6:0.6:3", "--grid-im", "0.1:0.5:2"]
    env = dict(os.environ, APPELL_THREADS="1")
    a = subprocess.run(argv, capture_output=True, env=env).stdout
    env["APPELL_THREADS"] = "3"
    b = subprocess.run(argv, capture_output=True, env=env).stdout
    if a != b or not a:
        fails.append("cli determinism")
    ok = not fails
    record(6, ok, "derivative identity, PV continuity, psi sign along C, arc residuals "
                  f"(max {res:.1e} <=1e-10), deterministic CLI" + ("" if ok else f"; failed: {fails}"))
    assert ok
