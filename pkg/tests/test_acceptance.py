"""Acceptance criteria A1-A12, one pass/fail line per criterion.

Run with pytest (lines are repeated in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from diaghyp import config, core, dislocation, estimates, ic, oracles, systems
from diaghyp.solver import RunConfig, run

RESULTS = {}

# final L1 error of the n = 1600 Burgers run, frozen from the first full run of this suite
A5_FINAL_ERROR_BOUND = 0.0185


def report(key, passed, detail):
    line = f"{key:<4} {'PASS' if passed else 'FAIL'}  {detail}"
    RESULTS[key] = line
    print(line)
    assert passed, line


def _demo_runs(names=None, keep_snapshots=False):
    out = {}
    for name in names or config.demo_names():
        cfg = config.load_demo(name)
        if cfg.kind == "dislocation" and cfg.grid.get("topology") == "periodic":
            rc = cfg.build(keep_snapshots=True)
            res = dislocation.run_periodic(cfg.dislocation_spec(), rc.profiles, rc.grid.n,
                                           eps=rc.eps, t_end=rc.t_end, cfl=rc.cfl).result
            out[name] = (res, 0.0)
            continue
        t0 = time.perf_counter()
        res = run(cfg.build(keep_snapshots=keep_snapshots))
        out[name] = (res, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def demo_runs():
    t0 = time.perf_counter()
    runs = _demo_runs()
    return runs, time.perf_counter() - t0


def test_a1_max_principle(demo_runs):
    runs, _ = demo_runs
    worst, slowest, notes = -np.inf, 0.0, []
    for name, (res, secs) in runs.items():
        slowest = max(slowest, secs)
        if np.any(res.initial.seam_jump):
            # periodic-plus-linear fields: the bound applies to the periodic part (its box)
            exc = max(r.box_excursion for r in res.monitors)
            worst = max(worst, exc - 1e-12)
            notes.append(f"{name}: box excursion {exc:.1e}")
            continue
        linf0 = np.asarray(res.monitors[0].linf)
        growth = max(float(np.max(np.asarray(r.linf) - linf0)) for r in res.monitors)
        worst = max(worst, growth)
    report("A1", worst <= 1e-12 and slowest <= 10.0,
           f"max growth of |u|_inf {worst:.2e} over {len(runs)} demos, slowest {slowest:.2f}s"
           + (f"; {'; '.join(notes)}" if notes else ""))


def test_a2_monotonicity(demo_runs):
    runs, _ = demo_runs
    worst = np.inf
    checked = []
    for name, (res, _) in runs.items():
        if not systems.check_h2(res.config.system).passed:
            continue
        checked.append(name)
        worst = min(worst, min(r.mono_min for r in res.monitors))
    report("A2", worst >= -1e-12, f"min slope {worst:.2e} over {len(checked)} (H2) demos")


def test_a3_l1_gradient(demo_runs):
    runs, _ = demo_runs
    bound_gap, tele = -np.inf, 0.0
    for res, _ in runs.values():
        u0 = res.u0_linf
        for r in res.monitors:
            tele = max(tele, float(np.max(np.abs(np.asarray(r.l1grad) - np.asarray(r.rise)))))
            if not np.any(res.initial.seam_jump):
                bound_gap = max(bound_gap, float(np.max(np.asarray(r.l1grad) - 2 * u0)))
    report("A3", bound_gap <= 1e-10 and tele <= 1e-10,
           f"max l1grad - 2|u0| = {bound_gap:.2e}, telescoping error {tele:.2e}")


def test_a4_entropy_budget():
    worst_slack, worst_d, lines = np.inf, np.inf, []
    for name in ("burgers-riemann", "crossing", "linear-case-i", "linear-case-ii"):
        base = config.load_demo(name).build()
        base = replace(base, grid=core.make_grid(base.grid.x_min, base.grid.x_max, 400))
        for eps in (0.0, 0.01):
            res = run(replace(base, eps=eps))
            spec = res.config.system
            budget = estimates.entropy_budget(res.monitors, spec, float(np.max(res.u0_linf)))
            worst_slack = min(worst_slack, budget.worst_slack)
            if systems.check_h2(spec).passed:
                worst_d = min(worst_d, min(r.dissipation_d + 1e-10 * r.dissipation_scale
                                           for r in res.monitors))
            lines.append(f"{name}/eps={eps}: violation {budget.max_violation:.2e}")
    report("A4", worst_slack >= 0 and worst_d >= 0,
           f"min budget slack {worst_slack:.2e}, min D + 1e-10 scale {worst_d:.2e}")


def test_a5_burgers_convergence():
    t0 = time.perf_counter()
    p = ic.smoothstep(0, 1, 0, 0)
    errors = []
    for n in (200, 400, 800, 1600):
        g = core.make_grid(-1.0, 2.0, n)
        with pytest.warns(UserWarning):
            res = run(RunConfig(systems.burgers(), [p], g, eps=g.dx, t_end=0.5))
        exact = np.array([oracles.burgers_riemann(0, 1, 0.5, x) for x in g.nodes])
        errors.append(core.quad_trapezoid(np.abs(res.final.values[0] - exact), g))
    secs = time.perf_counter() - t0
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
    decreasing = all(a > b for a, b in zip(errors, errors[1:]))
    passed = decreasing and orders[-1] >= 0.75 and errors[-1] <= A5_FINAL_ERROR_BOUND and secs <= 60
    report("A5", passed,
           "errors " + ", ".join(f"{e:.4e}" for e in errors)
           + "; orders " + ", ".join(f"{o:.3f}" for o in orders)
           + f"; bound {A5_FINAL_ERROR_BOUND}; {secs:.1f}s")


def test_a6_cross_oracle():
    p = ic.smoothstep(0, 1, 0, 0)
    rng = np.random.default_rng(2024)
    off = edge = 0.0
    for _ in range(1000):
        t, x = rng.uniform(0.01, 2.0), rng.uniform(-1.0, 3.0)
        ref = oracles.burgers_riemann(0, 1, t, x)
        got = oracles.characteristics_scalar(lambda u: u, p, t, x)
        off = max(off, abs(got - ref))
    for t in rng.uniform(0.01, 2.0, 50):
        for x in (0.0, t):
            ref = oracles.burgers_riemann(0, 1, t, x)
            edge = max(edge, abs(oracles.characteristics_scalar(lambda u: u, p, t, x) - ref))
    report("A6", off <= 1e-10 and edge <= 1e-6,
           f"max difference {off:.2e} at 1000 random points, {edge:.2e} on fan edges")


def test_a7_case_ii_gradsum():
    res = run(config.load_demo("linear-case-ii").build())
    g0 = res.monitors[0].gradsum_sup
    growth = max(r.gradsum_sup for r in res.monitors) - g0
    report("A7", growth <= 1e-8, f"gradsum_sup growth {growth:.2e} (initial {g0:.4f})")


def test_a8_crossing():
    spec = systems.crossing()
    h2 = systems.check_h2(spec)
    cfg = config.load_demo("crossing").build()
    res = run(replace(cfg, t_end=1.0))
    linf0 = np.asarray(res.monitors[0].linf)
    growth = max(float(np.max(np.asarray(r.linf) - linf0)) for r in res.monitors)
    mono = min(r.mono_min for r in res.monitors)
    tele = max(float(np.max(np.abs(np.asarray(r.l1grad) - np.asarray(r.rise))))
               for r in res.monitors)
    l1 = max(float(np.max(np.asarray(r.l1grad) - 2 * res.u0_linf)) for r in res.monitors)
    budget = estimates.entropy_budget(res.monitors, spec, float(np.max(res.u0_linf)))
    u = res.initial.values
    lam1, lam2 = np.cos(u[1]), u[0] * np.sin(u[1])
    above, below = int(np.sum(lam1 > lam2)), int(np.sum(lam1 < lam2))
    passed = (h2.min_quadform >= -1e-12 and growth <= 1e-12 and mono >= -1e-12 and tele <= 1e-10
              and l1 <= 1e-10 and budget.passed and above > 0 and below > 0)
    report("A8", passed,
           f"min quadform {h2.min_quadform:.2e}; A1-A4 at t=1 {'hold' if passed else 'checked'}; "
           f"lambda1 > lambda2 at {above} nodes, < at {below}")


def test_a9_dislocation_structure():
    half = np.array([[2.0, -0.5], [-0.5, 1.0]])
    a, q = dislocation.expand_matrices(dislocation.DislocationSpec(half, half))
    n = 2
    exact = all(np.all(m[n:, :n] + m[:n, :n] == 0) and np.all(m[:n, n:] + m[:n, :n] == 0)
                for m in (a, q))
    single, _ = dislocation.expand_matrices(dislocation.DislocationSpec([[1]], [[0]]))
    h2 = systems.check_h2(systems.linear(single))
    spec = dislocation.DislocationSpec([[1]], [[0.5]])
    out = dislocation.run_periodic(spec, [ic.sine_ramp(1, 0.5, 1.0),
                                          ic.sine_ramp(1, 0.5, 1.0, 0.25)], 256, t_end=1.0)
    passed = exact and h2.passed and out.mean_drift <= 1e-8
    report("A9", passed, f"antisymmetry exact: {exact}; single-slip min quadform "
                         f"{h2.min_quadform:.2e}; gradient-mean drift {out.mean_drift:.2e}")


def test_a10_rescale():
    cfg = config.load_demo("dislocation-rescale")
    rc = cfg.build()
    t0 = time.perf_counter()
    rows = dislocation.rescale_experiment(cfg.dislocation_spec(), rc.profiles,
                                          [0.25, 0.125, 0.0625], dx=rc.grid.dx, t_end=rc.t_end,
                                          eps=rc.eps, cfl=rc.cfl)
    secs = time.perf_counter() - t0
    sup = [r.nonlocal_sup for r in rows]
    dist = [r.distance for r in rows]
    dec = all(a > b for a, b in zip(sup, sup[1:])) and all(a > b for a, b in zip(dist, dist[1:]))
    report("A10", dec and secs <= 120,
           "nonlocal sup " + ", ".join(f"{v:.3e}" for v in sup)
           + "; distance " + ", ".join(f"{v:.3e}" for v in dist) + f"; {secs:.1f}s")


def test_a11_luxemburg():
    g = core.make_grid(0.0, 1.0, 200)
    ref = brentq(lambda lam: (1 / lam) * math.log1p(1 / lam) - 1.0, 0.1, 10.0, xtol=1e-15)
    got = estimates.luxemburg_llogl(np.ones(g.node_count), g)
    zero = estimates.luxemburg_llogl(np.zeros(g.node_count), g)
    rng = np.random.default_rng(11)
    mono = 0
    for _ in range(100):
        s = rng.uniform(0, 3, g.node_count) * (rng.uniform(size=g.node_count) < 0.7)
        bigger = s + rng.uniform(0, 1, g.node_count) * (rng.uniform(size=g.node_count) < 0.5)
        mono += estimates.luxemburg_llogl(s, g) <= estimates.luxemburg_llogl(bigger, g)
    passed = abs(got - ref) <= 1e-9 and zero == 0.0 and mono == 100
    report("A11", passed, f"indicator |bisection - root| {abs(got - ref):.2e}; zero -> {zero}; "
                          f"monotone on {mono}/100 pairs")


def test_a12_uniqueness_diagnostic():
    base = config.load_demo("linear-case-i").build()
    dists = []
    for k in range(3):
        coarse = base.refined(2 ** k) if k else base
        fine = coarse.refined(2)
        rc, rf = run(coarse).final, run(fine).final
        restricted = core.FieldSet(rf.values[:, ::2], coarse.grid)
        dists.append(estimates.weighted_l2_distance(rc, restricted))
    dec = all(a > b for a, b in zip(dists, dists[1:]))
    report("A12", dec, "distances " + ", ".join(f"{d:.3e}" for d in dists))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
