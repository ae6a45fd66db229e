"""Invariant checks over a completed run."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TOL_MONO
from .estimates import MonotonicityViolation, entropy_budget
from .solver import RunConfig, RunResult, run
from .systems import check_h2, linear_case

MAX_PRINCIPLE_TOL = 1e-12
L1_TOL = 1e-10
GRADSUM_TOL = 1e-8
DRIFT_TOL = 1e-8
BOX_TOL = 1e-9


@dataclass
class Check:
    name: str
    passed: bool
    slack: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<18} slack={self.slack:+.3e}  {self.detail}"


def _check(name, slack, detail=""):
    return Check(name, bool(slack >= 0), float(slack), detail)


def run_checks(result: RunResult) -> list:
    config = result.config
    spec = config.system
    mons = result.monitors
    periodic_ramp = bool(np.any(result.initial.seam_jump))
    checks = []

    h2 = check_h2(spec)
    checks.append(_check("h2_sampling", h2.min_quadform + 1e-12,
                         f"min quadratic form {h2.min_quadform:.3e}"))

    linf0 = np.array(mons[0].linf)
    linf = np.array([r.linf for r in mons])
    box_exc = max(r.box_excursion for r in mons)
    if periodic_ramp:
        # the sup norm of a field with a linear part is infinite; check the box instead
        checks.append(_check("max_principle", BOX_TOL - box_exc,
                             f"periodic part leaves its box by {box_exc:.3e}"))
    else:
        worst = float(np.max(linf - linf0))
        checks.append(_check("max_principle", MAX_PRINCIPLE_TOL - worst,
                             f"max growth of |u_i|_inf {worst:.3e}"))
        checks.append(_check("box", BOX_TOL - box_exc, f"max excursion {box_exc:.3e}"))

    mono = min(r.mono_min for r in mons)
    checks.append(_check("monotonicity", mono + TOL_MONO, f"min slope {mono:.3e}"))

    l1 = np.array([r.l1grad for r in mons])
    rise = np.array([r.rise for r in mons])
    tele = float(np.max(np.abs(l1 - rise)))
    detail = f"|l1grad - rise| <= {tele:.3e}"
    slack = L1_TOL - tele
    if not periodic_ramp:
        bound = 2.0 * result.u0_linf
        over = float(np.max(l1 - bound))
        slack = min(slack, L1_TOL - over)
        detail += f", l1grad - 2|u0|_inf <= {over:.3e}"
    checks.append(_check("l1_gradient", slack, detail))

    budget = entropy_budget(mons, spec, float(np.max(result.u0_linf)))
    checks.append(_check("entropy_budget", budget.worst_slack,
                         f"max violation {budget.max_violation:.3e}, C={budget.constant:.4g}"))

    if h2.passed:
        slack = min(r.dissipation_d + 1e-10 * r.dissipation_scale for r in mons)
        checks.append(_check("dissipation_sign", slack,
                             f"min D {min(r.dissipation_d for r in mons):.3e}"))

    if spec.nonlocal_term is None and linear_case(spec) == "ii":
        g0 = mons[0].gradsum_sup
        worst = max(r.gradsum_sup for r in mons) - g0
        checks.append(_check("gradsum_bound", GRADSUM_TOL - worst,
                             f"sup sum of gradients grows by {worst:.3e}"))
        # the comparison argument controls the sum of per-component sups, which
        # dominates the sup of the sum; the two agree when initial peaks coincide
        s0 = sum(mons[0].grad_sup)
        worst = max(sum(r.grad_sup) for r in mons) - s0
        checks.append(_check("gradient_sup_sum", GRADSUM_TOL - worst,
                             f"sum of component sups grows by {worst:.3e}"))

    if periodic_ramp and result.snapshots is not None:
        g = result.initial.grid
        vals = result.snapshots
        means = (np.diff(vals, axis=-1).sum(axis=-1) + vals[..., 0]
                 + result.initial.seam_jump - vals[..., -1]) / g.length
        drift = float(np.max(np.abs(means - means[0])))
        checks.append(_check("gradient_means", DRIFT_TOL - drift, f"drift {drift:.3e}"))

    gaps = np.diff(result.times)
    limit = config.t_end / 200
    widest = float(gaps.max()) if gaps.size else 0.0
    checks.append(_check("monitor_sampling", limit * (1 + 1e-9) - widest,
                         f"widest gap {widest:.3e} vs {limit:.3e}"))
    return checks


def verify(config: RunConfig):
    """Run ``config`` and evaluate every check; a monotonicity abort is reported as a failure."""
    try:
        result = run(config)
    except MonotonicityViolation as exc:
        return None, [Check("monotonicity", False, float("-inf"), str(exc))]
    return result, run_checks(result)
