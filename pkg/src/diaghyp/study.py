"""Grid-refinement studies against exact or self-generated references."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import quad_trapezoid
from .oracles import burgers_riemann, characteristics_scalar
from .solver import RunConfig, run


@dataclass
class ConvergenceRow:
    refine: int
    n: int
    eps: float
    error: float
    order: str  # observed order against the previous row, "" on the first row


def _scalar_speed(config: RunConfig):
    spec = config.system

    def speed(u):
        return float(np.asarray(spec.velocity(np.array([[u]])))[0, 0])

    return speed


def exact_solution(config: RunConfig, oracle: str, t: float, x: np.ndarray) -> np.ndarray:
    if config.system.m != 1:
        raise ValueError(f"oracle {oracle!r} applies to scalar equations only")
    profile = config.profiles[0]
    if oracle == "burgers_riemann":
        p = profile.params
        if profile.kind != "smoothstep" or p["width"] != 0:
            raise ValueError("burgers_riemann needs a sharp smoothstep (width 0) profile")
        vals = [burgers_riemann(p["lo"], p["hi"], t, xi - p["center"]) for xi in x]
    elif oracle == "characteristics":
        speed = _scalar_speed(config)
        vals = [characteristics_scalar(speed, profile, t, xi) for xi in x]
    else:
        raise ValueError(f"unknown oracle {oracle!r}")
    return np.array(vals)[None, :]


def observed_order(e_coarse: float, e_fine: float, ratio: float) -> str:
    if e_fine == 0.0:
        return "exact" if e_coarse == 0.0 else "inf"
    if e_coarse == 0.0:
        return "-inf"
    return repr(math.log(e_coarse / e_fine) / math.log(ratio))


def converge(config: RunConfig, refinements, oracle: str = "self"):
    """L1 error at ``t_end`` for each refinement factor (cells times r, eps / r)."""
    refinements = [int(r) for r in refinements]
    if not refinements or any(r < 1 for r in refinements) or refinements != sorted(set(refinements)):
        raise ValueError("refinements must be increasing positive integers")
    if oracle != "self" and config.mollify_eps > 0:
        warnings.warn("the oracle compares against unmollified data", stacklevel=2)
    reference = None
    ref_factor = 2 * math.lcm(*refinements)
    if oracle == "self":
        reference = run(config.refined(ref_factor)).final.values
    rows = []
    prev = None
    for r in refinements:
        cfg = config.refined(r) if r > 1 else config
        res = run(cfg)
        if reference is None:
            exact = exact_solution(cfg, oracle, cfg.t_end, cfg.grid.nodes)
        else:
            exact = reference[:, :: ref_factor // r]
        err = float(sum(quad_trapezoid(np.abs(row), cfg.grid)
                        for row in res.final.values - exact))
        order = "" if prev is None else observed_order(prev[1], err, r / prev[0])
        rows.append(ConvergenceRow(r, cfg.grid.n, cfg.eps, err, order))
        prev = (r, err)
    return rows
