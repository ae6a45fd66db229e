"""Explicit upwind / central-diffusion integration of the viscous system.

Each component obeys ``u^i_t + a^i(u) u^i_x = eps u^i_xx``. The advection
term is discretized in nonconservative upwind form and time stepping is
forward Euler, which makes every update a convex combination of
neighbouring values under the step restriction in :func:`stable_dt`.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import ic
from .core import TOL_MONO, FieldSet, Grid1D, forward_gradient, quad_trapezoid
from .estimates import (
    MonitorReport,
    MonotonicityViolation,
    dissipation,
    dissipation_scale,
    entropy_quadrature_error,
    gradient_entropy,
    gradsum_sup,
    l1_gradient,
)
from .systems import SystemSpec

log = logging.getLogger(__name__)

FLOOR = 1e-14


class SolverError(RuntimeError):
    pass


class CFLViolation(SolverError):
    pass


@dataclass(frozen=True)
class RunConfig:
    system: SystemSpec
    profiles: tuple
    grid: Grid1D
    eps: float = 0.0
    t_end: float = 1.0
    cfl: float = 0.3
    mollify_eps: float = 0.0
    monitor_every: int = 1
    # dt is capped so that at least this many monitor intervals cover [0, t_end]
    min_records: int = 200
    keep_snapshots: bool = False
    outputs: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if len(self.profiles) != self.system.m:
            raise ValueError(f"{len(self.profiles)} profiles for a {self.system.m}-component system")
        if not (np.isfinite(self.eps) and self.eps >= 0):
            raise ValueError(f"viscosity must be finite and >= 0, got {self.eps}")
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be finite and positive, got {self.t_end}")
        if not 0 < self.cfl < 1:
            raise ValueError(f"cfl must lie in (0, 1), got {self.cfl}")
        if self.mollify_eps < 0:
            raise ValueError("mollify_eps must be >= 0")
        if 0 < self.mollify_eps < 2 * self.grid.dx:
            raise ValueError(
                f"mollify_eps={self.mollify_eps} is not resolved by dx={self.grid.dx} (need >= 2 dx)"
            )
        if int(self.monitor_every) != self.monitor_every or self.monitor_every < 1:
            raise ValueError("monitor_every must be a positive integer")

    def refined(self, factor: int) -> "RunConfig":
        """Joint refinement: ``factor`` times more cells and ``eps / factor``."""
        return replace(self, grid=self.grid.refined(factor), eps=self.eps / factor)


@dataclass(frozen=True)
class SolverState:
    t: float
    u: FieldSet
    step_index: int = 0
    # frozen boundary values used as ghost nodes on line grids
    left: np.ndarray | None = None
    right: np.ndarray | None = None

    @classmethod
    def initial(cls, u: FieldSet) -> "SolverState":
        if u.grid.periodic:
            return cls(0.0, u)
        return cls(0.0, u, 0, u.values[:, 0].copy(), u.values[:, -1].copy())


@dataclass
class RunResult:
    config: RunConfig
    initial: FieldSet
    final: FieldSet
    monitors: list
    times: np.ndarray
    snapshots: np.ndarray | None
    steps: int
    warnings: list

    @property
    def u0_linf(self) -> np.ndarray:
        return np.max(np.abs(self.initial.periodic_part()), axis=1)


def domain_integrals(f: FieldSet) -> np.ndarray:
    """Integral of each component over the grid (one period on periodic grids)."""
    g = f.grid
    if g.periodic:
        return g.dx * f.periodic_part().sum(axis=1) + 0.5 * f.seam_jump * g.length
    return np.array([quad_trapezoid(row, g) for row in f.values])


def nonlocal_shift(spec: SystemSpec, f: FieldSet) -> np.ndarray:
    if spec.nonlocal_term is None:
        return np.zeros(spec.m)
    term = spec.nonlocal_term
    return term.scale * (np.asarray(term.coupling) @ domain_integrals(f))


def velocity_field(spec: SystemSpec, f: FieldSet):
    """Velocities at every node and the box excursion of the state.

    The periodic part of the state is clamped into the box before the
    velocity map sees it.
    """
    lin = f.linear_part()
    per = f.values - lin
    excursion = spec.box.excursion(per)
    a = np.asarray(spec.velocity(spec.box.clamp(per) + lin), dtype=float)
    if spec.nonlocal_term is not None:
        a = a + nonlocal_shift(spec, f)[:, None]
    return a, excursion


def stable_dt(state: SolverState, spec: SystemSpec, eps: float, cfl: float) -> float:
    """``cfl * min(dx / max|a|, dx^2 / (2 eps))`` with both denominators floored.

    Without viscosity only the advective limit applies.

    Monotonicity of the combined update needs the advective and diffusive
    Courant numbers to sum to at most one (at most 1/3 each where
    velocities change sign); ``cfl <= 1/3`` guarantees this.
    """
    a, _ = velocity_field(spec, state.u)
    dx = state.u.grid.dx
    a_max = float(np.max(np.abs(a))) if a.size else 0.0
    dt = dx / max(a_max, FLOOR)
    if eps > 0:
        dt = min(dt, dx * dx / max(2.0 * eps, FLOOR))
    return cfl * dt


def _extend(state: SolverState) -> np.ndarray:
    u = state.u.values
    if state.u.grid.periodic:
        jump = state.u.seam_jump
        left = u[:, -1] - jump
        right = u[:, 0] + jump
    else:
        left, right = state.left, state.right
    return np.concatenate([left[:, None], u, right[:, None]], axis=1)


def step(state: SolverState, spec: SystemSpec, eps: float, dt: float) -> SolverState:
    """One forward-Euler step of upwind advection plus central diffusion."""
    dx = state.u.grid.dx
    a, _ = velocity_field(spec, state.u)
    a_max = float(np.max(np.abs(a))) if a.size else 0.0
    if dt * a_max > dx * (1 + 1e-12) or 2.0 * eps * dt > dx * dx * (1 + 1e-12):
        raise CFLViolation(f"dt={dt:.6g} exceeds the stability limit at t={state.t:.6g}")
    ext = _extend(state)
    u = state.u.values
    back = (u - ext[:, :-2]) / dx
    fwd = (ext[:, 2:] - u) / dx
    # a == 0 takes the left branch; the product vanishes either way
    adv = np.where(a >= 0, a * back, a * fwd)
    new = u - dt * adv
    if eps > 0:
        new = new + dt * eps * (ext[:, 2:] - 2.0 * u + ext[:, :-2]) / (dx * dx)
    if not np.all(np.isfinite(new)):
        bad = np.argwhere(~np.isfinite(new))[0]
        raise SolverError(
            f"non-finite value in component {bad[0]} at node {bad[1]} "
            f"after step {state.step_index + 1} (t={state.t + dt:.6g})"
        )
    return replace(state, t=state.t + dt, u=state.u.with_values(new),
                   step_index=state.step_index + 1)


def monitor(state: SolverState, spec: SystemSpec, cum_dissipation: float = 0.0) -> MonitorReport:
    u = state.u
    w = forward_gradient(u)
    mono = float(np.min(w.values))
    if mono < -TOL_MONO:
        i, j = np.unravel_index(np.argmin(w.values), w.values.shape)
        raise MonotonicityViolation(
            f"component {i} decreases at node {j} (slope {mono:.3g}) at t={state.t:.6g}"
        )
    per = u.periodic_part()
    return MonitorReport(
        t=float(state.t),
        linf=tuple(float(v) for v in np.max(np.abs(per), axis=1)),
        l1grad=tuple(float(v) for v in l1_gradient(u)),
        entropy_n=gradient_entropy(w),
        dissipation_d=dissipation(u, w, spec),
        cum_dissipation=float(cum_dissipation),
        gradsum_sup=gradsum_sup(w),
        box_excursion=spec.box.excursion(per),
        mono_min=mono,
        entropy_quad_err=entropy_quadrature_error(w),
        dissipation_scale=dissipation_scale(w, spec, u),
        grad_sup=tuple(float(v) for v in np.max(w.values, axis=1)),
        rise=tuple(float(v) for v in (u.seam_jump if u.grid.periodic
                                      else u.values[:, -1] - u.values[:, 0])),
    )


def transition_margin(f: FieldSet, rel: float = 1e-8) -> float:
    """Distance from the initial transition zone to the nearest line-grid boundary."""
    x = f.grid.nodes
    margin = np.inf
    for row in f.values:
        rise = row[-1] - row[0]
        if rise <= 0:
            continue
        active = np.nonzero((row - row[0] > rel * rise) & (row[-1] - row > rel * rise))[0]
        if active.size == 0:
            # a sharp step: the zone is the jump cell itself
            jump = np.nonzero(np.diff(row) > 0)[0]
            lo_x, hi_x = x[jump[0]], x[jump[-1] + 1]
        else:
            lo_x, hi_x = x[max(active[0] - 1, 0)], x[min(active[-1] + 1, x.size - 1)]
        margin = min(margin, lo_x - x[0], x[-1] - hi_x)
    return float(margin)


def speed_bound(spec: SystemSpec, u0: FieldSet) -> float:
    return spec.m0 + float(np.max(np.abs(nonlocal_shift(spec, u0)), initial=0.0))


def prepare_initial(config: RunConfig) -> FieldSet:
    u0 = ic.sample_profile(config.profiles, config.grid, box=config.system.box)
    if config.mollify_eps > 0:
        u0 = ic.mollify(u0, config.mollify_eps)
    return u0


def run(config: RunConfig, initial: FieldSet | None = None) -> RunResult:
    """Sample, mollify and integrate to ``t_end``, monitoring every ``monitor_every`` steps."""
    spec = config.system
    u0 = prepare_initial(config) if initial is None else initial
    notes = []
    if not config.grid.periodic:
        need = 5.0 * speed_bound(spec, u0) * config.t_end
        margin = transition_margin(u0)
        if margin < need:
            msg = (f"transition zone is {margin:.3g} from the boundary; frozen ghost values "
                   f"need at least {need:.3g}")
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)

    state = SolverState.initial(u0)
    dt_cap = config.t_end / (config.min_records * config.monitor_every)
    reports = [monitor(state, spec)]
    times = [0.0]
    snaps = [u0.values] if config.keep_snapshots else None
    prev_d = reports[0].dissipation_d
    cum = 0.0
    last_t = 0.0
    while state.t < config.t_end:
        remaining = config.t_end - state.t
        dt = min(stable_dt(state, spec, config.eps, config.cfl), dt_cap)
        final = dt >= remaining * (1 - 1e-12)
        state = step(state, spec, config.eps, min(dt, remaining))
        if final:
            state = replace(state, t=config.t_end)
        if final or state.step_index % config.monitor_every == 0:
            rep = monitor(state, spec)
            cum += 0.5 * (prev_d + rep.dissipation_d) * (state.t - last_t)
            prev_d, last_t = rep.dissipation_d, state.t
            reports.append(replace(rep, cum_dissipation=cum))
            times.append(state.t)
            if snaps is not None:
                snaps.append(state.u.values)
    log.debug("run finished: %d steps to t=%g", state.step_index, state.t)
    return RunResult(
        config=config,
        initial=u0,
        final=state.u,
        monitors=reports,
        times=np.array(times),
        snapshots=None if snaps is None else np.array(snaps),
        steps=state.step_index,
        warnings=notes,
    )
