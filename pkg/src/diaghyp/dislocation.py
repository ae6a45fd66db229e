"""Periodic multi-slip dislocation-density transport with a nonlocal stress term.

Component ``i`` and ``i + N`` carry the densities of opposite sign on slip
system ``i``. The velocity of component ``i`` is
``sum_j A_ij u^j + sum_j Q_ij integral(u^j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import ic
from .core import FieldSet, Grid1D, make_grid
from .estimates import weighted_l2_distance
from .solver import RunConfig, RunResult, domain_integrals, run, speed_bound, transition_margin
from .systems import BoxU, NonlocalTerm, SystemSpec, linear


class DomainTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class DislocationSpec:
    a_half: np.ndarray
    q_half: np.ndarray
    period: float = 1.0

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.a_half, dtype=float))
        q = np.atleast_2d(np.array(self.q_half, dtype=float))
        if a.shape != q.shape or a.shape[0] != a.shape[1]:
            raise ValueError(f"a_half {a.shape} and q_half {q.shape} must be equal square matrices")
        if not np.array_equal(a, a.T) or not np.array_equal(q, q.T):
            raise ValueError("a_half and q_half must be symmetric")
        if self.period <= 0:
            raise ValueError("period must be positive")
        object.__setattr__(self, "a_half", a)
        object.__setattr__(self, "q_half", q)

    @property
    def n_slip(self) -> int:
        return self.a_half.shape[0]

    @property
    def m(self) -> int:
        return 2 * self.n_slip

    def to_dict(self) -> dict:
        return {"a_half": self.a_half.tolist(), "q_half": self.q_half.tolist(),
                "period": self.period}


def _expand(half: np.ndarray) -> np.ndarray:
    return np.block([[half, -half], [-half, half]])


def expand_matrices(spec: DislocationSpec):
    """Full ``M x M`` matrices with ``A[i+N, j] = -A[i, j] = A[i, j+N]`` (same for ``Q``)."""
    return _expand(spec.a_half), _expand(spec.q_half)


def nonlocal_velocity(u: FieldSet, a_full, q_full) -> np.ndarray:
    """``A u(x) + Q integral(u)`` at every node of a periodic grid."""
    if not u.grid.periodic:
        raise ValueError("the nonlocal velocity is defined on a periodic grid")
    a_full, q_full = np.asarray(a_full), np.asarray(q_full)
    return a_full @ u.values + (q_full @ domain_integrals(u))[:, None]


def dislocation_system(spec: DislocationSpec, box: BoxU, nonlocal_scale: float = 1.0) -> SystemSpec:
    a_full, q_full = expand_matrices(spec)
    local = linear(a_full, box)
    term = NonlocalTerm(q_full, nonlocal_scale) if np.any(q_full) else None
    return replace(local, name="dislocation", nonlocal_term=term,
                   params={"a_half": spec.a_half.tolist(), "q_half": spec.q_half.tolist(),
                           "period": spec.period})


def periodic_box(u0: FieldSet, pad: float = 1.0) -> BoxU:
    """Range of the initial periodic part, widened by ``pad`` on each side."""
    per = u0.periodic_part()
    return BoxU(tuple(per.min(axis=1) - pad), tuple(per.max(axis=1) + pad))


@dataclass
class PeriodicRun:
    result: RunResult
    gradient_means: np.ndarray  # (records, m)

    @property
    def mean_drift(self) -> float:
        return float(np.max(np.abs(self.gradient_means - self.gradient_means[0])))


def _gradient_means(values: np.ndarray, jump: np.ndarray, g: Grid1D) -> np.ndarray:
    inc = np.diff(values, axis=-1)
    seam = values[..., 0] + jump - values[..., -1]
    return (inc.sum(axis=-1) + seam) / g.length


def run_periodic(spec: DislocationSpec, profiles, n: int, eps: float = 0.0, t_end: float = 1.0,
                 cfl: float = 0.3, monitor_every: int = 1) -> PeriodicRun:
    """Evolve the periodic model on one period, storing the field plus its seam jump."""
    profiles = list(profiles)
    if len(profiles) != spec.m:
        raise ValueError(f"need {spec.m} profiles, got {len(profiles)}")
    if any(p.slope < 0 for p in profiles):
        raise ValueError("linear parts must have nonnegative slope")
    g = make_grid(0.0, spec.period, n, "periodic")
    u0 = ic.sample_profile(profiles, g)
    box = periodic_box(u0)
    system = dislocation_system(spec, box)
    config = RunConfig(system, tuple(profiles), g, eps=eps, t_end=t_end, cfl=cfl,
                       monitor_every=monitor_every, keep_snapshots=True)
    result = run(config, initial=u0)
    means = _gradient_means(result.snapshots, u0.seam_jump, g)
    return PeriodicRun(result, means)


@dataclass
class RescaleRow:
    delta: float
    n: int
    nonlocal_sup: float
    distance: float


def rescale_experiment(spec: DislocationSpec, base_profiles, deltas, dx: float = 0.01,
                       t_end: float = 0.15, eps: float = 0.0, cfl: float = 0.3):
    """Shrink the period to ``delta`` and compare against the purely local system.

    For each ``delta`` the model runs on ``[-1/(2 delta), 1/(2 delta)]`` with
    the nonlocal term scaled by ``delta``. Reported per row: the largest
    magnitude of that term over the run, and the weighted L2 distance of the
    final state to the run without it.
    """
    profiles = list(base_profiles)
    rows = []
    for delta in deltas:
        if delta <= 0:
            raise ValueError("delta must be positive")
        half = 0.5 / delta
        n = int(round(2 * half / dx))
        g = make_grid(-half, half, n, "line")
        u0 = ic.sample_profile(profiles, g)
        a_full, q_full = expand_matrices(spec)
        box = BoxU(tuple(u0.values.min(axis=1)), tuple(u0.values.max(axis=1)))
        scaled = dislocation_system(spec, box, nonlocal_scale=delta)
        local = linear(a_full, box)
        margin = transition_margin(u0)
        need = 5.0 * speed_bound(scaled, u0) * t_end
        if margin < need:
            raise DomainTooSmall(
                f"delta={delta}: transition zone {margin:.3g} from the boundary, need {need:.3g}"
            )
        common = dict(grid=g, eps=eps, t_end=t_end, cfl=cfl, profiles=tuple(profiles))
        with_term = run(RunConfig(scaled, keep_snapshots=True, **common), initial=u0)
        without = run(RunConfig(local, **common), initial=u0)
        snaps = with_term.snapshots
        integrals = g.dx * (snaps.sum(axis=-1) - 0.5 * (snaps[..., 0] + snaps[..., -1]))
        sup = float(np.max(np.abs(delta * integrals @ q_full.T)))
        rows.append(RescaleRow(float(delta), n, sup,
                               weighted_l2_distance(with_term.final, without.final)))
    return rows
