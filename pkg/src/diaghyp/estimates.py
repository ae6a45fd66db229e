"""Functionals bounded along solutions: norms, gradient entropy, dissipation, moduli."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import TOL_MONO, FieldSet, GradientSet, Grid1D, cell_increments, quad_trapezoid
from .systems import SystemSpec, jacobian_field

INV_E = math.exp(-1.0)


class MonotonicityViolation(ValueError):
    pass


@dataclass(frozen=True)
class MonitorReport:
    t: float
    linf: tuple
    l1grad: tuple
    entropy_n: float
    dissipation_d: float
    cum_dissipation: float
    gradsum_sup: float
    box_excursion: float
    mono_min: float
    # not part of the CSV schema; used by the verification checks
    entropy_quad_err: float = 0.0
    dissipation_scale: float = 0.0
    rise: tuple = ()
    grad_sup: tuple = ()

    def as_dict(self):
        return asdict(self)


def entropy_f(x):
    """``x ln x + 1/e`` for ``x >= 1/e``, zero on ``[0, 1/e]``."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("entropy_f is defined for nonnegative arguments only")
    safe = np.maximum(arr, INV_E)
    out = np.where(arr >= INV_E, safe * np.log(safe) + INV_E, 0.0)
    return float(out) if out.ndim == 0 else out


def clamp_gradients(w: GradientSet) -> np.ndarray:
    vals = w.values
    worst = float(vals.min()) if vals.size else 0.0
    if worst < -TOL_MONO:
        raise MonotonicityViolation(f"gradient entry {worst:.3g} is below -{TOL_MONO}")
    return np.maximum(vals, 0.0)


def gradient_entropy(w: GradientSet, g: Grid1D | None = None) -> float:
    g = w.grid if g is None else g
    return quad_trapezoid(entropy_f(clamp_gradients(w)).sum(axis=0), g)


def entropy_quadrature_error(w: GradientSet) -> float:
    integrand = entropy_f(clamp_gradients(w)).sum(axis=0)
    return float(w.grid.dx * np.sum(np.abs(np.diff(integrand))))


def _jacobian_at(u: FieldSet, spec: SystemSpec) -> np.ndarray:
    return jacobian_field(spec, spec.box.clamp(u.periodic_part()) + u.linear_part())


def dissipation_density(u: FieldSet, w: GradientSet, spec: SystemSpec) -> np.ndarray:
    jac = _jacobian_at(u, spec)
    return np.einsum("ijx,ix,jx->x", jac, w.values, w.values)


def dissipation(u: FieldSet, w: GradientSet, spec: SystemSpec) -> float:
    """Integral of ``sum_ij a^i_{,j}(u) w^i w^j``."""
    return quad_trapezoid(dissipation_density(u, w, spec), u.grid)


def dissipation_scale(w: GradientSet, spec: SystemSpec, u: FieldSet) -> float:
    """Magnitude against which a negative dissipation counts as rounding."""
    total = quad_trapezoid(w.values.sum(axis=0), w.grid)
    jac = _jacobian_at(u, spec)
    return total ** 2 * float(np.max(np.abs(jac))) if jac.size else 0.0


def l1_gradient(u: FieldSet) -> np.ndarray:
    """``integral |u^i_x|`` of the piecewise-linear interpolant, per component.

    For nondecreasing data this telescopes to the total rise.
    """
    return np.sum(np.abs(cell_increments(u)), axis=1)


def gradsum_sup(w: GradientSet) -> float:
    return float(np.max(w.values.sum(axis=0)))


@dataclass
class BudgetReport:
    t: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tol: np.ndarray
    constant: float

    @property
    def violation(self) -> np.ndarray:
        return self.lhs - self.rhs

    @property
    def max_violation(self) -> float:
        return float(np.max(self.violation)) if self.t.size else 0.0

    @property
    def passed(self) -> bool:
        return bool(np.all(self.violation <= self.tol))

    @property
    def worst_slack(self) -> float:
        """Smallest ``tol - violation``; negative means failure."""
        return float(np.min(self.tol - self.violation))


def budget_constant(spec: SystemSpec, u0_linf: float) -> float:
    return 2.0 * INV_E * spec.m ** 2 * spec.m1 * u0_linf


def entropy_budget(series, spec: SystemSpec, u0_linf: float) -> BudgetReport:
    """Check ``N(t) + int_0^t D <= N(0) + C t`` along a monitor series.

    ``C = (2/e) M^2 M_1 |u_0|_inf``. The tolerance at time ``t`` is
    ``1e-6 + 0.05 |N(0)|`` plus the largest quadrature error estimate seen
    up to ``t``.
    """
    series = list(series)
    if not series:
        empty = np.array([])
        return BudgetReport(empty, empty, empty, empty, 0.0)
    t = np.array([r.t for r in series])
    n = np.array([r.entropy_n for r in series])
    cum = np.array([r.cum_dissipation for r in series])
    quad_err = np.maximum.accumulate(np.array([r.entropy_quad_err for r in series]))
    c = budget_constant(spec, u0_linf)
    t0 = t[0]
    lhs = n + (cum - cum[0])
    rhs = n[0] + c * (t - t0)
    tol = 1e-6 + 0.05 * abs(n[0]) + quad_err
    return BudgetReport(t, lhs, rhs, tol, c)


def _orlicz_mass(s: np.ndarray, lam: float, g: Grid1D) -> float:
    r = s / lam
    return quad_trapezoid(r * np.log1p(r), g)


def luxemburg_llogl(samples, g: Grid1D, rtol: float = 1e-10) -> float:
    """Luxemburg norm for the Young function ``t ln(1 + t)``.

    The smallest ``lam`` with ``integral (|f|/lam) ln(1 + |f|/lam) <= 1``,
    found by bisection on ``lam``.
    """
    s = np.abs(np.asarray(samples, dtype=float))
    if not np.all(np.isfinite(s)):
        raise ValueError("Luxemburg norm needs finite samples")
    if not np.any(s > 0):
        return 0.0
    hi = float(s.max())
    while _orlicz_mass(s, hi, g) > 1.0:
        hi *= 2.0
    lo = hi
    while lo > 1e-300 and _orlicz_mass(s, lo, g) <= 1.0:
        lo *= 0.5
    # invariant: mass(lo) > 1 >= mass(hi)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if _orlicz_mass(s, mid, g) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def modulus_omega(delta: float, h: float) -> float:
    """``1 / ln(1/delta + 1) + 1 / ln(1/h + 1)`` with zero increments contributing nothing."""
    out = 0.0
    for v in (delta, h):
        if v > 0:
            out += 1.0 / math.log(1.0 / v + 1.0)
    return out


def modulus_check(times, states, dx: float, deltas, hs, sample_points: int = 2000,
                  seed: int = 0) -> float:
    """Largest ``|u(t + delta, x + h) - u(t, x)| / omega(delta, h)`` over random samples.

    ``states`` has shape ``(T, m, nodes)`` on uniformly spaced ``times``.
    Increments are rounded to whole snapshot gaps and whole cells; the
    ratio uses the rounded increments.
    """
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    if len(times) < 2:
        raise ValueError("need at least two snapshots")
    gap = float(np.mean(np.diff(times)))
    n_t, _, n_x = states.shape
    rng = np.random.default_rng(seed)
    worst = 0.0
    for delta in deltas:
        kt = int(round(delta / gap))
        for h in hs:
            kx = int(round(h / dx))
            if kt >= n_t or kx >= n_x:
                raise ValueError(f"increment (delta={delta}, h={h}) exceeds the stored data")
            omega = modulus_omega(kt * gap, kx * dx)
            if omega == 0.0:
                raise ValueError("both increments round to zero")
            ti = rng.integers(0, n_t - kt, sample_points)
            xi = rng.integers(0, n_x - kx, sample_points)
            diff = np.abs(states[ti + kt, :, xi + kx] - states[ti, :, xi])
            worst = max(worst, float(diff.max()) / omega)
    return worst


def weighted_l2_distance(u1: FieldSet, u2: FieldSet) -> float:
    """``sum_i integral (u1^i - u2^i)^2 exp(-2|x|)``."""
    if u1.grid != u2.grid:
        raise ValueError("fields live on different grids")
    x = u1.grid.nodes
    d2 = np.sum((u1.values - u2.values) ** 2, axis=0) * np.exp(-2.0 * np.abs(x))
    return quad_trapezoid(d2, u1.grid)
