"""Diagonal systems ``u^i_t + a^i(u) u^i_x = 0`` and hypothesis checks.

A velocity map takes an array of shape ``(m, ...)`` (one row per
component, any trailing shape) and returns the velocities with the same
shape. Jacobian maps return shape ``(m, m, ...)`` with entry ``[i, j]``
holding ``d a^i / d u^j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

BOX_TOL = 1e-9


class OutsideBoxError(ValueError):
    pass


@dataclass(frozen=True)
class BoxU:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("box bounds differ in length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"box needs lo <= hi, got {lo} / {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def m(self) -> int:
        return len(self.lo)

    def arrays(self):
        return np.array(self.lo), np.array(self.hi)

    def excursion(self, u) -> float:
        """Largest distance of any sample of ``u`` (shape ``(m, ...)``) outside the box."""
        lo, hi = self.arrays()
        u = np.asarray(u, dtype=float)
        shape = (-1,) + (1,) * (u.ndim - 1)
        below = lo.reshape(shape) - u
        above = u - hi.reshape(shape)
        return float(max(0.0, below.max(), above.max()))

    def clamp(self, u):
        lo, hi = self.arrays()
        u = np.asarray(u, dtype=float)
        shape = (-1,) + (1,) * (u.ndim - 1)
        return np.clip(u, lo.reshape(shape), hi.reshape(shape))


@dataclass(frozen=True)
class NonlocalTerm:
    """Constant-in-space velocity shift ``scale * coupling @ (integral of u over the domain)``."""

    coupling: np.ndarray
    scale: float = 1.0


@dataclass(frozen=True)
class SystemSpec:
    m: int
    box: BoxU
    velocity: Callable
    m0: float
    m1: float
    jacobian: Callable | None = None
    name: str = "custom"
    matrix: np.ndarray | None = None
    nonlocal_term: NonlocalTerm | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.box.m != self.m:
            raise ValueError(f"box has {self.box.m} components, system has {self.m}")


def _point(spec: SystemSpec, u) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(spec.m)
    exc = spec.box.excursion(u)
    if exc > BOX_TOL:
        raise OutsideBoxError(f"u={u} lies {exc:.3g} outside the admissible box")
    return spec.box.clamp(u)


def eval_velocity(spec: SystemSpec, u) -> np.ndarray:
    return np.asarray(spec.velocity(_point(spec, u)), dtype=float)


def fd_jacobian(spec: SystemSpec, u) -> np.ndarray:
    """Central differences with steps kept inside the box (one-sided at faces)."""
    u = np.asarray(u, dtype=float)
    lo, hi = spec.box.arrays()
    shape = (-1,) + (1,) * (u.ndim - 1)
    lo, hi = lo.reshape(shape), hi.reshape(shape)
    jac = np.empty((spec.m,) + u.shape)
    for j in range(spec.m):
        h = 1e-6 * np.maximum(1.0, np.abs(u[j]))
        up = np.minimum(u[j] + h, hi[j])
        dn = np.maximum(u[j] - h, lo[j])
        span = up - dn
        span = np.where(span > 0, span, 1.0)
        u_up = u.copy()
        u_up[j] = up
        u_dn = u.copy()
        u_dn[j] = dn
        jac[:, j] = (np.asarray(spec.velocity(u_up)) - np.asarray(spec.velocity(u_dn))) / span
    return jac


def jacobian_field(spec: SystemSpec, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if spec.jacobian is None:
        return fd_jacobian(spec, u)
    return np.asarray(spec.jacobian(u), dtype=float)


def eval_jacobian(spec: SystemSpec, u) -> np.ndarray:
    return jacobian_field(spec, _point(spec, u))


def copositive_2x2(mat) -> bool:
    """Exact copositivity test for a 2x2 matrix (symmetric part is what counts)."""
    a = np.asarray(mat, dtype=float)
    a11, a22 = a[0, 0], a[1, 1]
    off = a[0, 1] + a[1, 0]
    return bool(a11 >= 0 and a22 >= 0 and off >= -2.0 * np.sqrt(a11 * a22))


def simplex_lattice(m: int, k: int) -> np.ndarray:
    """All points ``c / k`` with nonnegative integer ``c`` summing to ``k``."""
    pts = []
    for bars in itertools.combinations(range(k + m - 1), m - 1):
        prev = -1
        c = []
        for b in bars:
            c.append(b - prev - 1)
            prev = b
        c.append(k + m - 2 - prev)
        pts.append(c)
    return np.array(pts, dtype=float) / k


def _simplex_minimizer_2(jac: np.ndarray) -> np.ndarray:
    """Minimizer of xi^T J xi over the 2-simplex, for each trailing sample."""
    # q(t) = a t^2 + b t (1-t) + c (1-t)^2 on t in [0, 1]
    a, c = jac[0, 0], jac[1, 1]
    b = jac[0, 1] + jac[1, 0]
    curv = a + c - b
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(curv > 0, (2 * c - b) / (2 * curv), 0.0)
    t = np.clip(np.nan_to_num(t), 0.0, 1.0)
    return np.stack([t, 1.0 - t])


@dataclass
class H2Report:
    min_quadform: float
    worst_u: np.ndarray
    worst_xi: np.ndarray
    exact_2x2: bool | None = None

    @property
    def passed(self) -> bool:
        return self.min_quadform >= -1e-12


def check_h2(spec: SystemSpec, samples_u: int = 9, samples_xi: int = 12) -> H2Report:
    """Sampled copositivity of the Jacobian over the box.

    ``u`` runs over a ``samples_u``-per-axis lattice of the box and ``xi``
    over the ``samples_xi``-subdivision lattice of the unit simplex. For
    ``m == 2`` the exact minimizing direction at each ``u`` is added, and
    for constant Jacobians the closed-form verdict is reported alongside.
    """
    if samples_u < 1 or samples_xi < 1:
        raise ValueError("need at least one sample per axis")
    lo, hi = spec.box.arrays()
    axes = [np.linspace(a, b, samples_u) if samples_u > 1 else np.array([0.5 * (a + b)])
            for a, b in zip(lo, hi)]
    grid_u = np.array(list(itertools.product(*axes))).T  # (m, P)
    jac = jacobian_field(spec, grid_u)  # (m, m, P)
    xis = simplex_lattice(spec.m, samples_xi)  # (K, m)
    q = np.einsum("ki,ijp,kj->kp", xis, jac, xis)
    best = np.unravel_index(np.argmin(q), q.shape)
    min_q = float(q[best])
    worst_u = grid_u[:, best[1]]
    worst_xi = xis[best[0]]
    exact = None
    if spec.m == 2:
        xi_star = _simplex_minimizer_2(jac)  # (2, P)
        q_star = np.einsum("ip,ijp,jp->p", xi_star, jac, xi_star)
        p = int(np.argmin(q_star))
        if q_star[p] < min_q:
            min_q = float(q_star[p])
            worst_u = grid_u[:, p]
            worst_xi = xi_star[:, p]
        if spec.matrix is not None:
            exact = copositive_2x2(spec.matrix)
    return H2Report(min_q, worst_u, worst_xi, exact)


def estimate_bounds(velocity, box: BoxU, jacobian=None, samples: int = 9):
    """Sampled ``(M_0, M_1)``: sup of ``|a^i|`` and of Jacobian row sums over the box."""
    lo, hi = box.arrays()
    axes = [np.linspace(a, b, samples) for a, b in zip(lo, hi)]
    pts = np.array(list(itertools.product(*axes))).T
    vel = np.asarray(velocity(pts))
    m0 = float(np.max(np.abs(vel)))
    tmp = SystemSpec(box.m, box, velocity, m0, 0.0, jacobian)
    jac = jacobian_field(tmp, pts)
    m1 = float(np.max(np.sum(np.abs(jac), axis=1)))
    return m0, m1


# -- shipped systems ---------------------------------------------------------


def burgers(lo: float = 0.0, hi: float = 1.0) -> SystemSpec:
    box = BoxU((lo,), (hi,))

    def vel(u):
        return np.array(u, dtype=float, copy=True)

    def jac(u):
        u = np.asarray(u, dtype=float)
        return np.ones((1, 1) + u.shape[1:])

    return SystemSpec(1, box, vel, max(abs(lo), abs(hi)), 1.0, jac, name="burgers",
                      params={"box": [[lo], [hi]]})


def transport(speed: float, lo: float = 0.0, hi: float = 1.0) -> SystemSpec:
    """Scalar linear transport with constant speed."""
    box = BoxU((lo,), (hi,))

    def vel(u):
        return np.full(np.shape(u), float(speed))

    def jac(u):
        return np.zeros((1, 1) + np.shape(u)[1:])

    return SystemSpec(1, box, vel, abs(speed), 0.0, jac, name="transport",
                      params={"speed": speed, "box": [[lo], [hi]]})


def crossing() -> SystemSpec:
    """``a = (cos u2, u1 sin u2)`` on ``[0, 1] x [-pi/2, pi/2]``: copositive, eigenvalues cross."""
    box = BoxU((0.0, -np.pi / 2), (1.0, np.pi / 2))

    def vel(u):
        u = np.asarray(u, dtype=float)
        return np.stack([np.cos(u[1]), u[0] * np.sin(u[1])])

    def jac(u):
        u = np.asarray(u, dtype=float)
        s, c = np.sin(u[1]), np.cos(u[1])
        zero = np.zeros_like(u[0])
        return np.stack([np.stack([zero, -s]), np.stack([s, u[0] * c])])

    # row sums of |Da| peak at |sin t| + |cos t| = sqrt(2)
    return SystemSpec(2, box, vel, 1.0, float(np.sqrt(2.0)), jac, name="crossing")


def linear(matrix, box: BoxU | None = None) -> SystemSpec:
    """``a(u) = A u``."""
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    m = a.shape[0]
    if box is None:
        box = BoxU((0.0,) * m, (1.0,) * m)
    if box.m != m:
        raise ValueError(f"box has {box.m} components, matrix has {m}")
    a.setflags(write=False)
    lo, hi = box.arrays()
    scale = np.maximum(np.abs(lo), np.abs(hi))
    m0 = float(np.max(np.abs(a) @ scale))
    m1 = float(np.max(np.sum(np.abs(a), axis=1)))

    def vel(u):
        return np.tensordot(a, np.asarray(u, dtype=float), axes=1)

    def jac(u):
        tail = np.shape(u)[1:]
        return np.broadcast_to(a.reshape(a.shape + (1,) * len(tail)), a.shape + tail).copy()

    return SystemSpec(m, box, vel, m0, m1, jac, name="linear", matrix=a,
                      params={"A": a.tolist(), "box": [list(box.lo), list(box.hi)]})


def linear_case(spec: SystemSpec) -> str | None:
    """Which uniqueness case of the linear theory applies: ``"i"``, ``"ii"`` or ``None``."""
    a = spec.matrix
    if a is None or spec.m < 2:
        return None
    upper = np.triu(a)
    if np.all(upper >= 0):
        return "i"
    off = a[~np.eye(spec.m, dtype=bool)]
    if np.all(off <= 0) and check_h2(spec).passed:
        return "ii"
    return None
