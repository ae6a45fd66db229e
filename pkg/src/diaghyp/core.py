"""Uniform 1D grids, component fields and the discrete calculus on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LINE = "line"
PERIODIC = "periodic"
TOPOLOGIES = (LINE, PERIODIC)

# Forward increments of monotone fields may dip below zero by pure rounding.
TOL_MONO = 1e-12


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int
    topology: str = LINE

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got {self.x_min} >= {self.x_max}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need an integer cell count n >= 2, got {self.n}")
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def periodic(self) -> bool:
        return self.topology == PERIODIC

    @property
    def node_count(self) -> int:
        return self.n if self.periodic else self.n + 1

    @property
    def nodes(self) -> np.ndarray:
        j = np.arange(self.node_count, dtype=float)
        return self.x_min + j * self.dx

    def refined(self, factor: int) -> "Grid1D":
        return Grid1D(self.x_min, self.x_max, self.n * factor, self.topology)


def make_grid(x_min, x_max, n, topology=LINE) -> Grid1D:
    return Grid1D(x_min, x_max, n, topology)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FieldSet:
    """``m`` scalar components sampled on the nodes of one grid.

    ``seam_jump`` only matters on periodic grids: it is the rise of each
    component across one period, so the field is periodic up to a linear
    part (``u(x + L) = u(x) + seam_jump``). It is zero for truly periodic
    data.
    """

    values: np.ndarray
    grid: Grid1D
    seam_jump: np.ndarray | None = field(default=None)

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.ndim != 2 or vals.shape[1] != self.grid.node_count:
            raise ValueError(
                f"values shape {vals.shape} does not match {self.grid.node_count} grid nodes"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "values", _frozen(vals))
        jump = np.zeros(vals.shape[0]) if self.seam_jump is None else self.seam_jump
        jump = np.asarray(jump, dtype=float).reshape(-1)
        if jump.shape != (vals.shape[0],):
            raise ValueError("seam_jump needs one entry per component")
        if np.any(jump != 0) and not self.grid.periodic:
            raise ValueError("seam_jump is only meaningful on periodic grids")
        object.__setattr__(self, "seam_jump", _frozen(jump))

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def with_values(self, values) -> "FieldSet":
        return FieldSet(values, self.grid, self.seam_jump)

    def linear_part(self) -> np.ndarray:
        """Per-component linear trend ``seam_jump * (x - x_min) / L`` at the nodes."""
        g = self.grid
        slope = self.seam_jump / g.length
        return slope[:, None] * (g.nodes - g.x_min)[None, :]

    def periodic_part(self) -> np.ndarray:
        return self.values - self.linear_part()


@dataclass(frozen=True)
class GradientSet:
    values: np.ndarray
    grid: Grid1D

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(np.atleast_2d(self.values)))

    @property
    def m(self) -> int:
        return self.values.shape[0]


def forward_gradient(f: FieldSet) -> GradientSet:
    """One-sided differences ``(u[j+1] - u[j]) / dx``.

    On a line grid the last node repeats its left neighbour; on a periodic
    grid the index wraps (adding the seam jump).
    """
    u = f.values
    dx = f.grid.dx
    w = np.empty_like(u)
    w[:, :-1] = (u[:, 1:] - u[:, :-1]) / dx
    if f.grid.periodic:
        w[:, -1] = (u[:, 0] + f.seam_jump - u[:, -1]) / dx
    else:
        w[:, -1] = w[:, -2]
    return GradientSet(w, f.grid)


def cell_increments(f: FieldSet) -> np.ndarray:
    """The ``n`` cell increments ``u[j+1] - u[j]`` (periodic seam included)."""
    u = f.values
    inc = np.diff(u, axis=1)
    if f.grid.periodic:
        inc = np.concatenate([inc, (u[:, 0] + f.seam_jump - u[:, -1])[:, None]], axis=1)
    return inc


def quad_trapezoid(samples, grid: Grid1D) -> float:
    """Integrate node samples over the grid.

    Trapezoid rule on line grids, rectangle rule over the full period on
    periodic grids.
    """
    s = np.asarray(samples, dtype=float)
    if s.shape[-1] != grid.node_count:
        raise ValueError(f"expected {grid.node_count} samples, got {s.shape[-1]}")
    if grid.periodic:
        return float(grid.dx * np.sum(s, axis=-1))
    return float(grid.dx * (np.sum(s, axis=-1) - 0.5 * (s[..., 0] + s[..., -1])))
