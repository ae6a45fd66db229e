"""Nondecreasing initial profiles and their mollification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import FieldSet, Grid1D, cell_increments

PROFILE_KINDS = ("smoothstep", "tanhstep", "table", "linear_ramp", "sine_ramp")


@dataclass(frozen=True)
class MonotoneProfile:
    """One component of nondecreasing initial data.

    kinds and their parameters::

        smoothstep   lo, hi, center, width   cubic ramp over [center - w/2, center + w/2];
                                             width 0 gives a sharp step
        tanhstep     lo, hi, center, width   lo + (hi - lo) (1 + tanh((x - center) / width)) / 2
        table        xs, ys                  piecewise linear, constant beyond the ends
        linear_ramp  slope, offset           slope * x + offset
        sine_ramp    slope, amplitude, period, phase
                     slope * x + amplitude * period / (2 pi) * sin(2 pi (x - phase) / period);
                     periodic up to its linear part, nondecreasing while amplitude <= slope
    """

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        p = dict(self.params)
        if self.kind in ("smoothstep", "tanhstep"):
            _require(p, "lo", "hi", "center", "width")
            if p["hi"] < p["lo"]:
                raise ValueError(f"{self.kind} needs lo <= hi")
            if p["width"] < 0 or (self.kind == "tanhstep" and p["width"] == 0):
                raise ValueError(f"{self.kind} needs a positive width")
        elif self.kind == "table":
            _require(p, "xs", "ys")
            xs, ys = np.asarray(p["xs"], float), np.asarray(p["ys"], float)
            if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 1:
                raise ValueError("table needs equal-length xs and ys")
            if np.any(np.diff(xs) <= 0):
                raise ValueError("table xs must be strictly increasing")
            if np.any(np.diff(ys) < 0):
                raise ValueError("table ys must be nondecreasing")
            if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
                raise ValueError("table entries must be finite")
        elif self.kind == "linear_ramp":
            _require(p, "slope", "offset")
            if p["slope"] < 0:
                raise ValueError("linear_ramp needs slope >= 0")
        else:
            _require(p, "slope", "amplitude", "period")
            p.setdefault("phase", 0.0)
            if p["slope"] < 0 or p["period"] <= 0:
                raise ValueError("sine_ramp needs slope >= 0 and period > 0")
            if abs(p["amplitude"]) > p["slope"]:
                raise ValueError("sine_ramp with |amplitude| > slope is not monotone")
        object.__setattr__(self, "params", p)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "smoothstep":
            if p["width"] == 0:
                s = (x >= p["center"]).astype(float)
            else:
                s = np.clip((x - p["center"]) / p["width"] + 0.5, 0.0, 1.0)
                s = s * s * (3.0 - 2.0 * s)
            return p["lo"] + (p["hi"] - p["lo"]) * s
        if self.kind == "tanhstep":
            s = 0.5 * (1.0 + np.tanh((x - p["center"]) / p["width"]))
            return p["lo"] + (p["hi"] - p["lo"]) * s
        if self.kind == "table":
            return np.interp(x, p["xs"], p["ys"])
        if self.kind == "linear_ramp":
            return p["slope"] * x + p["offset"]
        k = 2.0 * np.pi / p["period"]
        return p["slope"] * x + p["amplitude"] / k * np.sin(k * (x - p["phase"]))

    @property
    def slope(self) -> float:
        """Linear growth rate at infinity (nonzero only for ramps)."""
        return float(self.params.get("slope", 0.0)) if "ramp" in self.kind else 0.0

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for key, val in self.params.items():
            out[key] = list(val) if isinstance(val, (list, tuple, np.ndarray)) else val
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "MonotoneProfile":
        d = dict(d)
        return cls(d.pop("kind"), d)


def _require(p, *keys):
    missing = [k for k in keys if k not in p]
    if missing:
        raise ValueError(f"profile is missing parameters {missing}")


def smoothstep(lo, hi, center, width):
    return MonotoneProfile("smoothstep", dict(lo=lo, hi=hi, center=center, width=width))


def tanhstep(lo, hi, center, width):
    return MonotoneProfile("tanhstep", dict(lo=lo, hi=hi, center=center, width=width))


def table(xs, ys):
    return MonotoneProfile("table", dict(xs=list(xs), ys=list(ys)))


def linear_ramp(slope, offset=0.0):
    return MonotoneProfile("linear_ramp", dict(slope=slope, offset=offset))


def sine_ramp(slope, amplitude, period=1.0, phase=0.0):
    return MonotoneProfile("sine_ramp", dict(slope=slope, amplitude=amplitude,
                                              period=period, phase=phase))


def sample_profile(profiles, g: Grid1D, box=None) -> FieldSet:
    """Sample one profile per component on the grid nodes.

    On a periodic grid ramps become the seam jump of the field. With ``box``
    given, samples of the periodic part must lie inside it.
    """
    profiles = list(profiles)
    x = g.nodes
    vals = np.array([p(x) for p in profiles])
    jump = None
    if g.periodic:
        jump = np.array([p.slope * g.length for p in profiles])
        for i, p in enumerate(profiles):
            seam = float(p(g.x_max) - p(g.x_min))
            if abs(seam - jump[i]) > 1e-9 * max(1.0, abs(jump[i])):
                raise ValueError(
                    f"component {i}: profile is not periodic-plus-linear on the grid "
                    f"(rise {seam:.6g} across the period, linear part {jump[i]:.6g})"
                )
    f = FieldSet(vals, g, jump)
    if np.any(cell_increments(f) < 0):
        raise ValueError("sampled profile is not nondecreasing")
    if box is not None:
        exc = box.excursion(f.periodic_part())
        if exc > 1e-9:
            raise ValueError(f"sampled profile leaves the admissible box by {exc:.3g}")
    return f


def _bump(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


@lru_cache(maxsize=1)
def bump_normalization() -> float:
    x = np.linspace(-1.0, 1.0, 2001)
    y = _bump(x)
    return float(np.sum(y[1:] + y[:-1]) * 0.5 * (x[1] - x[0]))


def mollifier_weights(eps: float, dx: float) -> np.ndarray:
    """Discrete kernel ``dx * eta_eps(k dx)``, renormalized to sum to one."""
    half = int(np.ceil(eps / dx))
    k = np.arange(-half, half + 1)
    w = _bump(k * dx / eps) / (eps * bump_normalization()) * dx
    return w / w.sum()


def mollify(f: FieldSet, eps: float) -> FieldSet:
    """Convolve every component with the scaled bump ``eta_eps``.

    Outside the domain the field is extended by its boundary values (line)
    or periodically, seam jump included. Kernels narrower than two cells are
    under-resolved: the field is returned unchanged with a warning.
    """
    if not eps > 0:
        raise ValueError(f"mollification width must be positive, got {eps}")
    g = f.grid
    if eps < 2 * g.dx:
        warnings.warn(f"mollifier width {eps} < 2 dx = {2 * g.dx}; data left unmollified",
                      stacklevel=2)
        return f
    w = mollifier_weights(eps, g.dx)
    half = (w.size - 1) // 2
    u = f.values
    if g.periodic:
        reps = int(np.ceil(half / g.n))
        parts = [u + s * f.seam_jump[:, None] for s in range(-reps, reps + 1)]
        ext = np.concatenate(parts, axis=1)
        start = reps * g.n - half
        ext = ext[:, start:start + g.n + 2 * half]
    else:
        ext = np.pad(u, ((0, 0), (half, half)), mode="edge")
    out = np.array([np.convolve(row, w, mode="valid") for row in ext])
    return f.with_values(out)


def check_monotone(f: FieldSet) -> float:
    """Smallest forward difference quotient over components and cells."""
    return float(np.min(cell_increments(f)) / f.grid.dx)
