"""Reference solutions that do not share code paths with the solver."""

from __future__ import annotations

import numpy as np

from .core import FieldSet
from .solver import RunConfig, run


class BracketError(RuntimeError):
    pass


def burgers_riemann(u_left: float, u_right: float, t: float, x: float) -> float:
    """Rarefaction solution of Burgers' equation for nondecreasing Riemann data."""
    if u_left > u_right:
        raise ValueError("decreasing Riemann data produce a shock; only u_left <= u_right is supported")
    if t <= 0:
        raise ValueError("t must be positive")
    if x <= u_left * t:
        return float(u_left)
    if x >= u_right * t:
        return float(u_right)
    return float(x / t)


def characteristics_scalar(speed, u0, t: float, x: float, tol: float = 1e-12,
                           max_doublings: int = 200) -> float:
    """Solve ``u = u0(x - speed(u) t)`` through the foot of the characteristic.

    With ``u0`` and ``speed`` nondecreasing, ``g(y) = y + t speed(u0(y)) - x``
    is nondecreasing, so its root is bracketed by doubling and then bisected
    to ``tol`` in ``y``.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return float(u0(x))

    def g(y):
        return y + t * float(speed(float(u0(y)))) - x

    lo, hi = x - 1.0, x + 1.0
    width = 1.0
    for _ in range(max_doublings):
        if g(lo) <= 0 <= g(hi):
            break
        width *= 2.0
        lo, hi = x - width, x + width
    else:
        raise BracketError(f"no sign change of the foot equation near x={x}, t={t}")
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    u_lo, u_hi = float(u0(lo)), float(u0(hi))
    if u_hi - u_lo <= tol:
        return float(u0(lo if abs(g(lo)) <= abs(g(hi)) else hi))
    # the foot sits on a jump of u0: the fan value solves speed(u) = (x - y) / t
    target = (x - 0.5 * (lo + hi)) / t
    while u_hi - u_lo > tol * max(1.0, abs(u_lo), abs(u_hi)):
        mid = 0.5 * (u_lo + u_hi)
        if mid in (u_lo, u_hi):
            break
        if float(speed(mid)) <= target:
            u_lo = mid
        else:
            u_hi = mid
    return 0.5 * (u_lo + u_hi)


def fine_reference(config: RunConfig, refine: int) -> FieldSet:
    """Solve on ``refine`` times more cells with ``eps / refine`` and sample the coarse nodes."""
    if int(refine) != refine or refine < 2:
        raise ValueError(f"refine must be an integer >= 2, got {refine}")
    fine = run(config.refined(int(refine))).final
    return FieldSet(fine.values[:, ::int(refine)], config.grid, fine.seam_jump)
