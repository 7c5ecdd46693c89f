"""
Finite-difference solver for the smoothing equation
===================================================

``u_t = 0.5 u_xx + r u_x`` on ``[-L, 0]`` with zero-flux (Neumann) ends,
stepped with Crank-Nicolson.  It is a check on the kernel route, sharing no
code with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .kernel import KernelParams
from .smoother import StepFunction, smooth_profile


@dataclass(frozen=True)
class Grid:
    """Uniform nodes ``-L, -L + h, ..., 0``."""

    L: float
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("grid needs at least 3 nodes")
        if not self.L > 0.0:
            raise ValueError("domain length must be positive")

    @property
    def h(self) -> float:
        return self.L / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        x = -self.L + self.h * np.arange(self.n)
        x[-1] = 0.0
        return x


@dataclass
class FieldOnGrid:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field has non-finite values")


@dataclass(frozen=True)
class PdeConfig:
    r: float
    t_end: float
    dt: float
    grid: Grid
    # Implicit Euler half-steps before Crank-Nicolson, to damp the
    # high-frequency modes that discontinuous data excite.
    startup_steps: int = 4

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.t_end < 0.0:
            raise ValueError("t_end must be >= 0")
        if self.t_end > 0.0 and self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")


def default_length(f: StepFunction | None, r: float, t_end: float) -> float:
    """Domain length past which the solution is flat to machine precision."""
    support = abs(f.breakpoints[0]) if f is not None else 0.0
    return support + abs(r) * t_end + 8.0 * math.sqrt(t_end)


def operator_bands(grid: Grid, r: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sub-, main and super-diagonal of the discrete ``0.5 d2/dx2 + r d/dx``.

    Centred drift while the cell Peclet number ``h|r|`` is at most 1, upwind
    otherwise.  The mirrored ghost nodes at both ends fold into the first and
    last rows.
    """
    n, h = grid.n, grid.h
    diff = 0.5 / h**2
    if h * abs(r) <= 1.0:
        lower = np.full(n, diff - r / (2 * h))
        upper = np.full(n, diff + r / (2 * h))
    elif r > 0:
        lower = np.full(n, diff)
        upper = np.full(n, diff + r / h)
    else:
        lower = np.full(n, diff - r / h)
        upper = np.full(n, diff)
    # u_{-1} = u_1 and u_n = u_{n-2}: the drift contributions cancel.
    upper[0] = 2 * diff
    lower[0] = 0.0
    lower[-1] = 2 * diff
    upper[-1] = 0.0
    main = -(lower + upper)
    return lower, main, upper


def _apply(lower, main, upper, u):
    out = main * u
    out[1:] += lower[1:] * u[:-1]
    out[:-1] += upper[:-1] * u[1:]
    return out


def _banded(lower, main, upper, theta_dt):
    ab = np.zeros((3, len(main)))
    ab[0, 1:] = -theta_dt * upper[:-1]
    ab[1] = 1.0 - theta_dt * main
    ab[2, :-1] = -theta_dt * lower[1:]
    return ab


def solve(f0: FieldOnGrid, cfg: PdeConfig, save_every: int = 1) -> list[tuple[float, FieldOnGrid]]:
    """Time-step the smoothing equation from ``f0`` up to ``cfg.t_end``.

    Returns ``(time, field)`` pairs for ``t = 0``, every ``save_every``-th step
    and ``t_end``.  The first ``cfg.startup_steps`` half-steps are implicit
    Euler (Rannacher start); the rest are Crank-Nicolson.
    """
    if f0.grid != cfg.grid:
        raise ValueError("initial field lives on a different grid")
    lower, main, upper = operator_bands(cfg.grid, cfg.r)
    u = f0.values.copy()
    out = [(0.0, FieldOnGrid(cfg.grid, u.copy()))]
    if cfg.t_end == 0.0:
        return out

    n_steps = max(1, int(round(cfg.t_end / cfg.dt)))
    dt = cfg.t_end / n_steps
    startup = min(cfg.startup_steps, 2 * n_steps)
    startup -= startup % 2
    # An implicit Euler half-step and the implicit half of a Crank-Nicolson
    # step share the matrix I - (dt/2) A.
    ab = _banded(lower, main, upper, 0.5 * dt)
    t = 0.0
    step = 0
    for k in range(startup):
        u = solve_banded((1, 1), ab, u, check_finite=False)
        t += 0.5 * dt
        if k % 2 == 1:
            step += 1
            if step % save_every == 0 or step == n_steps:
                out.append((t, FieldOnGrid(cfg.grid, u.copy())))
    while step < n_steps:
        rhs = u + 0.5 * dt * _apply(lower, main, upper, u)
        u = solve_banded((1, 1), ab, rhs, check_finite=False)
        step += 1
        t = step * dt
        if step % save_every == 0 or step == n_steps:
            out.append((t, FieldOnGrid(cfg.grid, u.copy())))
    return out


def cell_averages(f, grid: Grid) -> np.ndarray:
    """Average a step function over the dual cells around each node."""
    x, h = grid.x, grid.h
    lo = np.maximum(x - 0.5 * h, -grid.L)
    hi = np.minimum(x + 0.5 * h, 0.0)
    if not isinstance(f, StepFunction):
        return np.asarray([f(v) for v in x], dtype=float)
    out = np.empty(grid.n)
    for i in range(grid.n):
        a, b = lo[i], hi[i]
        acc = 0.0
        for s_lo, s_hi, v in f.segments():
            w = min(b, s_hi) - max(a, s_lo)
            if w > 0.0:
                acc += v * w
        out[i] = acc / (b - a)
    return out


@dataclass
class ComparisonReport:
    max_error: float
    x_at_max: float
    t: float
    n: int
    dt: float


def compare_with_kernel(f, params: KernelParams, cfg: PdeConfig) -> ComparisonReport:
    """Run the solver to ``params.t`` and measure its sup-norm distance from
    the kernel smoothing, on nodes with ``x >= -L/2``."""
    if params.r != cfg.r:
        raise ValueError("drift of params and solver config differ")
    if cfg.t_end != params.t:
        cfg = PdeConfig(cfg.r, params.t, cfg.dt, cfg.grid, cfg.startup_steps)
    grid = cfg.grid
    u0 = FieldOnGrid(grid, cell_averages(f, grid))
    traj = solve(u0, cfg, save_every=10**9)
    u_end = traj[-1][1].values
    keep = grid.x >= -0.5 * grid.L
    xs = grid.x[keep]
    ref = smooth_profile(f, params, xs).values
    err = np.abs(u_end[keep] - ref)
    i = int(np.argmax(err))
    return ComparisonReport(float(err[i]), float(xs[i]), params.t, grid.n, cfg.t_end / max(1, round(cfg.t_end / cfg.dt)))
