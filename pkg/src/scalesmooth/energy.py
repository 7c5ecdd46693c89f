"""Weighted Dirichlet energy ``I(u) = int u_x^2 e^{2rx} dx`` and its decay."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pde import FieldOnGrid

REL_SLACK = 1e-10


@dataclass
class EnergyReport:
    times: np.ndarray
    energies: np.ndarray
    monotone_nonincreasing: bool
    max_uptick: float
    # True when r <= 0: the weight is not integrable on the half-line, so
    # the values only describe the truncated grid.
    truncated: bool


def derivative(u: FieldOnGrid) -> np.ndarray:
    """Second-order finite-difference ``u_x`` (one-sided at the ends)."""
    v, h = u.values, u.grid.h
    if len(v) < 3:
        raise ValueError("need at least 3 nodes")
    du = np.empty_like(v)
    du[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    du[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    du[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
    return du


def energy(u: FieldOnGrid, r: float) -> float:
    """Trapezoidal ``int (u_x)^2 e^{2rx} dx`` over the grid."""
    if u.grid.n < 3:
        raise ValueError("need at least 3 nodes")
    w = derivative(u) ** 2 * np.exp(2.0 * r * u.grid.x)
    return float(np.trapezoid(w, dx=u.grid.h))


def decay_report(trajectory, r: float, rel_slack: float = REL_SLACK) -> EnergyReport:
    """Energies along a solver trajectory and whether they never increase.

    A step counts as an increase only if ``I_{k+1} > I_k + rel_slack (1 + I_k)``.
    """
    if not trajectory:
        raise ValueError("empty trajectory")
    grid = trajectory[0][1].grid
    for _, u in trajectory:
        if u.grid != grid:
            raise ValueError("trajectory mixes grids")
    times = np.array([t for t, _ in trajectory], dtype=float)
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("trajectory times must increase")
    energies = np.array([energy(u, r) for _, u in trajectory])
    up = np.diff(energies) - rel_slack * (1.0 + energies[:-1])
    max_up = float(max(0.0, np.max(np.diff(energies), initial=0.0)))
    return EnergyReport(times, energies, bool(np.all(up <= 0.0)), max_up, r <= 0.0)
