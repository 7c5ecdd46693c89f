import math

import numpy as np
import pytest

from scalesmooth.kernel import KernelParams
from scalesmooth.pde import (
    FieldOnGrid,
    Grid,
    PdeConfig,
    cell_averages,
    compare_with_kernel,
    default_length,
    operator_bands,
    solve,
)
from scalesmooth.smoother import IncomeSeries, StepFunction, step_from_samples


@pytest.fixture
def step():
    return step_from_samples(IncomeSeries.from_pairs([(-3, 1), (-2, 4), (-1, 2), (-0.5, 5), (0, 5)]))


def bump(y):
    return math.exp(-0.5 * (y + 3.0) ** 2)


def test_grid():
    g = Grid(12.0, 2401)
    assert g.h == pytest.approx(0.005)
    assert g.x[0] == -12.0 and g.x[-1] == 0.0
    with pytest.raises(ValueError):
        Grid(1.0, 2)


def test_config_checks():
    g = Grid(1.0, 11)
    with pytest.raises(ValueError):
        PdeConfig(0.0, 1.0, 0.0, g)
    with pytest.raises(ValueError):
        PdeConfig(0.0, 0.1, 0.5, g)


@pytest.mark.parametrize("r", [-2.0, 0.0, 0.7])
def test_constant_is_exact(r):
    g = Grid(8.0, 161)
    traj = solve(FieldOnGrid(g, np.full(g.n, 3.5)), PdeConfig(r, 1.0, 0.01, g))
    assert traj[0][0] == 0.0 and traj[-1][0] == pytest.approx(1.0)
    for _, u in traj:
        np.testing.assert_allclose(u.values, 3.5, atol=1e-12, rtol=0)


def test_operator_rows_sum_to_zero():
    for r in (-3.0, 0.0, 0.4, 500.0):
        lower, main, upper = operator_bands(Grid(5.0, 51), r)
        assert np.allclose(lower + main + upper, 0.0)


def test_neumann_eigenmode_decay():
    """cos(pi (x + L)/L) is an exact eigenvector of the discrete Neumann
    Laplacian; its amplitude follows the scheme's amplification factor and
    approaches the continuous factor exp(-pi^2 t / (2 L^2))."""
    L, n, dt, T = 4.0, 401, 0.01, 1.0
    g = Grid(L, n)
    mode = np.cos(np.pi * (g.x + L) / L)
    traj = solve(FieldOnGrid(g, mode), PdeConfig(0.0, T, dt, g))
    amp = traj[-1][1].values @ mode / (mode @ mode)

    lam = (np.cos(np.pi * g.h / L) - 1.0) / g.h**2
    z = 0.5 * dt * lam
    steps = int(round(T / dt))
    discrete = (1 / (1 - z)) ** 4 * ((1 + z) / (1 - z)) ** (steps - 2)
    assert amp == pytest.approx(discrete, rel=1e-10)
    assert amp == pytest.approx(math.exp(-0.5 * (np.pi / L) ** 2 * T), rel=1e-4)


def test_quarter_cosine_decays_in_l2():
    L = 6.0
    g = Grid(L, 301)
    f0 = np.cos(np.pi * g.x / (2 * L))
    traj = solve(FieldOnGrid(g, f0), PdeConfig(0.0, 2.0, 0.01, g))
    norms = [np.sqrt(np.trapezoid((u.values - u.values.mean()) ** 2, dx=g.h)) for _, u in traj]
    assert np.all(np.diff(norms) < 0)


def test_step_data_matches_kernel(step):
    cfg = PdeConfig(0.5, 1.0, 1e-3, Grid(12.0, 2401))
    rep = compare_with_kernel(step, KernelParams(0.5, 1.0), cfg)
    assert rep.max_error <= 5e-3


def test_compare_constant():
    rep = compare_with_kernel(StepFunction.constant(2.0), KernelParams(0.3, 1.0), PdeConfig(0.3, 1.0, 0.01, Grid(10.0, 201)))
    assert rep.max_error <= 1e-12


def test_compare_bump():
    rep = compare_with_kernel(bump, KernelParams(0.0, 1.0), PdeConfig(0.0, 1.0, 0.01, Grid(12.0, 601)))
    assert rep.max_error <= 2e-3


def test_second_order_convergence():
    errs = []
    for n, dt in ((121, 0.05), (241, 0.025), (481, 0.0125)):
        cfg = PdeConfig(0.0, 1.0, dt, Grid(12.0, n))
        errs.append(compare_with_kernel(bump, KernelParams(0.0, 1.0), cfg).max_error)
    assert errs[1] <= 0.35 * errs[0]
    assert errs[2] <= 0.35 * errs[1]


def test_drift_convergence():
    errs = []
    for n, dt in ((121, 0.05), (241, 0.025)):
        cfg = PdeConfig(0.5, 1.0, dt, Grid(12.0, n))
        errs.append(compare_with_kernel(bump, KernelParams(0.5, 1.0), cfg).max_error)
    assert errs[1] <= 0.35 * errs[0]


@pytest.mark.parametrize("r", [-1.0, 0.0, 0.5, 1.0])
def test_discrete_maximum_principle(step, r):
    g = Grid(12.0, 601)
    traj = solve(FieldOnGrid(g, cell_averages(step, g)), PdeConfig(r, 1.0, 0.01, g))
    lo, hi = step.bounds
    for _, u in traj:
        assert u.values.min() >= lo - 1e-12 and u.values.max() <= hi + 1e-12


def test_neumann_flux_at_present(step):
    """One-sided slope of the computed field at x = 0 shrinks like h^2."""
    slopes = []
    for n in (601, 1201):
        g = Grid(12.0, n)
        traj = solve(FieldOnGrid(g, cell_averages(step, g)), PdeConfig(0.5, 1.0, 0.01, g))
        v = traj[-1][1].values
        slopes.append(abs(3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * g.h))
    assert slopes[1] <= 0.35 * slopes[0]
    assert slopes[1] <= 1e-4


def test_upwind_fallback_stays_bounded(step):
    g = Grid(12.0, 61)  # h = 0.2, so h |r| > 1 for r = 8
    traj = solve(FieldOnGrid(g, cell_averages(step, g)), PdeConfig(8.0, 0.5, 0.01, g))
    lo, hi = step.bounds
    v = traj[-1][1].values
    assert v.min() >= lo - 1e-12 and v.max() <= hi + 1e-12


def test_cell_averages_preserve_integral(step):
    g = Grid(4.0, 401)
    avg = cell_averages(step, g)
    exact = 1 * 1 + 4 * 1 + 2 * 0.5 + 5 * 0.5 + 1 * 1  # over [-4, 0]
    assert np.trapezoid(avg, dx=g.h) == pytest.approx(exact, abs=2 * g.h * 5)


def test_default_length(step):
    assert default_length(step, 0.5, 1.0) == pytest.approx(3 + 0.5 + 8)


def test_save_every():
    g = Grid(4.0, 41)
    traj = solve(FieldOnGrid(g, np.zeros(g.n)), PdeConfig(0.0, 1.0, 0.1, g), save_every=3)
    assert [round(t, 10) for t, _ in traj] == [0.0, 0.3, 0.6, 0.9, 1.0]
