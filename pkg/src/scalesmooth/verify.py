"""
Property checks for the whole pipeline
======================================

Every check returns :class:`Check` records holding the worst measured value
next to its tolerance.  ``run_all`` is what ``scale-smooth verify`` prints;
the acceptance tests call the same functions one criterion at a time.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from . import energy as en
from . import mc, pde
from .kernel import (
    KernelParams,
    kernel_density,
    kernel_mass,
    kernel_small_t,
    local_moment,
    log_gaussian_cdf,
    small_t_corrections,
    stationary_density,
)
from .reports import read_income_csv, smooth_rows, weights_rows
from .smoother import IncomeSeries, StepFunction, chapman_lhs, smooth_at, step_from_samples

FAULTS = ("kernel-sign",)


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured={self.measured:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


@dataclass
class Settings:
    quick: bool = False
    seed: int = 20190601
    mc_paths: int | None = None
    mc_dt: float = 1e-3
    pde_L: float = 12.0
    pde_n: int = 2401
    pde_dt: float = 1e-3
    fault: str | None = None
    extra: dict = field(default_factory=dict)


def _le(name, measured, tol, detail="", t0=None):
    return Check(name, float(measured), tol, bool(measured <= tol), detail, 0.0 if t0 is None else time.time() - t0)


def _density(settings: Settings):
    if settings.fault is None:
        return kernel_density
    if settings.fault != "kernel-sign":
        raise ValueError(f"unknown fault {settings.fault!r}")

    def flipped(params, x, y):
        # Same kernel with the drift term's sign reversed.
        r, t = params.r, params.t
        drift = 2.0 * r * np.exp(2.0 * r * y + log_gaussian_cdf((r * t + x + y) / math.sqrt(t)))
        return kernel_density(params, x, y) - 2.0 * drift

    return flipped


def check_normalization(settings: Settings) -> list[Check]:
    t0 = time.time()
    rs = (-1.0, -0.25, 0.25, 1.0)
    ts = (0.01, 0.1, 1.0, 10.0)
    xs = (0.0, -0.5, -2.0)
    worst, where = 0.0, None
    for r, t, x in itertools.product(rs, ts, xs):
        err = abs(kernel_mass(KernelParams(r, t), x, -math.inf, 0.0) - 1.0)
        if err >= worst:
            worst, where = err, (r, t, x)
    return [_le("normalization", worst, 1e-6, f"worst at (r,t,x)={where}", t0)]


def check_semigroup(settings: Settings) -> list[Check]:
    t0 = time.time()
    density = _density(settings)
    scales = (0.25, 1.0) if settings.quick else (0.25, 0.5, 1.0)
    pts = (0.0, -0.5, -1.5)
    worst, where = 0.0, None
    for r in (-0.5, 0.0, 0.5):
        for s, t in itertools.product(scales, repeat=2):
            for x, y in itertools.product(pts, repeat=2):
                ps, pt = KernelParams(r, s), KernelParams(r, t)
                lhs = chapman_lhs(ps, pt, x, y, density=None if settings.fault is None else density)
                err = abs(lhs - float(density(KernelParams(r, s + t), x, y)))
                if err >= worst:
                    worst, where = err, (r, s, t, x, y)
    return [_le("semigroup", worst, 1e-5, f"worst at (r,s,t,x,y)={where}", t0)]


def neumann_slope(params: KernelParams, y: float, h: float = 1e-4) -> float:
    """Second-order one-sided ``d/dx p_t(x, y)`` at ``x = 0``."""
    p0, p1, p2 = (float(kernel_density(params, x, y)) for x in (0.0, -h, -2 * h))
    return (3 * p0 - 4 * p1 + p2) / (2 * h)


def check_neumann(settings: Settings) -> list[Check]:
    t0 = time.time()
    worst = 0.0
    for r, t, y in itertools.product((-0.5, 0.0, 0.5), (0.5, 1.0), (-0.5, -1.0, -2.0)):
        p = KernelParams(r, t)
        worst = max(worst, abs(neumann_slope(p, y)) / float(kernel_density(p, 0.0, y)))
    return [_le("neumann boundary", worst, 1e-3, "relative slope at x=0", t0)]


def check_locality(settings: Settings) -> list[Check]:
    t0 = time.time()
    worst1 = worst2 = 0.0
    for r, t in itertools.product((-1.0, -0.5, 0.0, 0.5, 1.0), (1e-3, 1e-4)):
        p = KernelParams(r, t)
        m1 = local_moment(p, -1.0, 1, 0.5)
        m2 = local_moment(p, -1.0, 2, 0.5)
        # Without drift the first moment is judged against the scale t.
        worst1 = max(worst1, abs(m1 - r * t) / (abs(r) * t if r != 0.0 else t))
        worst2 = max(worst2, abs(m2 - t) / t)
    return [
        _le("locality first moment", worst1, 0.05, "relative to r t", t0),
        _le("locality second moment", worst2, 0.05, "relative to t", t0),
    ]


SMALL_T_POINTS = ((-1.0, -0.5), (-1.0, -1.0), (-0.5, -1.0), (-2.0, -1.5), (-0.5, -0.5))


def check_small_t(settings: Settings) -> list[Check]:
    t0 = time.time()
    out = []
    for t, tol in ((1e-2, 1e-2), (1e-3, 1e-4)):
        worst = 0.0
        oracle_gap = 0.0
        for r in (-1.0, -0.5, 0.0, 0.5, 1.0):
            p = KernelParams(r, t)
            for x, y in SMALL_T_POINTS:
                ratio = float(kernel_density(p, x, y)) / float(kernel_small_t(p, x, y))
                worst = max(worst, abs(ratio - 1.0))
                oracle_gap = max(oracle_gap, abs(ratio - 1.0 - sum(small_t_corrections(p, x, y))))
        out.append(_le(f"small-t ratio t={t:g}", worst, tol, f"oracle gap {oracle_gap:.1e}", t0))
    return out


def check_large_t(settings: Settings) -> list[Check]:
    t0 = time.time()
    ys = np.linspace(-3.0, 0.0, 601)
    pos = float(np.max(np.abs(kernel_density(KernelParams(0.5, 200.0), -1.0, ys) - stationary_density(0.5, ys))))
    neg = float(np.max(kernel_density(KernelParams(-0.5, 200.0), -1.0, ys)))
    return [
        _le("large-t r=0.5 vs 2r e^{2ry}", pos, 1e-3, "", t0),
        _le("large-t r=-0.5 vanishes", neg, 1e-3, "", t0),
    ]


def _example_step() -> StepFunction:
    return step_from_samples(IncomeSeries.from_pairs([(-3.0, 1.0), (-2.0, 4.0), (-1.0, 2.0), (-0.5, 5.0), (0.0, 5.0)]))


def _bump(y):
    return math.exp(-0.5 * (y + 3.0) ** 2)


def check_pde(settings: Settings) -> list[Check]:
    t0 = time.time()
    n, dt = (601, 4e-3) if settings.quick else (settings.pde_n, settings.pde_dt)
    cfg = pde.PdeConfig(0.5, 1.0, dt, pde.Grid(settings.pde_L, n))
    rep = pde.compare_with_kernel(_example_step(), KernelParams(0.5, 1.0), cfg)
    out = [_le("pde vs kernel (step data)", rep.max_error, 5e-3, f"at x={rep.x_at_max:.3f}", t0)]
    t1 = time.time()
    errs = []
    for n_c, dt_c in ((121, 0.05), (241, 0.025)):
        c = pde.PdeConfig(0.0, 1.0, dt_c, pde.Grid(12.0, n_c))
        errs.append(pde.compare_with_kernel(_bump, KernelParams(0.0, 1.0), c).max_error)
    out.append(_le("pde order (h/2 error ratio)", errs[1] / errs[0], 0.35, f"errors {errs[0]:.2e} -> {errs[1]:.2e}", t1))
    return out


def check_mc(settings: Settings) -> list[Check]:
    t0 = time.time()
    n = settings.mc_paths or (20_000 if settings.quick else 100_000)
    worst, where = 0.0, None
    for r in (-0.5, 0.0, 0.5):
        cfg = mc.PathConfig(-1.0, r, 1.0, settings.mc_dt, n, seed=settings.seed)
        ks = mc.ks_statistic(mc.simulate_endpoints(cfg), KernelParams(r, 1.0), -1.0)
        if ks >= worst:
            worst, where = ks, r
    return [_le("monte carlo KS", worst, 0.03, f"n={n} dt={settings.mc_dt:g} worst r={where}", t0)]


def energy_trajectories(quick: bool = False):
    """Solver runs used for the energy-decay check: (label, r, trajectory)."""
    step = _example_step()
    n, dt = (601, 1e-2) if quick else (1201, 2e-3)
    out = []
    for r in (-0.5, 0.0, 0.5, 1.0):
        for label, f in (("step", step), ("bump", _bump)):
            g = pde.Grid(12.0, n)
            cfg = pde.PdeConfig(r, 1.0, dt, g)
            traj = pde.solve(pde.FieldOnGrid(g, pde.cell_averages(f, g)), cfg)
            out.append((f"{label} r={r:g}", r, traj))
    return out


def check_energy(settings: Settings) -> list[Check]:
    t0 = time.time()
    worst_up = 0.0
    all_monotone = True
    scaling = 0.0
    for _, r, traj in energy_trajectories(settings.quick):
        rep = en.decay_report(traj, r)
        all_monotone &= rep.monotone_nonincreasing
        rel = np.diff(rep.energies) / (1.0 + rep.energies[:-1])
        worst_up = max(worst_up, float(np.max(rel, initial=-np.inf)))
        u = traj[len(traj) // 2][1]
        for alpha in (-2.0, 0.3, 7.5):
            scaled = pde.FieldOnGrid(u.grid, alpha * u.values)
            base = en.energy(u, r)
            scaling = max(scaling, abs(en.energy(scaled, r) - alpha**2 * base) / max(alpha**2 * base, 1e-300))
    worst_up = max(worst_up, 0.0)
    return [
        Check("energy decay", worst_up, en.REL_SLACK, all_monotone and worst_up <= en.REL_SLACK,
              "largest relative uptick", time.time() - t0),
        _le("energy quadratic scaling", scaling, 1e-12, "relative", t0),
    ]


def random_step(rng: np.random.Generator) -> StepFunction:
    k = int(rng.integers(1, 8))
    times = np.sort(rng.uniform(-6.0, 0.0, size=k - 1))
    times = np.concatenate([times, [0.0]]) if k > 1 else np.array([0.0])
    times = np.unique(times)
    vals = rng.normal(0.0, 3.0, size=len(times))
    return step_from_samples(IncomeSeries(tuple(times), tuple(vals)), rng.choice(["constant", "zero"]))


def check_axioms(settings: Settings) -> list[Check]:
    t0 = time.time()
    rng = np.random.default_rng(settings.seed)
    cases = 200 if settings.quick else 1000
    const_err = lin_err = bound_viol = 0.0
    for _ in range(cases):
        r = float(rng.uniform(-1.0, 1.0))
        t = float(10 ** rng.uniform(-2, 1))
        x = float(-rng.exponential(1.5))
        p = KernelParams(r, t)
        c = float(rng.normal(0, 10))
        const_err = max(const_err, abs(smooth_at(StepFunction.constant(c), p, x) - c))
        f, g = random_step(rng), random_step(rng)
        a, b = rng.normal(size=2)
        fu, gu = smooth_at(f, p, x), smooth_at(g, p, x)
        combo = f.scaled(a) + g.scaled(b)
        lin_err = max(lin_err, abs(smooth_at(combo, p, x) - (a * fu + b * gu)))
        lo, hi = f.bounds
        bound_viol = max(bound_viol, lo - fu, fu - hi, 0.0)
    return [
        _le("constant preservation", const_err, 1e-9, f"{cases} cases", t0),
        _le("linearity", lin_err, 1e-9, f"{cases} cases", t0),
        _le("min/max bounds", bound_viol, 1e-9, f"{cases} cases", t0),
    ]


def example_series() -> IncomeSeries:
    ref = resources.files("scalesmooth") / "data" / "example_income.csv"
    with resources.as_file(ref) as path:
        return read_income_csv(path)


def check_figures(settings: Settings) -> list[Check]:
    """Report tables reproduce both limits and the smoothing axioms."""
    t0 = time.time()
    out = []
    r = 0.5
    # Interior start: the small-t limit of the emitted curves is the plain
    # drifted Gaussian.
    kern, gauss, _ = weights_rows(r, (1e-3, 1e-2, 200.0), x0=-1.0)
    for t, tol in ((1e-2, 1e-2), (1e-3, 1e-4)):
        worst = 0.0
        for k, g in zip(kern, gauss):
            if k.scale == t and abs(k.x + 1.0 + r * t) <= 3.0 * math.sqrt(t):
                worst = max(worst, abs(k.value / g.value - 1.0))
        out.append(_le(f"weights small-t t={t:g}", worst, tol, "x0=-1, +-3 sd", t0))
    # Present-time curve (x0 = 0) against the exponential limit.
    kern0, _, stat0 = weights_rows(r, (0.05, 200.0), x0=0.0)
    big = [(k.x, k.value) for k in kern0 if k.scale == 200.0 and k.x >= -3.0]
    ys = np.array([b[0] for b in big])
    gap = float(np.max(np.abs(np.array([b[1] for b in big]) - stationary_density(r, ys))))
    out.append(_le("weights large-t x0=0", gap, 1e-3, "y in [-3, 0]", t0))
    mass = 0.0
    k1, _, _ = weights_rows(r, (1.0,), x0=0.0)
    mass = abs(np.trapezoid([k.value for k in k1], [k.x for k in k1]) - 1.0)
    out.append(_le("weights trapezoid mass t=1", mass, 1e-6, "", t0))

    series = example_series()
    f = step_from_samples(series)
    xs = np.linspace(series.times[0], 0.0, 41 if settings.quick else 121)
    rows = smooth_rows(f, r, (0.05, 0.5, 2.0), xs)
    lo, hi = f.bounds
    viol = max(0.0, max(lo - row.value for row in rows), max(row.value - hi for row in rows))
    out.append(_le("smooth bounds on example data", viol, 1e-9, "", t0))
    const = step_from_samples(IncomeSeries(series.times, tuple(3.25 for _ in series.times)))
    crow = smooth_rows(const, r, (0.05, 0.5, 2.0), xs)
    out.append(_le("smooth constant preservation", max(abs(row.value - 3.25) for row in crow), 1e-9, "", t0))
    return out


CRITERIA = {
    1: check_normalization,
    2: check_semigroup,
    3: check_neumann,
    4: check_locality,
    5: check_small_t,
    6: check_large_t,
    7: check_pde,
    8: check_mc,
    9: check_energy,
    10: check_axioms,
    11: check_figures,
}


def run_all(settings: Settings | None = None) -> list[Check]:
    settings = settings or Settings()
    checks = []
    for fn in CRITERIA.values():
        checks += fn(settings)
    return checks


def as_dicts(checks: list[Check]) -> list[dict]:
    return [asdict(c) for c in checks]
