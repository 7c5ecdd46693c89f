"""Multi-scale smoothing of past income with the reflected-drift kernel."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .kernel import (
    DomainError,
    KernelParams,
    _breakpoints,
    _density_scalar,
    integrate_panels,
    kernel_mass,
    support_lower,
)

EXTENSIONS = ("constant", "zero")


class SeriesError(ValueError):
    """Malformed income series."""


@dataclass(frozen=True)
class IncomeSeries:
    """Income samples ``(time, income)`` with the last time at 0 (the present)."""

    times: tuple[float, ...]
    incomes: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) == 0:
            raise SeriesError("income series is empty")
        if len(self.times) != len(self.incomes):
            raise SeriesError("times and incomes differ in length")
        t = np.asarray(self.times, dtype=float)
        if np.any(np.diff(t) == 0.0):
            raise SeriesError("duplicate sample times")
        if np.any(np.diff(t) < 0.0):
            raise SeriesError("sample times must be strictly increasing")
        if t[-1] != 0.0:
            raise SeriesError(f"last sample must be at time 0, got {t[-1]}")
        if not np.all(np.isfinite(self.incomes)) or not np.all(np.isfinite(t)):
            raise SeriesError("non-finite time or income")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "IncomeSeries":
        return cls(tuple(float(p[0]) for p in pairs), tuple(float(p[1]) for p in pairs))

    @classmethod
    def normalized(cls, times, incomes) -> "IncomeSeries":
        """Shift ``times`` so the latest one becomes 0."""
        times = [float(v) for v in times]
        if not times:
            raise SeriesError("income series is empty")
        latest = times[-1]
        return cls(tuple(v - latest for v in times), tuple(float(v) for v in incomes))


@dataclass(frozen=True)
class StepFunction:
    """Right-open piecewise-constant income on ``(-inf, 0]``.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])``; the last
    segment is closed at 0.  Before ``breakpoints[0]`` the function equals
    ``tail``.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    tail: float

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        if len(b) != len(self.values) + 1:
            raise SeriesError("need exactly one more breakpoint than values")
        if b[-1] != 0.0 or np.any(np.diff(b) <= 0.0):
            raise SeriesError("breakpoints must increase strictly and end at 0")

    @classmethod
    def constant(cls, c: float) -> "StepFunction":
        return cls((0.0,), (), float(c))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        b = np.asarray(self.breakpoints)
        if not self.values:
            out = np.full(x.shape, self.tail)
        else:
            vals = np.asarray(self.values, dtype=float)
            idx = np.clip(np.searchsorted(b, x, side="right") - 1, 0, len(vals) - 1)
            out = np.where(x < b[0], self.tail, vals[idx])
        return out[()] if out.ndim == 0 else out

    def segments(self):
        """Yield ``(lo, hi, value)`` including the tail as ``(-inf, b0, tail)``."""
        yield -math.inf, self.breakpoints[0], self.tail
        for lo, hi, v in zip(self.breakpoints[:-1], self.breakpoints[1:], self.values):
            yield lo, hi, v

    @property
    def bounds(self) -> tuple[float, float]:
        vals = (self.tail, *self.values)
        return min(vals), max(vals)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return _combine(self, other, lambda a, b: a + b)

    def scaled(self, alpha: float) -> "StepFunction":
        return StepFunction(self.breakpoints, tuple(alpha * v for v in self.values), alpha * self.tail)


def _combine(f: StepFunction, g: StepFunction, op) -> StepFunction:
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    mids = [0.5 * (a + b) for a, b in zip(bps[:-1], bps[1:])]
    vals = tuple(float(op(f(m), g(m))) for m in mids)
    return StepFunction(tuple(bps), vals, float(op(f.tail, g.tail)))


def step_from_samples(series: IncomeSeries, extension: str = "constant") -> StepFunction:
    """Piecewise-constant income through the samples.

    The income of sample ``i`` holds until sample ``i+1``; the value recorded at
    time 0 only matters through the previous segment.  Before the first sample
    the income is the first sampled value (``extension="constant"``) or 0.
    """
    if extension not in EXTENSIONS:
        raise SeriesError(f"unknown extension policy {extension!r}")
    tail = series.incomes[0] if extension == "constant" else 0.0
    if len(series.times) == 1:
        return StepFunction((0.0,), (), float(tail))
    return StepFunction(tuple(series.times), tuple(series.incomes[:-1]), float(tail))


@dataclass
class SmoothedProfile:
    t: float
    xs: np.ndarray
    values: np.ndarray
    r: float = field(default=0.0)

    @property
    def present(self) -> float:
        """Smoothed income at ``x = 0`` if it is on the grid."""
        if self.xs[-1] != 0.0:
            raise ValueError("profile grid does not include the present")
        return float(self.values[-1])


def smooth_at(f: StepFunction, params: KernelParams, x: float) -> float:
    """Smoothed income ``u(t, x)``.

    Each step segment contributes its value times the kernel mass it carries,
    so jumps in ``f`` are integrated exactly.  At ``t = 0`` this is ``f(x)``.
    """
    if x > 0.0:
        raise DomainError(f"x must be <= 0, got {x}")
    if params.t == 0.0:
        return float(f(x))
    lo = support_lower(params, x)
    total = 0.0
    for a, b, v in f.segments():
        if b <= lo or v == 0.0:
            continue
        total += v * kernel_mass(params, x, max(a, lo), b)
    return total


def smooth_function_at(func: Callable[[float], float], params: KernelParams, x: float) -> float:
    """``u(t, x)`` for a continuous income ``func`` by direct quadrature."""
    if params.t == 0.0:
        return float(func(x))
    lo = support_lower(params, x)
    pts = _breakpoints(params, x, lo, 0.0)
    r, t = params.r, params.t
    return integrate_panels(lambda y: func(y) * _density_scalar(r, t, x, y), lo, 0.0, pts)


def smooth_profile(f, params: KernelParams, xs) -> SmoothedProfile:
    """Evaluate the smoothed income at every position in ``xs``.

    ``f`` is a :class:`StepFunction` or any callable income.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise SeriesError("no evaluation points")
    if np.any(np.diff(xs) < 0.0) or np.any(xs > 0.0):
        raise SeriesError("evaluation points must be sorted and <= 0")
    at = smooth_at if isinstance(f, StepFunction) else smooth_function_at
    vals = np.array([at(f, params, float(x)) for x in xs])
    return SmoothedProfile(params.t, xs, vals, params.r)


def chapman_lhs(params_s: KernelParams, params_t: KernelParams, x: float, y: float, density=None) -> float:
    """Compose two kernels: ``int p_s(x, z) p_t(z, y) dz`` over ``z <= 0``.

    Equal to ``p_{s+t}(x, y)`` when the kernel family is a semigroup.
    ``density(params, x, y)`` replaces the kernel in the integrand; the
    verification suite uses it to check that a corrupted kernel is caught.
    """
    if params_s.r != params_t.r:
        raise ValueError("both scales must share the same drift")
    if params_s.t <= 0.0 or params_t.t <= 0.0:
        raise DomainError("scales must be positive")
    lo = support_lower(params_s, x)
    pts = set(_breakpoints(params_s, x, lo, 0.0))
    # p_t(., y) as a function of z peaks at z = y - rt and at the mirror point.
    r, t = params_t.r, params_t.t
    st = math.sqrt(t)
    for c in (y - r * t, -(y - r * t)):
        for k in (-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0):
            p = c + k * st
            if lo < p < 0.0:
                pts.add(p)

    s_, t_ = params_s.t, params_t.t
    if density is None:

        def integrand(z):
            return _density_scalar(r, s_, x, z) * _density_scalar(r, t_, z, y)

    else:

        def integrand(z):
            return float(density(params_s, x, z)) * float(density(params_t, z, y))

    return integrate_panels(integrand, lo, 0.0, sorted(pts), epsabs=1e-12)
