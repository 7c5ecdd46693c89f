import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalesmooth.kernel import KernelParams, gaussian_cdf, kernel_density
from scalesmooth.smoother import (
    IncomeSeries,
    SeriesError,
    StepFunction,
    chapman_lhs,
    smooth_at,
    smooth_function_at,
    smooth_profile,
    step_from_samples,
)


def series(*pairs):
    return IncomeSeries.from_pairs(pairs)


def test_step_constant():
    f = step_from_samples(series((-1, 5), (0, 5)))
    assert all(f(x) == 5 for x in (-100.0, -1.0, -0.5, 0.0))


def test_step_two_levels():
    f = step_from_samples(series((-2, 1), (-1, 3), (0, 3)))
    assert f(-3.0) == 1 and f(-2.0) == 1 and f(-1.5) == 1
    assert f(-1.0) == 3 and f(-0.2) == 3 and f(0.0) == 3


def test_step_single_sample():
    f = step_from_samples(series((0, 7)))
    assert f(-10.0) == 7 and f(0.0) == 7


def test_step_zero_extension():
    f = step_from_samples(series((-2, 1), (-1, 3), (0, 3)), extension="zero")
    assert f(-3.0) == 0 and f(-1.5) == 1


@pytest.mark.parametrize(
    "pairs",
    [[(-1, 1), (-1, 2), (0, 3)], [(-1, 1), (-2, 2), (0, 3)], [(-1, 1), (-0.5, 2)], []],
)
def test_series_rejects(pairs):
    with pytest.raises(SeriesError):
        IncomeSeries.from_pairs(pairs)


def test_series_normalization():
    s = IncomeSeries.normalized([2019.0, 2020.0, 2021.5], [1, 2, 3])
    assert s.times == (-2.5, -1.5, 0.0)


@pytest.mark.parametrize("r, t, x", [(0.5, 1.0, 0.0), (-1.0, 3.0, -2.0), (0.0, 0.01, -0.3), (2.0, 50.0, -1.0)])
def test_constant_preserved(r, t, x):
    assert smooth_at(StepFunction.constant(5.0), KernelParams(r, t), x) == pytest.approx(5.0, abs=1e-9)


def test_zero_scale_returns_income():
    f = step_from_samples(series((-2, 1), (-1, 3), (0, 4)))
    assert smooth_at(f, KernelParams(0.4, 0.0), -1.0) == 3.0
    assert smooth_at(f, KernelParams(0.4, 0.0), -1.5) == 1.0


def test_indicator_images_value():
    f = step_from_samples(series((-1, 1), (0, 1)), extension="zero")
    expected = 2 * (gaussian_cdf(0.0) - gaussian_cdf(-1.0))
    assert smooth_at(f, KernelParams(0.0, 1.0), 0.0) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.6826895, abs=1e-7)


def test_step_and_function_routes_agree():
    f = step_from_samples(series((-3, 2), (-1, -1), (-0.25, 4), (0, 4)))
    p = KernelParams(0.3, 0.7)
    for x in (0.0, -0.6, -2.0):
        assert smooth_at(f, p, x) == pytest.approx(smooth_function_at(lambda y: float(f(y)), p, x), abs=1e-7)


def test_profile():
    f = step_from_samples(series((-2, 1), (-1, 3), (0, 3)))
    xs = np.linspace(-4, 0, 9)
    prof = smooth_profile(f, KernelParams(0.5, 0.0), xs)
    np.testing.assert_array_equal(prof.values, f(xs))
    prof = smooth_profile(StepFunction.constant(-2.0), KernelParams(0.5, 2.0), xs)
    np.testing.assert_allclose(prof.values, -2.0, atol=1e-9)
    assert prof.present == pytest.approx(-2.0)
    with pytest.raises(SeriesError):
        smooth_profile(f, KernelParams(0.5, 1.0), [])


def test_profile_within_bounds():
    f = step_from_samples(series((-4, 2), (-3, 9), (-2, -1), (-0.5, 4), (0, 0)))
    lo, hi = f.bounds
    for t in (0.01, 0.5, 5.0):
        v = smooth_profile(f, KernelParams(-0.3, t), np.linspace(-5, 0, 26)).values
        assert v.min() >= lo - 1e-9 and v.max() <= hi + 1e-9


def step_functions():
    times = st.lists(st.floats(-8, -0.01), min_size=0, max_size=5, unique=True).map(sorted)
    return times.flatmap(
        lambda ts: st.tuples(
            st.just(ts),
            st.lists(st.floats(-50, 50), min_size=len(ts) + 1, max_size=len(ts) + 1),
            st.sampled_from(["constant", "zero"]),
        )
    ).map(lambda a: step_from_samples(IncomeSeries(tuple(a[0]) + (0.0,), tuple(a[1])), a[2]))


@settings(max_examples=60, deadline=None)
@given(step_functions(), step_functions(), st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1), st.floats(0.01, 5))
def test_linearity(f, g, a, b, r, t):
    p = KernelParams(r, t)
    x = -0.7
    lhs = smooth_at(f.scaled(a) + g.scaled(b), p, x)
    rhs = a * smooth_at(f, p, x) + b * smooth_at(g, p, x)
    assert lhs == pytest.approx(rhs, abs=1e-9 * (1 + abs(a) + abs(b)) * 50)


@settings(max_examples=60, deadline=None)
@given(step_functions(), st.floats(-1, 1), st.floats(0.01, 5), st.floats(-6, 0))
def test_bounds_and_positivity(f, r, t, x):
    u = smooth_at(f, KernelParams(r, t), x)
    lo, hi = f.bounds
    assert lo - 1e-9 <= u <= hi + 1e-9


def test_chapman_examples():
    assert chapman_lhs(KernelParams(0, 0.5), KernelParams(0, 0.5), 0.0, 0.0) == pytest.approx(0.7978845608, abs=1e-5)
    assert chapman_lhs(KernelParams(0.5, 0.3), KernelParams(0.5, 0.7), -1.0, -0.5) == pytest.approx(
        0.6419342194090946, abs=1e-5
    )
    assert chapman_lhs(KernelParams(0, 1e-4), KernelParams(0, 1.0), 0.0, -1.0) == pytest.approx(
        kernel_density(KernelParams(0, 1.0), 0.0, -1.0), abs=1e-3
    )
    with pytest.raises(ValueError):
        chapman_lhs(KernelParams(0.1, 1), KernelParams(0.2, 1), 0.0, 0.0)


@pytest.mark.parametrize("r", [-0.5, 0.0, 0.5])
def test_semigroup_grid(r):
    pts = (0.0, -0.5, -1.5)
    for s, t in itertools.product((0.25, 0.5, 1.0), repeat=2):
        for x, y in itertools.product(pts, repeat=2):
            lhs = chapman_lhs(KernelParams(r, s), KernelParams(r, t), x, y)
            assert abs(lhs - kernel_density(KernelParams(r, s + t), x, y)) <= 1e-5


def test_semigroup_fails_for_wrong_kernel():
    def unreflected(params, x, y):
        # Free drifted Gaussian, no boundary: loses mass across 0.
        s = math.sqrt(params.t)
        return math.exp(-((y - x - params.r * params.t) ** 2) / (2 * params.t)) / (s * math.sqrt(2 * math.pi))

    p = KernelParams(0.5, 0.5)
    lhs = chapman_lhs(p, p, -0.2, -0.2, density=unreflected)
    assert abs(lhs - unreflected(KernelParams(0.5, 1.0), -0.2, -0.2)) > 1e-2
