"""
Weighting kernel of reflected Brownian motion with drift
========================================================

The weight given to income at a past time ``y`` when averaging at ``x`` with
scale ``t`` is the transition density of a Brownian particle started at
``x <= 0``, drifting with rate ``r`` and reflected at the origin:

.. math::

    p_t(x, y) = 2 r e^{2ry} \\Phi\\left(\\frac{rt + x + y}{\\sqrt t}\\right)
              + \\frac{1}{\\sqrt t} \\phi\\left(\\frac{y - x - rt}{\\sqrt t}\\right)
              + \\frac{e^{2ry}}{\\sqrt t} \\phi\\left(\\frac{rt + x + y}{\\sqrt t}\\right)

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfc, erfcx

SQRT2 = math.sqrt(2.0)
LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Below this the erfc route loses relative accuracy in log space.
_LOG_CDF_SWITCH = -5.0

DEFAULT_EPSABS = 1e-12
_SUPPORT_FLOOR = 1e-16


class DomainError(ValueError):
    """Raised when a kernel argument lies outside the half-line model."""


@dataclass(frozen=True)
class KernelParams:
    """Drift ``r`` (1/time) and scale ``t`` (time)."""

    r: float
    t: float

    def __post_init__(self):
        if not math.isfinite(self.r):
            raise DomainError(f"drift must be finite, got {self.r}")
        if not (self.t >= 0.0 and math.isfinite(self.t)):
            raise DomainError(f"scale must be finite and >= 0, got {self.t}")


def gaussian_pdf(z):
    """Standard normal density."""
    z = np.asarray(z, dtype=float)
    out = np.exp(-0.5 * z * z - LOG_SQRT_2PI)
    return out[()] if out.ndim == 0 else out


def gaussian_cdf(z):
    """Standard normal CDF through the complementary error function."""
    z = np.asarray(z, dtype=float)
    out = 0.5 * erfc(-z / SQRT2)
    return out[()] if out.ndim == 0 else out


def log_gaussian_cdf(z):
    """Logarithm of the standard normal CDF.

    For ``z < -5`` the scaled complementary error function is used,
    ``log Phi(z) = log(erfcx(-z/sqrt2)/2) - z**2/2``, which stays finite
    far beyond the point where ``Phi`` itself underflows.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    tail = z < _LOG_CDF_SWITCH
    zt = z[tail]
    out[tail] = np.log(0.5 * erfcx(-zt / SQRT2)) - 0.5 * zt * zt
    mid = ~tail & (z < 0.0)
    out[mid] = np.log(0.5 * erfc(-z[mid] / SQRT2))
    pos = z >= 0.0
    out[pos] = np.log1p(-0.5 * erfc(z[pos] / SQRT2))
    return out[()] if out.ndim == 0 else out


def _check_point(name, v):
    if np.any(np.asarray(v) > 0.0):
        raise DomainError(f"{name} must be <= 0 (the past half-line), got {v}")


def _check_density_params(params: KernelParams):
    if params.t <= 0.0:
        raise DomainError("kernel density needs t > 0; the t = 0 kernel is a Dirac delta")


def kernel_density(params: KernelParams, x, y):
    """Evaluate the reflected-drift kernel ``p_t(x, y)``.

    ``x`` and ``y`` may be scalars or broadcastable arrays, all ``<= 0``.
    The drift term ``2r e^{2ry} Phi(.)`` is assembled in log space, because for
    ``r < 0`` and ``y`` far in the past the exponential overflows while the
    CDF underflows.
    """
    _check_density_params(params)
    _check_point("x", x)
    _check_point("y", y)
    r, t = params.r, params.t
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    st = math.sqrt(t)
    a = (r * t + x + y) / st
    b = (y - x - r * t) / st
    direct = gaussian_pdf(b) / st
    # e^{2ry} phi(a) in log space as well: the product is bounded by phi(b).
    image = np.exp(2.0 * r * y - 0.5 * a * a - LOG_SQRT_2PI) / st
    if r == 0.0:
        drift = 0.0
    else:
        drift = math.copysign(1.0, r) * np.exp(math.log(2.0 * abs(r)) + 2.0 * r * y + log_gaussian_cdf(a))
    out = drift + direct + image
    # r < 0 makes the drift term negative; the sum is >= 0 up to rounding.
    out = np.maximum(out, 0.0)
    return out[()] if out.ndim == 0 else out


def _density_scalar(r: float, t: float, x: float, y: float) -> float:
    # Same formula as kernel_density without array handling; quadrature
    # integrands call this many thousands of times.
    st = math.sqrt(t)
    a = (r * t + x + y) / st
    b = (y - x - r * t) / st
    out = math.exp(-0.5 * b * b - LOG_SQRT_2PI) / st
    out += math.exp(2.0 * r * y - 0.5 * a * a - LOG_SQRT_2PI) / st
    if r != 0.0:
        if a < _LOG_CDF_SWITCH:
            log_cdf = math.log(0.5 * float(erfcx(-a / SQRT2))) - 0.5 * a * a
        elif a < 0.0:
            log_cdf = math.log(0.5 * math.erfc(-a / SQRT2))
        else:
            log_cdf = math.log1p(-0.5 * math.erfc(a / SQRT2))
        out += math.copysign(math.exp(math.log(2.0 * abs(r)) + 2.0 * r * y + log_cdf), r)
    return out if out > 0.0 else 0.0


def kernel_cdf(params: KernelParams, x, y):
    """Closed-form ``P(Z_t <= y)`` for the process started at ``x``.

    ``Phi((y - x - rt)/sqrt t) + e^{2ry} Phi((x + y + rt)/sqrt t)``; its
    ``y``-derivative is :func:`kernel_density`.  Used as an analytic oracle
    independent of the quadrature in :func:`kernel_mass`.
    """
    _check_density_params(params)
    _check_point("x", x)
    _check_point("y", y)
    r, t = params.r, params.t
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    st = math.sqrt(t)
    out = gaussian_cdf((y - x - r * t) / st) + np.exp(2.0 * r * y + log_gaussian_cdf((x + y + r * t) / st))
    out = np.clip(out, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def kernel_small_t(params: KernelParams, x, y):
    """Non-centred Gaussian ``(1/sqrt t) phi((y - x - rt)/sqrt t)``.

    This is what the kernel looks like at small scale: the boundary is not
    felt yet but the drift already is.
    """
    _check_density_params(params)
    _check_point("x", x)
    _check_point("y", y)
    st = math.sqrt(params.t)
    return gaussian_pdf((np.asarray(y, dtype=float) - x - params.r * params.t) / st) / st


def small_t_corrections(params: KernelParams, x: float, y: float) -> tuple[float, float]:
    """The two terms by which ``p_t / kernel_small_t`` exceeds one.

    Returns ``(drift_term, image_term)`` computed from their exponents
    directly, so that they can serve as an oracle for the ratio when the
    densities themselves are tiny.
    """
    _check_density_params(params)
    r, t = params.r, params.t
    st = math.sqrt(t)
    a = (y + x + r * t) / st
    b = (y - x - r * t) / st
    image = math.exp(2.0 * r * y - 2.0 * y * (x + r * t) / t)
    if r == 0.0:
        drift = 0.0
    else:
        log_drift = (
            math.log(st * 2.0 * abs(r)) + 2.0 * r * y + float(log_gaussian_cdf(a)) + 0.5 * b * b + LOG_SQRT_2PI
        )
        drift = math.copysign(math.exp(log_drift), r)
    return drift, image


def stationary_density(r: float, y):
    """Large-scale limit ``2r e^{2ry}`` of the kernel, defined for ``r > 0``."""
    if not r > 0.0:
        raise DomainError(f"no stationary profile for r <= 0 (got r={r})")
    _check_point("y", y)
    y = np.asarray(y, dtype=float)
    out = 2.0 * r * np.exp(2.0 * r * y)
    return out[()] if out.ndim == 0 else out


def support_lower(params: KernelParams, x: float) -> float:
    """Left end of the effective support of ``p_t(x, .)``.

    Starts from an 8-sigma Gaussian bound shifted by the drift and moves left
    until the density there drops below 1e-16.
    """
    r, t = params.r, params.t
    st = math.sqrt(t)
    lo = min(x - abs(r) * t, x) - 8.0 * st
    if r < 0.0:
        lo -= abs(r) * t
    step = max(st, 1e-3)
    while _density_scalar(r, t, x, lo) >= _SUPPORT_FLOOR:
        lo -= step
        step *= 1.5
    return lo


def _breakpoints(params: KernelParams, x: float, lo: float, hi: float) -> list[float]:
    st = math.sqrt(params.t)
    centre = x + params.r * params.t
    pts = [0.0, -(x + params.r * params.t)]
    pts += [centre + k * st for k in (-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0)]
    return sorted({p for p in pts if lo < p < hi})


def integrate_panels(func, lo: float, hi: float, points, epsabs: float = DEFAULT_EPSABS) -> float:
    """Adaptive Gauss-Kronrod over ``[lo, hi]`` split at ``points``."""
    edges = [lo, *points, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        val, _ = integrate.quad(func, a, b, epsabs=epsabs, epsrel=1e-13, limit=200)
        total += val
    return total


def kernel_mass(params: KernelParams, x: float, y_lo: float, y_hi: float, epsabs: float = DEFAULT_EPSABS) -> float:
    """Integral of ``p_t(x, .)`` over ``[y_lo, y_hi]`` by adaptive quadrature.

    ``y_lo`` may be ``-inf``; it is then replaced by :func:`support_lower`.
    The integrand is split at the direct and mirrored bump locations.
    """
    _check_density_params(params)
    _check_point("x", x)
    _check_point("y_hi", y_hi)
    if y_lo > y_hi:
        raise DomainError(f"inverted interval [{y_lo}, {y_hi}]")
    lo = max(y_lo, support_lower(params, x))
    if lo >= y_hi:
        return 0.0
    pts = _breakpoints(params, x, lo, y_hi)
    r, t = params.r, params.t
    return integrate_panels(lambda y: _density_scalar(r, t, x, y), lo, y_hi, pts, epsabs)


def local_moment(params: KernelParams, x: float, order: int, eps: float) -> float:
    """``int_{|y-x|<=eps} (y-x)^order p_t(x,y) dy`` restricted to ``y <= 0``."""
    _check_density_params(params)
    lo = x - eps
    hi = min(x + eps, 0.0)
    pts = _breakpoints(params, x, lo, hi)
    r, t = params.r, params.t
    return integrate_panels(lambda y: (y - x) ** order * _density_scalar(r, t, x, y), lo, hi, pts)
