"""Multi-scale averaging of past income with the reflected-drift Brownian kernel."""
from .kernel import (
    DomainError,
    KernelParams,
    gaussian_cdf,
    gaussian_pdf,
    kernel_cdf,
    kernel_density,
    kernel_mass,
    kernel_small_t,
    log_gaussian_cdf,
    stationary_density,
)
from .smoother import IncomeSeries, StepFunction, chapman_lhs, smooth_at, smooth_profile, step_from_samples

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "IncomeSeries",
    "KernelParams",
    "StepFunction",
    "chapman_lhs",
    "gaussian_cdf",
    "gaussian_pdf",
    "kernel_cdf",
    "kernel_density",
    "kernel_mass",
    "kernel_small_t",
    "log_gaussian_cdf",
    "smooth_at",
    "smooth_profile",
    "stationary_density",
    "step_from_samples",
]
