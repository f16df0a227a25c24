"""Simulation and verification of interval-valued median-martingale walks."""

from .density import (DensityModel, QuadratureConfig, apply_kernel, arcsine_cdf,
                      density_model, lp_mean, rho_arcsine, rho_p,
                      stationarity_residual, z_p)
from .kernels import (ChainTrace, Variant, WalkParams, kernel_p, kernel_x, kernel_y,
                      simulate, step)

__version__ = "0.1.0"

__all__ = [
    "ChainTrace", "DensityModel", "QuadratureConfig", "Variant", "WalkParams",
    "apply_kernel", "arcsine_cdf", "density_model", "kernel_p", "kernel_x",
    "kernel_y", "lp_mean", "rho_arcsine", "rho_p", "simulate",
    "stationarity_residual", "step", "z_p",
]
