"""Stationary densities of the interval walks and quadrature certificates.

For p > 0 the stationary density is ``1 / (Z_p * M_p(s, 1-s))`` where
``M_p`` is the power mean; p = 0 is the arcsine law and is always
dispatched to its closed form.

Integrals over (0, 1) go through the substitution ``s = sin(theta)**2``,
which turns the inverse-square-root endpoint behaviour of the arcsine
density into a bounded integrand.  The adaptive engine underneath is
QUADPACK's Gauss-Kronrod routine (``scipy.integrate.quad``).
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .kernels import kernel_p, kernel_x

LOG2 = math.log(2.0)
Z_LOWER = 2.0 * LOG2
Z_UPPER = math.pi


class QuadratureError(RuntimeError):
    def __init__(self, message, value=float("nan"), abserr=float("nan")):
        super().__init__(f"{message} (value={value!r}, error estimate={abserr!r})")
        self.value = value
        self.abserr = abserr


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_subdivisions: int = 200
    # evaluation points are clipped this far inside (0, 1)
    endpoint_offset: float = 1e-15

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if not 0.0 < self.endpoint_offset <= 1e-6:
            raise ValueError("endpoint_offset must lie in (0, 1e-6]")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureConfig()


def _quad(f, lo, hi, cfg: QuadratureConfig, what: str):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, lo, hi, epsabs=cfg.abs_tol,
                                      epsrel=cfg.rel_tol,
                                      limit=cfg.max_subdivisions)
        except integrate.IntegrationWarning as exc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                val, err = integrate.quad(f, lo, hi, epsabs=cfg.abs_tol,
                                          epsrel=cfg.rel_tol,
                                          limit=cfg.max_subdivisions)
            if err > 1e3 * max(cfg.abs_tol, cfg.rel_tol * abs(val)):
                raise QuadratureError(f"{what}: {exc}", val, err) from exc
    return val, err


def _theta(s: float) -> float:
    return math.asin(math.sqrt(s))


def integrate_unit(f: Callable[[float], float], lo: float = 0.0, hi: float = 1.0,
                   cfg: QuadratureConfig = DEFAULT_QUAD,
                   breaks=()) -> float:
    """Integrate ``f`` over (lo, hi) within (0, 1) in the angle variable.

    ``breaks`` are interior points where ``f`` is discontinuous; the domain
    is split there.
    """
    off = cfg.endpoint_offset

    def g(theta):
        s = math.sin(theta) ** 2
        s = min(max(s, off), 1.0 - off)
        return f(s) * math.sin(2.0 * theta)

    cuts = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = _quad(g, _theta(a), _theta(b), cfg, "integrate_unit")
        total += val
    return total


def lp_mean(a: float, b: float, p: float) -> float:
    """Power mean ((a**p + b**p)/2)**(1/p); geometric at p=0, max at p=inf."""
    if a < 0 or b < 0:
        raise ValueError("lp_mean needs nonnegative arguments")
    if p == math.inf:
        return max(a, b)
    if p == -math.inf:
        return min(a, b)
    if a == 0.0 or b == 0.0:
        if p <= 0:
            if a == b == 0.0:
                raise ValueError("lp_mean(0, 0) is undefined for p <= 0")
            return 0.0
        return max(a, b) * 0.5 ** (1.0 / p)
    if p == 0.0:
        return math.sqrt(a * b)
    # log M_p = mean(log a, log b) + log(cosh(p d / 2)) / p, d = log a - log b;
    # stable as p -> 0 and for large |p|
    la, lb = math.log(a), math.log(b)
    return math.exp(0.5 * (la + lb) + _log_cosh(0.5 * p * (la - lb)) / p)


def _log_cosh(y: float) -> float:
    y = abs(y)
    if y < 1.0:
        return math.log1p(2.0 * math.sinh(0.5 * y) ** 2)
    return y + math.log1p(math.exp(-2.0 * y)) - LOG2


def rho_arcsine(s: float) -> float:
    if not 0.0 < s < 1.0:
        raise ValueError(f"arcsine density diverges at s={s!r}")
    return 1.0 / (math.pi * math.sqrt(s * (1.0 - s)))


def arcsine_cdf(s):
    """(2/pi) asin(sqrt(s)); accepts scalars or arrays."""
    arr = np.asarray(s, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise ValueError("arcsine_cdf is defined on [0, 1]")
    out = (2.0 / np.pi) * np.arcsin(np.sqrt(arr))
    return float(out) if out.ndim == 0 else out


def arcsine_ppf(u):
    """Quantile function sin(pi u / 2)**2."""
    return np.sin(0.5 * np.pi * np.asarray(u, dtype=float)) ** 2


def inverse_mean(s: float, p: float) -> float:
    """1 / M_p(s, 1-s), the unnormalized stationary density."""
    return 1.0 / lp_mean(s, 1.0 - s, p)


def inverse_mean_integral(p: float, eps: float,
                          cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Integral of 1/M_p(s, 1-s) over (eps, 1-eps).

    Finite for every eps > 0; for p < 0 it diverges like log(1/eps).
    """
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    return 2.0 * integrate_unit(lambda s: inverse_mean(s, p), eps, 0.5, cfg)


# Z_p cache: exact-bits key on p, guarded for concurrent writers
_Z_CACHE: dict[tuple[float, QuadratureConfig], float] = {}
_Z_LOCK = threading.Lock()


def z_p(p: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Normalizing constant: integral of 1/M_p(s, 1-s) over (0, 1).

    Decreases in p from pi (p -> 0) to 2 log 2 (p -> inf).
    """
    if not p > 0:
        raise ValueError("z_p needs p > 0")
    key = (float(p), cfg)
    with _Z_LOCK:
        hit = _Z_CACHE.get(key)
    if hit is not None:
        return hit
    if p == math.inf:
        val = Z_LOWER
    else:
        val = 2.0 * integrate_unit(lambda s: inverse_mean(s, p), 0.0, 0.5, cfg)
    with _Z_LOCK:
        _Z_CACHE[key] = val
    return val


def rho_p(s: float, p: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    if not 0.0 < s < 1.0:
        raise ValueError(f"s={s!r} is outside (0, 1)")
    if p == 0.0:
        return rho_arcsine(s)
    return 1.0 / (z_p(p, cfg) * lp_mean(s, 1.0 - s, p))


def apply_kernel(density: Callable[[float], float],
                 kernel: Callable[[float, float], float], a: float,
                 cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """(K rho)(a) = integral of K(a, b) rho(b) db over (0, 1).

    Split at b = a and b = 1 - a, where the kernels jump.
    """
    if not 0.0 < a < 1.0:
        raise ValueError(f"a={a!r} is outside (0, 1)")
    return integrate_unit(lambda b: kernel(a, b) * density(b), 0.0, 1.0, cfg,
                          breaks=(a, 1.0 - a))


def stationarity_residual(p: float, grid, cfg: QuadratureConfig = DEFAULT_QUAD
                          ) -> float:
    """Max relative gap between K_p rho_p and rho_p over ``grid``."""
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be non-empty")
    if p < 0:
        raise ValueError("no stationary density exists for p < 0")
    return max(residual_profile(p, grid, cfg))


def residual_profile(p: float, grid, cfg: QuadratureConfig = DEFAULT_QUAD
                     ) -> list[float]:
    if p == 0.0:
        density, kernel = rho_arcsine, kernel_x
    else:
        z_p(p, cfg)
        density = lambda s: rho_p(s, p, cfg)  # noqa: E731
        kernel = lambda a, b: kernel_p(a, b, p)  # noqa: E731
    out = []
    for a in grid:
        if not 0.0 < a < 1.0:
            raise ValueError("grid points must lie strictly inside (0, 1)")
        target = density(a)
        out.append(abs(apply_kernel(density, kernel, a, cfg) - target) / target)
    return out


@dataclass
class DensityModel:
    """Stationary law of the p-family (p >= 0) with pdf, cdf and quantiles."""

    p: float
    z_p: float
    cfg: QuadratureConfig = field(default=DEFAULT_QUAD, repr=False)
    _cdf_interp: PchipInterpolator | None = field(default=None, repr=False)

    def pdf(self, s: float) -> float:
        return rho_p(s, self.p, self.cfg)

    def _table(self):
        if self._cdf_interp is None:
            # cumulative integrals on a uniform angle grid, then a monotone
            # interpolant in the angle variable
            thetas = np.linspace(0.0, 0.5 * np.pi, 2049)
            edges = np.sin(thetas) ** 2
            edges[-1] = 1.0
            pieces = [integrate_unit(self.pdf, lo, hi, self.cfg)
                      for lo, hi in zip(edges[:-1], edges[1:])]
            cum = np.concatenate([[0.0], np.cumsum(pieces)])
            cum /= cum[-1]
            self._cdf_interp = PchipInterpolator(thetas, cum)
        return self._cdf_interp

    def cdf(self, s):
        arr = np.asarray(s, dtype=float)
        if np.any((arr < 0) | (arr > 1)):
            raise ValueError("cdf is defined on [0, 1]")
        if self.p == 0.0:
            return arcsine_cdf(arr)
        out = np.clip(self._table()(np.arcsin(np.sqrt(arr))), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def integral(self, lo: float, hi: float) -> float:
        """Mass of (lo, hi) by direct quadrature."""
        if self.p == 0.0:
            return arcsine_cdf(hi) - arcsine_cdf(lo)
        return integrate_unit(self.pdf, lo, hi, self.cfg)


def density_model(p: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> DensityModel:
    if p < 0:
        raise ValueError("no stationary density exists for p < 0")
    if p == 0.0:
        return DensityModel(p=0.0, z_p=math.pi, cfg=cfg)
    return DensityModel(p=float(p), z_p=z_p(p, cfg), cfg=cfg)
