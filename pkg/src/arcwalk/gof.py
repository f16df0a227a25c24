"""Goodness-of-fit statistics shared by the Monte Carlo checks."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .density import QuadratureConfig, integrate_unit

DEFAULT_TV_BINS = 64


class GofTest(str, enum.Enum):
    KS = "KS"
    TV_BINNED = "TVBinned"


@dataclass(frozen=True)
class GofReport:
    test: GofTest
    statistic: float
    n_samples: int
    threshold: float

    @property
    def passed(self) -> bool:
        return self.statistic <= self.threshold

    def to_dict(self) -> dict:
        return {"test": GofTest(self.test).value, "statistic": float(self.statistic),
                "n_samples": int(self.n_samples), "threshold": float(self.threshold),
                "pass": self.passed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "GofReport":
        rep = cls(GofTest(d["test"]), float(d["statistic"]), int(d["n_samples"]),
                  float(d["threshold"]))
        if "pass" in d and bool(d["pass"]) != rep.passed:
            raise ValueError("inconsistent 'pass' field")
        return rep


def ks_statistic(samples, cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance to a continuous ``cdf``.

    ``cdf`` must accept a sorted numpy array.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("ks_statistic needs at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_report(samples, cdf: Callable, threshold: float) -> GofReport:
    n = int(np.size(samples))
    return GofReport(GofTest.KS, ks_statistic(samples, cdf), n, threshold)


def bin_masses(density: Callable[[float], float], n_bins: int,
               cfg: QuadratureConfig | None = None) -> np.ndarray:
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    kw = {} if cfg is None else {"cfg": cfg}
    return np.array([integrate_unit(density, lo, hi, **kw)
                     for lo, hi in zip(edges[:-1], edges[1:])])


def tv_binned(samples, density: Callable[[float], float],
              n_bins: int = DEFAULT_TV_BINS, masses=None) -> float:
    """Half the L1 distance between binned empirical and model masses.

    ``masses`` may be passed to reuse precomputed bin integrals.
    """
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("tv_binned needs at least one sample")
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError("samples must lie inside (0, 1)")
    counts, _ = np.histogram(x, bins=n_bins, range=(0.0, 1.0))
    if masses is None:
        masses = bin_masses(density, n_bins)
    return float(0.5 * np.abs(counts / x.size - np.asarray(masses)).sum())
