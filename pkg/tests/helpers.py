"""Shared fixtures-as-functions for the test suite."""

import numpy as np

from tim_vwap import discrete
from tim_vwap.kernel import RegularizedPowerLaw

BASELINE_N = 50
BASELINE_X0 = 1000.0
BASELINE_KERNEL = RegularizedPowerLaw(0.5)


def baseline_model(**overrides) -> discrete.MarketModel:
    """N=50, tau=1, k=1, sigma^2=0.01, zero drift, flat volume."""
    opts = dict(N=BASELINE_N)
    opts.update(overrides)
    return discrete.MarketModel.flat(**opts)


def full_window(N=BASELINE_N) -> discrete.BenchmarkWindow:
    return discrete.BenchmarkWindow(1, N)


def normalized_sup_distance(approx, reference) -> float:
    approx, reference = np.asarray(approx), np.asarray(reference)
    return float(np.max(np.abs(approx - reference)) / np.max(np.abs(reference)))


def interior(grid, T, lo=0.05, hi=0.95):
    return (grid > lo * T) & (grid < hi * T)


def simplex_grid(x0: float, n: int) -> np.ndarray:
    """All points (x1, x2, x0 - x1 - x2) >= 0 on an n-by-n grid; about n^2/2 points."""
    g = np.linspace(0.0, x0, n)
    X1, X2 = np.meshgrid(g, g, indexing="ij")
    X3 = x0 - X1 - X2
    ok = X3 >= 0
    return np.stack([X1[ok], X2[ok], X3[ok]], axis=1)


def quad_form(points: np.ndarray, A: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jk,ik->i", points, A, points) - points @ b
