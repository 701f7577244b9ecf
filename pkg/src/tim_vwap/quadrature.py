"""Product-integration solver for the risk-neutral optimality integral equation.

The unknown trading velocity is piecewise constant on N equal cells of [0, T]
and the equation is collocated at cell midpoints:

    sum_j W_ij v_j - x0 * sum_j eta_j U_ij = lam,      tau * sum_j v_j = x0

W_ij integrates G(|t_i - s|) exactly over cell j. U is the part of W with
s >= t_i (the diagonal cell is split at its midpoint), and D = W - U is the
part with s <= t_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy import integrate, linalg

from .errors import DomainError, NumericalFailure
from .kernel import DecayKernel, integral_abs

# eta given as per-cell averages, a density callable, or a named benchmark
EtaLike = Union[np.ndarray, Callable[[float], float], str]
DIRAC_BENCHMARKS = ("is", "target-close")


@dataclass(frozen=True)
class IntegralEquationSpec:
    kernel: DecayKernel
    T: float
    x0: float
    N: int
    eta: EtaLike = "flat"

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")

    @property
    def tau(self) -> float:
        return self.T / self.N

    @property
    def grid(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.tau

    def cell_eta(self) -> np.ndarray | None:
        """Per-cell average of eta, or None for the Dirac benchmarks."""
        eta = self.eta
        if isinstance(eta, str):
            if eta == "flat":
                return np.full(self.N, 1.0 / self.T)
            if eta in DIRAC_BENCHMARKS:
                return None
            raise DomainError(f"unknown eta profile {eta!r}")
        if callable(eta):
            edges = np.arange(self.N + 1) * self.tau
            vals = [integrate.quad(eta, lo, hi, limit=200)[0] / self.tau for lo, hi in zip(edges[:-1], edges[1:])]
            out = np.asarray(vals)
        else:
            out = np.asarray(eta, dtype=float)
            if out.shape != (self.N,):
                raise DomainError(f"sampled eta must have length N={self.N}, got shape {out.shape}")
        if np.any(out < 0):
            raise DomainError("eta must be non-negative")
        return out


def window_eta(T: float, N: int, T1: float, T2: float, volume=None) -> np.ndarray:
    """Cell averages of eta for a benchmark window [T1, T2].

    `volume` is an optional per-cell market volume profile; flat if omitted.
    Cells straddling a window edge are weighted by their overlap.
    """
    if not 0 <= T1 < T2 <= T:
        raise DomainError(f"window must satisfy 0 <= T1 < T2 <= T, got [{T1}, {T2}] with T={T}")
    tau = T / N
    edges = np.arange(N + 1) * tau
    overlap = np.clip(np.minimum(edges[1:], T2) - np.maximum(edges[:-1], T1), 0.0, None) / tau
    vol = np.ones(N) if volume is None else np.asarray(volume, dtype=float)
    if vol.shape != (N,) or np.any(vol <= 0):
        raise DomainError("volume must be a positive vector of length N")
    mass = vol * overlap
    return mass / (mass.sum() * tau)


@dataclass
class QuadratureSolution:
    grid: np.ndarray
    velocity: np.ndarray
    lam: float
    residual: float
    tau: float
    extra: dict = field(default_factory=dict)

    @property
    def mass(self) -> float:
        return float(self.velocity.sum() * self.tau)


def lag_weights(kernel: DecayKernel, N: int, tau: float) -> tuple[np.ndarray, float]:
    """Integrated kernel per lag: w[d] = int over the cell d steps away; plus the half-cell integral."""
    d = np.arange(N, dtype=float)
    lo = np.maximum(d - 0.5, 0.0) * tau
    hi = (d + 0.5) * tau
    w = np.asarray(kernel.integral(lo, hi), dtype=float)
    half = float(kernel.integral(0.0, 0.5 * tau))
    w[0] = 2.0 * half
    return w, half


def cell_weights(kernel: DecayKernel, N: int, T: float) -> np.ndarray:
    """W_ij = integral of G(|t_i - s|) over cell j, t_i the midpoint of cell i."""
    w, _ = lag_weights(kernel, N, T / N)
    return linalg.toeplitz(w)


def cell_average_propagator(kernel: DecayKernel, N: int, tau: float) -> np.ndarray:
    """Lower-triangular propagator whose entries are cell-averaged kernel values.

    Finite on the diagonal even for kernels singular at zero lag, so it can
    stand in for the plain propagator matrix in the discrete model.
    """
    w, _ = lag_weights(kernel, N, tau)
    return np.tril(linalg.toeplitz(w / tau))


def _split_weights(kernel, N, tau):
    w, half = lag_weights(kernel, N, tau)
    full = linalg.toeplitz(w)
    upper = np.triu(full, 1)
    np.fill_diagonal(upper, half)
    lower = np.tril(full, -1)
    np.fill_diagonal(lower, half)
    return full, upper, lower


def _forward_rhs(spec: IntegralEquationSpec, upper: np.ndarray) -> np.ndarray:
    # x0 * int_t^T eta_s G(s - t) ds at the collocation points
    eta = spec.cell_eta()
    if eta is not None:
        return spec.x0 * upper @ eta
    if spec.eta == "is":
        return np.zeros(spec.N)
    # target close: eta = 2 delta(s - T) carries weight 1 at the right end
    return spec.x0 * spec.kernel(spec.T - spec.grid)


def _backward_rhs(spec: IntegralEquationSpec, lower: np.ndarray) -> np.ndarray:
    # -x0 * int_0^t eta_s G(t - s) ds at the collocation points
    eta = spec.cell_eta()
    if eta is not None:
        return -spec.x0 * lower @ eta
    if spec.eta == "is":
        return -spec.x0 * spec.kernel(spec.grid)
    return np.zeros(spec.N)


def _solve(matrix, rhs):
    try:
        sol = linalg.solve(matrix, rhs, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"saddle system is singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise NumericalFailure("saddle system produced non-finite values")
    return sol


def _check_normalized(spec: IntegralEquationSpec):
    eta = spec.cell_eta()
    if eta is None:
        return
    total = eta.sum() * spec.tau
    if abs(total - 1.0) > 1e-10:
        raise DomainError(f"eta must integrate to 1 over [0, T], got {total:.12g}")


def solve_with_multiplier(spec: IntegralEquationSpec, W: np.ndarray, rhs: np.ndarray, mass: float):
    """Solve W v - lam = rhs with tau * sum(v) = mass; returns (v, lam)."""
    N, tau = spec.N, spec.tau
    K = np.zeros((N + 1, N + 1))
    K[:N, :N] = W
    K[:N, N] = 1.0
    K[N, :N] = tau
    sol = _solve(K, np.append(rhs, mass))
    return sol[:N], -sol[N]


def solve_optimal_velocity(spec: IntegralEquationSpec) -> QuadratureSolution:
    """Optimal trading velocity for a VWAP/IS/target-close benchmark under a linear TIM."""
    if spec.N < 4:
        raise DomainError(f"N must be >= 4 for the integral-equation solver, got {spec.N}")
    _check_normalized(spec)
    W, upper, _ = _split_weights(spec.kernel, spec.N, spec.tau)
    rhs = _forward_rhs(spec, upper)
    v, lam = solve_with_multiplier(spec, W, rhs, spec.x0)
    residual = float(np.max(np.abs(W @ v - rhs - lam)))
    return QuadratureSolution(spec.grid, v, lam, residual, spec.tau)


def solve_is(spec: IntegralEquationSpec, mass: float) -> QuadratureSolution:
    """Implementation-shortfall solve (constant right-hand side) for a given total mass."""
    W = cell_weights(spec.kernel, spec.N, spec.T)
    v, lam = solve_with_multiplier(spec, W, np.zeros(spec.N), mass)
    residual = float(np.max(np.abs(W @ v - lam)))
    return QuadratureSolution(spec.grid, v, lam, residual, spec.tau)


def solve_w2(spec: IntegralEquationSpec) -> QuadratureSolution:
    """Particular solution of int G(|t-s|) w_s ds = -x0 int_0^t eta_s G(t-s) ds.

    No multiplier row; the total mass of the returned velocity is x0' and is
    stored in ``extra["x0_prime"]``.
    """
    W, _, lower = _split_weights(spec.kernel, spec.N, spec.tau)
    rhs = _backward_rhs(spec, lower)
    w2 = _solve(W, rhs)
    residual = float(np.max(np.abs(W @ w2 - rhs)))
    sol = QuadratureSolution(spec.grid, w2, 0.0, residual, spec.tau)
    sol.extra["x0_prime"] = sol.mass
    return sol


def compose_from_w2(spec: IntegralEquationSpec) -> np.ndarray:
    """Rebuild the optimal velocity as w2 + (IS solution of mass -x0') + x0*eta."""
    eta = spec.cell_eta()
    if eta is None:
        raise DomainError("decomposition needs a sampled eta profile")
    w2 = solve_w2(spec)
    w1 = solve_is(spec, -w2.extra["x0_prime"])
    return w2.velocity + w1.velocity + spec.x0 * eta


def equation_residual(spec: IntegralEquationSpec, sol: QuadratureSolution, points) -> np.ndarray:
    """Residual of the integral equation at arbitrary points for the piecewise-constant solution.

    Only sampled eta profiles are supported (the residual of the Dirac cases
    is the same expression with the rhs replaced analytically).
    """
    points = np.asarray(points, dtype=float)
    tau = spec.tau
    edges = np.arange(spec.N + 1) * tau
    t = points[:, None]
    a, b = edges[None, :-1], edges[None, 1:]
    impact = integral_abs(spec.kernel, t, a, b) @ sol.velocity
    eta = spec.cell_eta()
    if eta is None:
        if spec.eta == "is":
            forward = np.zeros(len(points))
        else:
            forward = spec.x0 * spec.kernel(spec.T - points)
    else:
        fa = np.maximum(a, t)
        fwd = np.where(b > t, integral_abs(spec.kernel, t, fa, np.maximum(b, fa)), 0.0)
        forward = spec.x0 * fwd @ eta
    return impact - forward - sol.lam
