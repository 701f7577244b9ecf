"""Discrete-time VWAP execution as an equality/box constrained quadratic program.

Prices follow S = S0*1 - k*G*x + sqrt(tau)*L*eps with eps ~ N(mu, Sigma), where G
is the lower-triangular propagator matrix and L the lower-triangular matrix of
ones. Maximizing E[(x - x0*eta)'S] - gamma*Var[(x - x0*eta)'S] subject to
sum(x) = x0 is the QP

    min x'Ax - b'x,   A = k*G + gamma*tau*L*Sigma*L',
                      b = k*x0*G'eta + 2*gamma*tau*x0*L*Sigma*L'eta + sqrt(tau)*L*mu

and -U(x) = x'Ax - b'x + C with C = sqrt(tau)*x0*eta'L*mu + gamma*tau*x0^2*eta'L*Sigma*L'eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import DomainError, Infeasible, NotPositiveDefinite, NumericalFailure
from .kernel import DecayKernel, propagator_matrix

KKT_TOL = 1e-8


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MarketModel:
    k: float
    tau: float
    N: int
    mu: np.ndarray
    Sigma: np.ndarray
    volume: np.ndarray
    S0: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"k must be > 0, got {self.k}")
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        N = self.N
        mu, Sigma, volume = _frozen(self.mu), _frozen(self.Sigma), _frozen(self.volume)
        if mu.shape != (N,):
            raise DomainError(f"mu must have length {N}")
        if Sigma.shape != (N, N):
            raise DomainError(f"Sigma must be {N}x{N}")
        if not np.allclose(Sigma, Sigma.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Sigma).max())):
            raise DomainError("Sigma must be symmetric")
        try:
            np.linalg.cholesky(Sigma)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite("Sigma must be positive definite (Cholesky failed)") from exc
        if volume.shape != (N,) or np.any(volume <= 0):
            raise DomainError("volume must be a strictly positive vector of length N")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "Sigma", Sigma)
        object.__setattr__(self, "volume", volume)

    @classmethod
    def flat(cls, N: int, tau: float = 1.0, k: float = 1.0, sigma2: float = 0.01, mu: float = 0.0,
             volume: float = 1.0, S0: float = 0.0) -> "MarketModel":
        """Constant drift, i.i.d. noise with variance sigma2, flat market volume."""
        return cls(k, tau, N, np.full(N, mu), sigma2 * np.eye(N), np.full(N, volume), S0)

    @property
    def L(self) -> np.ndarray:
        return np.tril(np.ones((self.N, self.N)))


@dataclass(frozen=True)
class BenchmarkWindow:
    l1: int
    l2: int

    def __post_init__(self):
        if self.l1 < 1:
            raise DomainError(f"l1 must be >= 1, got {self.l1}")
        if self.l1 > self.l2:
            raise DomainError(f"l1 > l2 ({self.l1} > {self.l2})")

    @classmethod
    def from_times(cls, T1: float, T2: float, T: float, N: int) -> "BenchmarkWindow":
        """Map a continuous window to bucket indices by nearest-integer rounding (halves round up)."""
        l1 = max(1, math.floor(N * T1 / T + 0.5))
        l2 = max(1, math.floor(N * T2 / T + 0.5))
        return cls(l1, min(l2, N))

    def mask(self, N: int) -> np.ndarray:
        if self.l2 > N:
            raise DomainError(f"window [{self.l1}, {self.l2}] exceeds N={N}")
        idx = np.arange(1, N + 1)
        return (idx >= self.l1) & (idx <= self.l2)

    @property
    def length(self) -> int:
        return self.l2 - self.l1 + 1


def build_eta(volume, window: BenchmarkWindow) -> np.ndarray:
    """Volume-weighted benchmark weights restricted to the window; sums to one."""
    volume = np.asarray(volume, dtype=float)
    mask = window.mask(len(volume))
    w = np.where(mask, volume, 0.0)
    total = w.sum()
    if not total > 0:
        raise DomainError("benchmark window carries no volume")
    return w / total


def is_eta(N: int) -> np.ndarray:
    """Benchmark at the pre-trade price S0: no weight on any traded bucket."""
    return np.zeros(N)


def resolve_eta(model: MarketModel, benchmark) -> np.ndarray:
    if isinstance(benchmark, BenchmarkWindow):
        return build_eta(model.volume, benchmark)
    if isinstance(benchmark, str) and benchmark == "is":
        return is_eta(model.N)
    eta = np.asarray(benchmark, dtype=float)
    if eta.shape != (model.N,):
        raise DomainError(f"eta must have length {model.N}")
    return eta


def executed_volume_correction(G: np.ndarray, x0: float, window: BenchmarkWindow, V: float) -> np.ndarray:
    """G - x0*M, the propagator adjusted for the order's own volume entering a flat-volume VWAP."""
    if not V > 0:
        raise DomainError(f"V must be > 0, got {V}")
    return G - x0 * own_volume_matrix(G.shape[0], window, V)


def own_volume_matrix(N: int, window: BenchmarkWindow, V: float) -> np.ndarray:
    mask = window.mask(N).astype(float)
    delta = window.length
    core = np.eye(N) - np.ones((N, N)) / delta
    return np.outer(mask, mask) * core / V


@dataclass(frozen=True)
class QPSpec:
    """min x'Ax - b'x  s.t. sum(x) = x0, lower <= x <= upper.

    `constant` is C in -U(x) = x'Ax - b'x + C. The remaining optional fields
    let a solver report expected profit and utility alongside the solution.
    """

    A: np.ndarray
    b: np.ndarray
    x0: float
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    constant: float = 0.0
    eta: np.ndarray | None = None
    G: np.ndarray | None = None
    k: float | None = None
    drift: np.ndarray | None = None  # sqrt(tau) * L @ mu
    risk: np.ndarray | None = None  # gamma * tau * L Sigma L'

    @property
    def N(self) -> int:
        return len(self.b)

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.A @ x - self.b @ x)


@dataclass
class SolveReport:
    schedule: np.ndarray
    multiplier: float
    active_set: list[int]
    kkt_residual: float
    objective: float
    expected_excess_profit: float | None = None
    utility: float | None = None
    iterations: int = 0
    meta: dict = field(default_factory=dict)


def build_qp(model: MarketModel, kernel: DecayKernel | None, window, gamma: float, x0: float, *,
             cost_discretization: bool = False, own_volume: bool = False,
             propagator: np.ndarray | None = None) -> QPSpec:
    """Assemble (A, b, C) for the utility-maximizing execution.

    `window` is a BenchmarkWindow, an explicit eta vector, or "is" for the
    arrival-price benchmark. `cost_discretization` halves the diagonal of G
    (discretizing the continuous cost instead of the price dynamics).
    `own_volume` adds the first-order correction for the order's own trades
    entering the VWAP; it requires a flat volume profile and a window.
    `propagator` replaces the matrix built from `kernel`, e.g. cell-averaged
    weights of a kernel that is singular at zero lag.
    """
    if gamma < 0:
        raise DomainError(f"gamma must be >= 0, got {gamma}")
    N, tau = model.N, model.tau
    if propagator is None:
        G = propagator_matrix(kernel, N, tau)
    else:
        G = np.asarray(propagator, dtype=float)
        if G.shape != (N, N) or np.any(np.triu(G, 1) != 0) or np.any(np.diag(G) <= 0):
            raise DomainError("propagator must be lower triangular with a positive diagonal")
    if cost_discretization:
        G = G - 0.5 * np.diag(np.diag(G))
    eta = resolve_eta(model, window)
    if own_volume:
        if not isinstance(window, BenchmarkWindow):
            raise DomainError("own-volume correction needs a benchmark window")
        if not np.allclose(model.volume, model.volume[0]):
            raise DomainError("own-volume correction assumes a flat volume profile")
        G = executed_volume_correction(G, x0, window, float(model.volume[0]))
    L = model.L
    LSL = L @ model.Sigma @ L.T
    risk = gamma * tau * LSL
    drift = math.sqrt(tau) * L @ model.mu
    A = model.k * G + risk
    b = model.k * x0 * G.T @ eta + 2.0 * x0 * risk @ eta + drift
    C = x0 * eta @ drift + x0**2 * eta @ risk @ eta
    return QPSpec(A, b, x0, constant=float(C), eta=eta, G=G, k=model.k, drift=drift, risk=risk)


def _hessian(spec: QPSpec) -> np.ndarray:
    return spec.A + spec.A.T


def pd_certificate(spec: QPSpec) -> bool:
    """True if the symmetrized quadratic form is positive definite."""
    try:
        np.linalg.cholesky(0.5 * _hessian(spec))
    except np.linalg.LinAlgError:
        return False
    return True


def _scale(H, b, x):
    return max(1.0, np.abs(b).max(), np.abs(H).max() * np.abs(x).max())


def _evaluate(spec: QPSpec, x: np.ndarray, report: SolveReport) -> SolveReport:
    if spec.eta is not None and spec.G is not None:
        d = x - spec.x0 * spec.eta
        profit = -spec.k * d @ spec.G @ x + d @ spec.drift
        report.expected_excess_profit = float(profit)
        report.utility = float(profit - d @ spec.risk @ d)
    return report


def _kkt_equality(H, b, x0, free, fixed_vals):
    # stationarity on free variables with the others pinned at fixed_vals
    n = len(free)
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = H[np.ix_(free, free)]
    K[:n, n] = 1.0
    K[n, :n] = 1.0
    rhs = np.append(b[free] - H[free] @ fixed_vals, x0 - fixed_vals.sum())
    try:
        sol = linalg.solve(K, rhs)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"KKT system is singular: {exc}") from exc
    return sol[:n], sol[n]


def solve_equality(spec: QPSpec) -> SolveReport:
    """Exact solution of min x'Ax - b'x subject to sum(x) = x0.

    Solves [[A + A', 1], [1', 0]] [x; nu] = [b; x0].
    """
    if not pd_certificate(spec):
        raise NotPositiveDefinite("symmetrized A is not positive definite")
    H = _hessian(spec)
    N = spec.N
    x, nu = _kkt_equality(H, spec.b, spec.x0, np.arange(N), np.zeros(N))
    grad = H @ x - spec.b + nu
    res = max(np.abs(grad).max() / _scale(H, spec.b, x), abs(x.sum() - spec.x0) / max(1.0, abs(spec.x0)))
    report = SolveReport(x, float(nu), [], float(res), spec.objective(x))
    return _evaluate(spec, x, report)


def _bounds(spec: QPSpec, lower, upper):
    N = spec.N
    lo = spec.lower if lower is None else lower
    hi = spec.upper if upper is None else upper
    lo = np.full(N, -np.inf) if lo is None else np.broadcast_to(np.asarray(lo, dtype=float), (N,)).copy()
    hi = np.full(N, np.inf) if hi is None else np.broadcast_to(np.asarray(hi, dtype=float), (N,)).copy()
    if np.any(lo > hi):
        raise Infeasible("lower bound exceeds upper bound")
    if lo.sum() > spec.x0 or hi.sum() < spec.x0:
        raise Infeasible(f"bounds cannot accommodate a total of {spec.x0}")
    return lo, hi


def _feasible_start(y, lo, hi, x0):
    # shift y uniformly and clip so the total is x0 (projection onto the box-slice)
    def total(s):
        return np.clip(y + s, lo, hi).sum() - x0

    span = np.abs(y).max() + np.abs(x0) + 1.0
    finite = np.concatenate([lo[np.isfinite(lo)], hi[np.isfinite(hi)]])
    if finite.size:
        span += np.abs(finite).max()
    a, b = -span, span
    while total(a) > 0:
        a *= 2
    while total(b) < 0:
        b *= 2
    for _ in range(200):
        m = 0.5 * (a + b)
        if total(m) > 0:
            b = m
        else:
            a = m
    x = np.clip(y + 0.5 * (a + b), lo, hi)
    # put the bisection leftover on a variable with room
    gap = x0 - x.sum()
    room = np.where(gap > 0, hi - x, x - lo)
    i = int(np.argmax(room))
    x[i] += gap
    return x


def _multipliers(H, b, x, nu, lo, hi, at_lo, at_hi):
    grad = H @ x - b + nu
    # grad_i = mu_lo_i - mu_hi_i; correct signs: mu >= 0
    sign_ok = np.ones_like(grad)
    sign_ok[at_lo] = grad[at_lo]
    sign_ok[at_hi] = -grad[at_hi]
    return grad, sign_ok


def solve_bounded(spec: QPSpec, lower=None, upper=None, max_iter: int | None = None) -> SolveReport:
    """Primal active-set method for the QP with box bounds.

    Starts from the unconstrained (equality) solution projected onto the
    feasible set, then repeatedly solves the equality-constrained problem on
    the free variables, stopping at blocking bounds and releasing bounds whose
    multiplier has the wrong sign.
    """
    if not pd_certificate(spec):
        raise NotPositiveDefinite("symmetrized A is not positive definite")
    lo, hi = _bounds(spec, lower, upper)
    H, b, x0, N = _hessian(spec), spec.b, spec.x0, spec.N
    max_iter = 10 * N if max_iter is None else max_iter
    scale_tol = 1e-12 * max(1.0, abs(x0))

    base = solve_equality(spec)
    x = _feasible_start(base.schedule, lo, hi, x0)
    active = np.zeros(N, dtype=bool)
    active[(x <= lo + scale_tol) | (x >= hi - scale_tol)] = True
    x[active & (x <= lo + scale_tol)] = lo[active & (x <= lo + scale_tol)]
    x[active & (x >= hi - scale_tol)] = hi[active & (x >= hi - scale_tol)]
    if active.all():
        # a fully pinned start leaves no room for the sum constraint; free the loosest variable
        active[int(np.argmax(np.minimum(x - lo, hi - x)))] = False

    for it in range(1, max_iter + 1):
        free = np.flatnonzero(~active)
        fixed_vals = np.where(active, x, 0.0)
        xf, nu = _kkt_equality(H, b, x0, free, fixed_vals)
        target = fixed_vals.copy()
        target[free] = xf
        step = target - x
        if np.abs(step).max() <= 1e-11 * max(1.0, np.abs(x).max()):
            at_lo = active & (x <= lo)
            at_hi = active & (x >= hi)
            grad, sign_ok = _multipliers(H, b, x, nu, lo, hi, at_lo, at_hi)
            scale = _scale(H, b, x)
            worst = int(np.argmin(np.where(active, sign_ok, np.inf)))
            if not active.any() or sign_ok[worst] >= -KKT_TOL * scale:
                return _bounded_report(spec, x, nu, active, H, lo, hi, it)
            active[worst] = False
            continue
        # longest feasible step toward target
        alpha, blocking = 1.0, -1
        for i in free:
            s = step[i]
            if s < 0 and np.isfinite(lo[i]):
                a = (lo[i] - x[i]) / s
            elif s > 0 and np.isfinite(hi[i]):
                a = (hi[i] - x[i]) / s
            else:
                continue
            if a < alpha:
                alpha, blocking = a, i
        x = x + max(alpha, 0.0) * step
        if blocking >= 0:
            x[blocking] = lo[blocking] if step[blocking] < 0 else hi[blocking]
            active[blocking] = True
    raise NumericalFailure(f"active-set iteration cap ({max_iter}) exceeded")


def _bounded_report(spec, x, nu, active, H, lo, hi, iterations):
    grad = H @ x - spec.b + nu
    scale = _scale(H, spec.b, x)
    free = ~active
    at_lo = active & (x <= lo)
    at_hi = active & (x >= hi)
    parts = [
        np.abs(grad[free]).max(initial=0.0) / scale,
        abs(x.sum() - spec.x0) / max(1.0, abs(spec.x0)),
        np.clip(grad[at_lo], None, 0).__abs__().max(initial=0.0) / scale,
        np.clip(-grad[at_hi], None, 0).__abs__().max(initial=0.0) / scale,
        np.clip(lo - x, 0, None).max(initial=0.0),
        np.clip(x - hi, 0, None).max(initial=0.0),
    ]
    report = SolveReport(
        x, float(nu), [int(i) for i in np.flatnonzero(active)], float(max(parts)), spec.objective(x),
        iterations=iterations,
    )
    return _evaluate(spec, x, report)


def expected_excess_profit(x, model: MarketModel, kernel: DecayKernel, window, x0: float) -> float:
    """E[(x - x0*eta)'S] = -k (x - x0 eta)'G x + sqrt(tau) (x - x0 eta)'L mu."""
    x = np.asarray(x, dtype=float)
    eta = resolve_eta(model, window)
    G = propagator_matrix(kernel, model.N, model.tau)
    d = x - x0 * eta
    return float(-model.k * d @ G @ x + math.sqrt(model.tau) * d @ model.L @ model.mu)


def expected_utility(x, model: MarketModel, kernel: DecayKernel, window, gamma: float, x0: float) -> float:
    """Mean-variance utility of the excess cash; equals the CARA certainty equivalent under Gaussian noise."""
    x = np.asarray(x, dtype=float)
    eta = resolve_eta(model, window)
    d = x - x0 * eta
    L = model.L
    variance = model.tau * d @ L @ model.Sigma @ L.T @ d
    return expected_excess_profit(x, model, kernel, window, x0) - gamma * float(variance)


def optimize(model: MarketModel, kernel: DecayKernel, window, gamma: float, x0: float, *,
             lower=None, upper=None, **qp_opts) -> SolveReport:
    """build_qp followed by the equality or the bounded solver."""
    spec = build_qp(model, kernel, window, gamma, x0, **qp_opts)
    if lower is None and upper is None:
        return solve_equality(spec)
    return solve_bounded(spec, lower, upper)


def centered_windows(N: int, lengths: Sequence[int]) -> list[BenchmarkWindow]:
    """Windows of odd length centred on bucket N//2."""
    c = N // 2
    out = []
    for n in lengths:
        if n % 2 != 1:
            raise DomainError(f"centred windows need odd lengths, got {n}")
        h = (n - 1) // 2
        out.append(BenchmarkWindow(c - h, c + h))
    return out


def profit_scan(model: MarketModel, kernel: DecayKernel, gamma: float, x0: float,
                windows: Sequence[BenchmarkWindow]) -> list[tuple[BenchmarkWindow, float]]:
    """Expected excess profit of the optimal schedule for each benchmark window."""
    rows = []
    for w in windows:
        report = optimize(model, kernel, w, gamma, x0)
        rows.append((w, report.expected_excess_profit))
    return rows
