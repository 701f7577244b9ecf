"""Closed-form continuous-time schedules.

Endpoint impulses follow the half-mass convention: a Dirac term a*delta(t)
sitting on an endpoint of [0, T] contributes a/2 to integrals over [0, T].
The impulse fields of ContinuousSchedule hold the delta coefficients a, so the
shares actually executed at the endpoint are a/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError
from .kernel import DecayKernel, PowerLaw
from .special_fn import HypParams, gamma, hyp2f1_special, hyp2f1_special_complement


@dataclass(frozen=True)
class ContinuousSchedule:
    initial_impulse: float
    terminal_impulse: float
    rate: Callable
    T: float
    x0: float
    singular_order: float = 0.0  # rate ~ t^-order at both ends
    # rate(T - d) evaluated from d directly; avoids rounding T - d near the end
    rate_from_end: Callable | None = None

    @property
    def initial_mass(self) -> float:
        return 0.5 * self.initial_impulse

    @property
    def terminal_mass(self) -> float:
        return 0.5 * self.terminal_impulse

    def interior_mass(self) -> float:
        return integrate_endpoint_singular(self.rate, self.T, self.singular_order, rate_from_end=self.rate_from_end)

    def executed_mass(self) -> float:
        return self.initial_mass + self.interior_mass() + self.terminal_mass

    def sample(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Rate at the midpoints of n equal cells of (0, T)."""
        t = (np.arange(n) + 0.5) * self.T / n
        return t, np.asarray(self.rate(t), dtype=float)

    def cell_averages(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Average rate over each of n equal cells, keyed by cell midpoint.

        Unlike `sample`, these integrate exactly to the interior mass, which
        keeps exported schedules mass-consistent near singular endpoints.
        """
        h = self.T / n
        edges = np.arange(n + 1) * h
        p = 1.0 / (1.0 - self.singular_order)
        opts = dict(epsabs=1e-13 * max(1.0, abs(self.x0)), epsrel=1e-12, limit=200)
        f, f_end = self.rate, self._end_rate()
        out = np.empty(n)
        for i in range(n):
            a, b = edges[i], edges[i + 1]
            if i == 0 and self.singular_order > 0:
                val = _quad_graded(lambda u: float(f(_clamp_open(u**p, self.T))) * p * u ** (p - 1), b ** (1 / p), opts)
            elif i == n - 1 and self.singular_order > 0:
                val = _quad_graded(lambda u: float(f_end(_clamp_open(u**p, self.T))) * p * u ** (p - 1), h ** (1 / p), opts)
            else:
                val = integrate.quad(lambda t: float(f(t)), a, b, **opts)[0]
            out[i] = val / h
        return 0.5 * (edges[:-1] + edges[1:]), out

    def _end_rate(self) -> Callable:
        if self.rate_from_end is not None:
            return self.rate_from_end
        return _end_from_start(self.rate, self.T)


def _quad_graded(g, upper, opts):
    # geometric split toward 0 isolates residual fractional-power cusps after substitution
    edges = np.concatenate([[0.0], upper * np.geomspace(1e-12, 1.0, 13)])
    return sum(integrate.quad(g, a, b, **opts)[0] for a, b in zip(edges[:-1], edges[1:]))


def _end_from_start(f, T):
    return lambda d: f(min(T - d, np.nextafter(T, 0.0)))


def _clamp_open(d, T):
    # distance from an endpoint, kept strictly inside (0, T)
    return min(max(d, np.nextafter(0.0, 1.0)), np.nextafter(T, 0.0))


def integrate_endpoint_singular(f: Callable, T: float, order: float, tol: float = 1e-11,
                                rate_from_end: Callable | None = None) -> float:
    """Integral of f over (0, T) where f may blow up like t^-order at both ends (order < 1).

    Each half is mapped through t = u**p with p = 1/(1 - order), which makes
    the integrand bounded at the endpoint. `rate_from_end(d)`, if given,
    evaluates f(T - d) without rounding T - d.
    """
    if not 0 <= order < 1:
        raise DomainError(f"singularity order must lie in [0, 1), got {order}")
    f_end = rate_from_end if rate_from_end is not None else _end_from_start(f, T)
    p = 1.0 / (1.0 - order)
    umax = (0.5 * T) ** (1.0 / p)

    def left(u):
        return float(f(_clamp_open(u**p, T))) * p * u ** (p - 1.0)

    def right(u):
        return float(f_end(_clamp_open(u**p, T))) * p * u ** (p - 1.0)

    opts = dict(epsabs=tol, epsrel=tol, limit=400)
    return _quad_graded(left, umax, opts) + _quad_graded(right, umax, opts)


def _check_open(t, T):
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= T):
        raise DomainError("rate is only defined for 0 < t < T")
    return t


def _check_kappa(kappa):
    if not 0 < kappa < 1:
        raise DomainError(f"kappa must lie in (0, 1), got {kappa}")


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def _u_shape(s, sc, kappa):
    return (s * sc) ** (-(1.0 - kappa) / 2.0)


def _hyp(kappa, s, sc):
    def one(z, w):
        if z <= 0.5:
            return hyp2f1_special(HypParams(kappa, float(z)))
        return hyp2f1_special_complement(kappa, float(w))

    return np.vectorize(one, otypes=[float])(s, sc)


def is_prefactor(kappa: float) -> float:
    return 2.0**kappa * gamma(1.0 + kappa / 2.0) / (math.sqrt(math.pi) * gamma((1.0 + kappa) / 2.0))


def vwap_prefactor(kappa: float) -> float:
    return (
        2.0 ** (kappa - 2.0)
        * math.sqrt(math.pi)
        / math.sin(kappa * math.pi / 2.0)
        / (gamma(1.0 - kappa / 2.0) * gamma((1.0 + kappa) / 2.0))
    )


# Profiles in normalized time: s = t/T and its complement sc = 1 - s passed separately.


def _is_profile(x0, T, kappa, s, sc):
    return (x0 / T) * is_prefactor(kappa) * _u_shape(s, sc, kappa)


def _w2_profile(x0, T, kappa, s, sc):
    return (x0 / T) * (-1.0 + vwap_prefactor(kappa) * _hyp(kappa, s, sc) * _u_shape(s, sc, kappa))


def _vwap_profile(x0, T, kappa, s, sc):
    return (x0 / T) * vwap_prefactor(kappa) * (kappa + _hyp(kappa, s, sc)) * _u_shape(s, sc, kappa)


def _from_start(profile, x0, T, kappa):
    def rate(t):
        _check_kappa(kappa)
        t = _check_open(t, T)
        return _scalar(profile(x0, T, kappa, t / T, (T - t) / T))

    return rate


def _from_end(profile, x0, T, kappa):
    def rate(d):
        d = _check_open(d, T)
        return _scalar(profile(x0, T, kappa, (T - d) / T, d / T))

    return rate


def is_powerlaw_rate(x0: float, T: float, kappa: float, t):
    """U-shaped IS-optimal velocity for G(t) = t^-kappa; integrates to x0 over (0, T)."""
    return _from_start(_is_profile, x0, T, kappa)(t)


def w2_powerlaw_rate(x0: float, T: float, kappa: float, t):
    """Particular part w2 of the VWAP solution for G(t) = t^-kappa and flat eta = 1/T."""
    return _from_start(_w2_profile, x0, T, kappa)(t)


def vwap_powerlaw_rate(x0: float, T: float, kappa: float, t):
    """VWAP-optimal velocity (benchmark window = trading window, flat volume) for G(t) = t^-kappa.

    Diverges to +inf at t -> 0+ and to -inf at t -> T-.
    """
    return _from_start(_vwap_profile, x0, T, kappa)(t)


def vwap_exponential_schedule(x0: float, T: float, rho: float) -> ContinuousSchedule:
    """VWAP-optimal schedule for G(t) = exp(-rho t): sell impulse, constant rate, buy impulse."""
    if x0 == 0:
        raise DomainError("x0 must be non-zero")
    if not T > 0 or not rho > 0:
        raise DomainError("T and rho must be positive")
    rT = rho * T
    denom = rT * (2.0 + rT)
    a1 = 2.0 * x0 * (1.0 + rT) / denom
    b = x0 * rho * (1.0 + rT) / denom
    a2 = -2.0 * x0 / denom
    return ContinuousSchedule(a1, a2, lambda t: np.full(np.shape(t), b), T, x0)


def _powerlaw_schedule(profile, x0, T, kappa, terminal_impulse=0.0, mass=None):
    _check_kappa(kappa)
    m = x0 if mass is None else mass
    return ContinuousSchedule(
        0.0,
        terminal_impulse,
        _from_start(profile, m, T, kappa),
        T,
        x0,
        singular_order=(1 - kappa) / 2,
        rate_from_end=_from_end(profile, m, T, kappa),
    )


def vwap_powerlaw_schedule(x0: float, T: float, kappa: float) -> ContinuousSchedule:
    return _powerlaw_schedule(_vwap_profile, x0, T, kappa)


def is_powerlaw_schedule(x0: float, T: float, kappa: float) -> ContinuousSchedule:
    return _powerlaw_schedule(_is_profile, x0, T, kappa)


def target_close_decomposition(x0: float, T: float, kernel: DecayKernel) -> ContinuousSchedule:
    """Target-close schedule: x0/2 traded as the IS solution plus x0/2 executed at t = T."""
    if not isinstance(kernel, PowerLaw):
        raise NotImplementedError(
            f"closed-form target close only for PowerLaw kernels, got {type(kernel).__name__}"
        )
    # terminal delta coefficient x0 executes x0/2
    return _powerlaw_schedule(_is_profile, x0, T, kernel.kappa, terminal_impulse=x0, mass=0.5 * x0)


def almgren_chriss_baseline(x0: float, T: float, beta: float, t):
    """Risk-neutral VWAP schedule under linear permanent + quadratic temporary impact."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > T):
        raise DomainError("t must lie in [0, T]")
    return _scalar((x0 / T) * ((beta + 1.0) - 2.0 * beta * t / T))


def sign_change_time(x0: float, T: float, kappa: float, tol: float = 1e-12) -> float:
    """Root t* of the power-law VWAP velocity; sells before, buys after."""
    # the sign is carried by kappa + 2F1(...; t/T), which is monotone in t
    s = optimize.brentq(lambda z: kappa + hyp2f1_special(HypParams(kappa, z)), 0.0, 1.0, xtol=tol)
    return s * T
