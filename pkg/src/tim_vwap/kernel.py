"""Decay kernels G(lag) of the transient impact model and the discrete propagator matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from .errors import DomainError


@dataclass(frozen=True)
class Exponential:
    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"Exponential kernel needs rho > 0, got {self.rho}")

    finite_at_zero = True

    def __call__(self, lag):
        return np.exp(-self.rho * np.asarray(lag, dtype=float))

    def integral(self, a, b):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        return (np.exp(-self.rho * a) - np.exp(-self.rho * b)) / self.rho


@dataclass(frozen=True)
class PowerLaw:
    """G(lag) = lag**-kappa, singular at zero lag but integrable."""

    kappa: float

    def __post_init__(self):
        if not 0 < self.kappa < 1:
            raise DomainError(f"PowerLaw kernel needs 0 < kappa < 1, got {self.kappa}")

    finite_at_zero = False

    def __call__(self, lag):
        lag = np.asarray(lag, dtype=float)
        with np.errstate(divide="ignore"):
            return lag ** (-self.kappa)

    def integral(self, a, b):
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        e = 1.0 - self.kappa
        return (b**e - a**e) / e


@dataclass(frozen=True)
class RegularizedPowerLaw:
    """G(lag) = 1 / (c + lag**kappa); finite at zero lag."""

    kappa: float
    c: float = 2.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"RegularizedPowerLaw needs kappa > 0, got {self.kappa}")
        if not self.c > 0:
            raise DomainError(f"RegularizedPowerLaw needs c > 0, got {self.c}")

    finite_at_zero = True

    def __call__(self, lag):
        return 1.0 / (self.c + np.asarray(lag, dtype=float) ** self.kappa)

    def integral(self, a, b):
        # no elementary antiderivative
        def one(lo, hi):
            return integrate.quad(lambda u: 1.0 / (self.c + u**self.kappa), lo, hi, epsabs=1e-14, epsrel=1e-12)[0]

        return np.vectorize(one, otypes=[float])(a, b)


@dataclass(frozen=True)
class Constant:
    level: float = 1.0

    def __post_init__(self):
        if not self.level > 0:
            raise DomainError(f"Constant kernel needs level > 0, got {self.level}")

    finite_at_zero = True

    def __call__(self, lag):
        return np.full(np.shape(lag), self.level, dtype=float)

    def integral(self, a, b):
        return self.level * (np.asarray(b, dtype=float) - np.asarray(a, dtype=float))


DecayKernel = Union[Exponential, PowerLaw, RegularizedPowerLaw, Constant]


def evaluate(kernel: DecayKernel, lag):
    """G(lag) for lag >= 0 (scalar or array)."""
    lag_arr = np.asarray(lag, dtype=float)
    if np.any(lag_arr < 0) or np.any(~np.isfinite(lag_arr)):
        raise DomainError("kernel lag must be finite and non-negative")
    if not kernel.finite_at_zero and np.any(lag_arr == 0):
        raise DomainError(
            f"{type(kernel).__name__} is singular at lag 0; use cell-integrated weights instead"
        )
    out = kernel(lag_arr)
    return float(out) if np.ndim(out) == 0 else out


def integral_abs(kernel: DecayKernel, t, a, b):
    """Integral of G(|t - s|) over s in [a, b], elementwise over broadcast arrays."""
    t, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t, a, b)))
    lo = np.clip(t, a, b)
    # the part of [a, b] left of t, then the part right of t
    left = kernel.integral(np.maximum(t - lo, 0.0), np.maximum(t - a, 0.0))
    right = kernel.integral(np.maximum(lo - t, 0.0), np.maximum(b - t, 0.0))
    return left + right


def propagator_matrix(kernel: DecayKernel, N: int, tau: float) -> np.ndarray:
    """Lower-triangular Toeplitz matrix with G_ij = G(tau*(i-j)) for i >= j."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not tau > 0:
        raise DomainError(f"tau must be > 0, got {tau}")
    if not kernel.finite_at_zero:
        raise DomainError(
            f"{type(kernel).__name__} is singular at lag 0; the propagator matrix needs a finite diagonal"
        )
    column = np.asarray(kernel(tau * np.arange(N)), dtype=float)
    lag = np.subtract.outer(np.arange(N), np.arange(N))
    return np.where(lag >= 0, column[np.clip(lag, 0, None)], 0.0)


_KERNEL_TYPES = {
    "exponential": (Exponential, ("rho",)),
    "power-law": (PowerLaw, ("kappa",)),
    "regularized-power-law": (RegularizedPowerLaw, ("kappa", "c")),
    "constant": (Constant, ("level",)),
}


def kernel_from_dict(spec: dict) -> DecayKernel:
    """Build a kernel from a config mapping such as {"type": "exponential", "rho": 1.0}."""
    kind = spec.get("type")
    if kind not in _KERNEL_TYPES:
        raise DomainError(f"kernel.type must be one of {sorted(_KERNEL_TYPES)}, got {kind!r}")
    cls, fields = _KERNEL_TYPES[kind]
    unknown = set(spec) - {"type", *fields}
    if unknown:
        raise DomainError(f"kernel: unknown field(s) {sorted(unknown)} for type {kind!r}")
    return cls(**{f: float(spec[f]) for f in fields if f in spec})


def kernel_to_dict(kernel: DecayKernel) -> dict:
    for name, (cls, fields) in _KERNEL_TYPES.items():
        if isinstance(kernel, cls):
            return {"type": name, **{f: getattr(kernel, f) for f in fields}}
    raise TypeError(f"not a decay kernel: {kernel!r}")
