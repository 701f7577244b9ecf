"""Gamma function and the Gauss hypergeometric 2F1(1, kappa-1, (1+kappa)/2; z).

Only the parameter triple that shows up in the power-law VWAP solution is
supported; this is not a general-purpose 2F1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Lanczos coefficients, g = 7, n = 9 (Godfrey's set).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SERIES_TOL = 1e-17
_SERIES_MAX_TERMS = 10_000


def _lanczos(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def gamma(x: float) -> float:
    """Gamma function for x > 0.

    Uses the Lanczos approximation, with the reflection formula below 1/2.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma requires a finite x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    return _lanczos(x)


def _gamma_signed(x: float) -> float:
    # Gamma on (-1, 0) via the recurrence; the transformation coefficients need it.
    if x > 0:
        return gamma(x)
    if -1.0 < x < 0.0:
        return gamma(x + 1.0) / x
    raise DomainError(f"gamma evaluated at unsupported argument {x}")


@dataclass(frozen=True)
class HypParams:
    kappa: float
    z: float

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise DomainError(f"kappa must lie in (0, 1), got {self.kappa}")
        if not 0.0 <= self.z <= 1.0:
            raise DomainError(f"z must lie in [0, 1], got {self.z}")


def gauss_series(a: float, b: float, c: float, z: float, max_terms: int = _SERIES_MAX_TERMS) -> float:
    """Partial sums of sum_n (a)_n (b)_n / (c)_n z^n / n!, stopped at machine precision."""
    term = 1.0
    total = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if abs(term) <= _SERIES_TOL * abs(total):
            break
    return total


def hyp2f1_special(p: HypParams) -> float:
    """2F1(1, kappa-1, (1+kappa)/2; z) for z in [0, 1].

    Direct series for z <= 1/2; above that the z -> 1-z connection formula,
    which is regular here because c-a-b = (1-kappa)/2 is never an integer.
    """
    kappa, z = p.kappa, p.z
    a, b, c = 1.0, kappa - 1.0, 0.5 * (1.0 + kappa)
    if z == 0.0:
        return 1.0
    if z == 1.0:
        # Gauss summation; reduces to exactly -1 for this triple
        return -1.0
    if z <= 0.5:
        return gauss_series(a, b, c, z)
    return hyp2f1_special_complement(kappa, 1.0 - z)


def hyp2f1_special_complement(kappa: float, w: float) -> float:
    """2F1(1, kappa-1, (1+kappa)/2; 1 - w), taking the distance w from z = 1 directly.

    Avoids the cancellation in forming 1 - z when z is within a few ulps of 1.
    """
    if not 0.0 < kappa < 1.0:
        raise DomainError(f"kappa must lie in (0, 1), got {kappa}")
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"w must lie in [0, 1], got {w}")
    if w == 0.0:
        # Gauss summation; reduces to exactly -1 for this triple
        return -1.0
    a, b, c = 1.0, kappa - 1.0, 0.5 * (1.0 + kappa)
    if w >= 0.5:
        return gauss_series(a, b, c, 1.0 - w)
    s = c - a - b
    coef1 = gamma(c) * gamma(s) / (_gamma_signed(c - a) * gamma(c - b))
    coef2 = gamma(c) * _gamma_signed(-s) / (gamma(a) * _gamma_signed(b))
    return coef1 * gauss_series(a, b, 1.0 - s, w) + coef2 * w**s * gauss_series(c - a, c - b, 1.0 + s, w)
