"""Harmonic alpha-Bloch seminorms and norms, little-Bloch decay profiles,
the pointwise growth bound, and the two-function lower-bound checker."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adaptive import (
    DEFAULT_BUDGET,
    Budget,
    DecayProfile,
    SupEstimate,
    circle_profile,
    default_profile_radii,
    sup_over_disk,
)
from .disk_geometry import as_disk, one_minus_abs2
from .function_model import AnalyticMap, HarmonicMap, eval_harmonic


@dataclass(frozen=True)
class Alpha:
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"alpha must be positive, got {self.value}")

    def __float__(self):
        return float(self.value)


def _alpha(alpha) -> float:
    return float(alpha.value) if isinstance(alpha, Alpha) else float(Alpha(float(alpha)).value)


def _intensity(f: HarmonicMap, alpha: float, z: np.ndarray) -> np.ndarray:
    return one_minus_abs2(z) ** alpha * (np.abs(f.h._deriv(z)) + np.abs(f.g._deriv(z)))


def local_intensity(f: HarmonicMap, alpha, z):
    """(1 - |z|^2)^alpha (|f_z(z)| + |f_zbar(z)|)."""
    a = _alpha(alpha)
    z = as_disk(z)
    out = _intensity(f, a, np.asarray(z, dtype=complex))
    return out if np.ndim(out) else float(out)


def seminorm(f: HarmonicMap, alpha, budget: Budget = DEFAULT_BUDGET) -> SupEstimate:
    """Adaptive estimate of sup_D (1 - |z|^2)^alpha (|f_z| + |f_zbar|)."""
    a = _alpha(alpha)
    return sup_over_disk(lambda z: _intensity(f, a, z), budget)


def norm(f: HarmonicMap, alpha, budget: Budget = DEFAULT_BUDGET):
    """|f(0)| + seminorm; returns (value, SupEstimate)."""
    est = seminorm(f, alpha, budget)
    return abs(eval_harmonic(f, 0.0)) + est.value, est


def little_bloch_profile(f: HarmonicMap, alpha, radii=None, budget: Budget = DEFAULT_BUDGET) -> DecayProfile:
    """Circle maxima of the Bloch intensity as |z| -> 1."""
    a = _alpha(alpha)
    radii = default_profile_radii(budget.profile_k_max) if radii is None else radii
    return circle_profile(lambda z: _intensity(f, a, z), radii, budget)


def path_integral_factor(s, alpha) -> float:
    """I(s) = int_0^1 (1 - s t)^(-alpha) dt, with I(0) = 1."""
    a = _alpha(alpha)
    s = float(s)
    if not 0.0 <= s < 1.0:
        raise ValueError(f"need 0 <= s < 1, got {s}")
    if s < 1e-8:
        return 1.0 + a * s / 2.0
    lg = math.log1p(-s)
    if abs(a - 1.0) < 1e-12:
        return -lg / s
    return math.expm1((1.0 - a) * lg) / ((a - 1.0) * s)


def growth_bound(norm_value: float, alpha, z, f0=None) -> float:
    """Bound on |f(z) - f(0)| from the seminorm: |z| * seminorm * I(|z|).

    With ``f0`` given the bound is shifted to |f(z)| <= |f0| + that.
    """
    if norm_value < 0:
        raise ValueError("norm_value must be nonnegative")
    s = abs(complex(as_disk(z)))
    b = s * norm_value * path_integral_factor(s, alpha)
    return b if f0 is None else abs(complex(f0)) + b


@dataclass(frozen=True)
class PairCheck:
    min_ratio: float
    witness: complex
    passes: bool


def extremal_pair_check(h: AnalyticMap, g: AnalyticMap, alpha, grid, tol: float = 1e-9) -> PairCheck:
    """min over ``grid`` of (|h'(z)| + |g'(z)|)(1 - |z|)^alpha; passes iff >= 1 - tol."""
    a = _alpha(alpha)
    z = np.atleast_1d(np.asarray(as_disk(np.asarray(grid, dtype=complex)), dtype=complex))
    ratio = (np.abs(h._deriv(z)) + np.abs(g._deriv(z))) * (1.0 - np.abs(z)) ** a
    i = int(np.argmin(ratio))
    m = float(ratio[i])
    return PairCheck(m, complex(z[i]), m >= 1.0 - tol)
