"""Geometry of the unit disk: automorphisms, pseudohyperbolic and hyperbolic
distances, separation tests and hyperbolic sampling lattices.

All functions accept Python complex scalars or numpy complex arrays and
broadcast like ordinary numpy ufuncs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# points closer than this to the unit circle are rejected
BOUNDARY_EPS = 1e-15


class DomainError(ValueError):
    """A point (or a function value) left the open unit disk."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError(f"non-finite disk point ({self.re}, {self.im})")
        if math.hypot(self.re, self.im) >= 1.0 - BOUNDARY_EPS:
            raise DomainError(
                f"point {complex(self.re, self.im)} is not in the open unit disk",
                witness=complex(self.re, self.im),
            )

    @classmethod
    def from_complex(cls, z) -> "DiskPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class SeparationParams:
    R: float

    def __post_init__(self):
        if not 0.0 < self.R < 1.0:
            raise ValueError(f"separation constant must lie in (0, 1), got {self.R}")


def as_disk(z):
    """Coerce ``z`` to complex (scalar or array) and check it lies in D."""
    if isinstance(z, DiskPoint):
        return z.z
    if np.ndim(z) == 0:
        z = complex(z)
        if not abs(z) < 1.0 - BOUNDARY_EPS:
            raise DomainError(f"point {z} is not in the open unit disk", witness=z)
        return z
    z = np.asarray(z, dtype=complex)
    bad = ~(np.abs(z) < 1.0 - BOUNDARY_EPS)
    if bad.any():
        w = complex(z[bad].flat[0])
        raise DomainError(f"point {w} is not in the open unit disk", witness=w)
    return z


def one_minus_abs2(z):
    """1 - |z|^2 computed as (1 - |z|)(1 + |z|) to keep digits near the circle."""
    r = np.abs(z)
    return (1.0 - r) * (1.0 + r)


def clog1p(w):
    """log(1 + w) for complex w, accurate when |w| is small.

    numpy's complex log1p loses relative accuracy in the real part.
    """
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    re = 0.5 * np.log1p(2.0 * x + x * x + y * y)
    im = np.arctan2(y, 1.0 + x)
    out = re + 1j * im
    return out if out.ndim else complex(out)


def moebius(a, z):
    """The involutive automorphism psi_a(z) = (a - z) / (1 - conj(a) z)."""
    a = as_disk(a)
    z = as_disk(z)
    return (a - z) / (1.0 - np.conj(a) * z)


def moebius_deriv(a, z):
    """psi_a'(z) = (|a|^2 - 1) / (1 - conj(a) z)^2."""
    a = as_disk(a)
    z = as_disk(z)
    return -one_minus_abs2(a) / (1.0 - np.conj(a) * z) ** 2


def pseudo_hyperbolic(z, w):
    """rho(z, w) = |psi_z(w)|, a metric on D with values in [0, 1)."""
    z = as_disk(z)
    w = as_disk(w)
    return np.abs((z - w) / (1.0 - np.conj(z) * w))


def _arctanh_stable(rho):
    # arctanh(x) = 0.5 log1p(2x / (1 - x)); 1 - x is exact enough here since
    # rho itself carries the rounding, the log1p form avoids the (1+x)/(1-x) ratio
    rho = np.asarray(rho, dtype=float)
    out = 0.5 * np.log1p(2.0 * rho / (1.0 - rho))
    return out if out.ndim else float(out)


def hyperbolic(z, w):
    """Hyperbolic distance arctanh(rho(z, w))."""
    return _arctanh_stable(pseudo_hyperbolic(z, w))


def is_r_separated(points, R) -> bool:
    """True iff every pair of distinct entries is more than ``R`` apart in rho."""
    SeparationParams(R)
    pts = as_disk(np.atleast_1d(np.asarray([complex(p) for p in points])))
    if pts.size == 0:
        raise ValueError("need at least one point")
    n = pts.size
    for i in range(n - 1):
        d = pseudo_hyperbolic(pts[i], pts[i + 1:])
        if np.any(d <= R):
            return False
    return True


def _angular_count(s, target_rho):
    # smallest n with rho(s, s e^{i pi/n}) <= target_rho
    if s == 0.0:
        return 1
    n = max(1, math.ceil(math.pi * s / (target_rho * (1.0 - s * s))))
    while True:
        half = math.pi / n
        e = complex(math.cos(half), math.sin(half))
        d = abs(s - s * e) / abs(1.0 - s * s * e)
        if d <= target_rho:
            return n
        n = math.ceil(n * 1.1) + 1


def hyperbolic_lattice(r_max: float, step: float) -> np.ndarray:
    """Points covering {|z| <= r_max} at pseudohyperbolic resolution ``step``.

    Concentric circles are spaced ``arctanh(step)`` apart in hyperbolic
    distance; each circle carries enough points that neighbours are within
    0.9 * arctanh(step) / 2 of the midpoint arc.  Triangle inequality then
    puts every point of the closed disk within 0.95 * arctanh(step) of the
    lattice, i.e. strictly within ``step`` in rho.
    """
    if not 0.0 < r_max < 1.0:
        raise ValueError(f"r_max must lie in (0, 1), got {r_max}")
    if not 0.0 < step < 1.0:
        raise ValueError(f"step must lie in (0, 1), got {step}")
    D = math.atanh(step)
    u_max = math.atanh(r_max)
    target = math.tanh(0.45 * D)
    n_circles = math.ceil(u_max / D)
    pts = [np.zeros(1, dtype=complex)]
    for j in range(1, n_circles + 1):
        u = min(j * D, u_max)
        s = math.tanh(u)
        n = _angular_count(s, target)
        offset = 0.5 * (j % 2) * 2 * math.pi / n
        theta = offset + 2 * math.pi * np.arange(n) / n
        pts.append(s * np.exp(1j * theta))
    return np.concatenate(pts)


def polar_grid(r_max: float, radial_step: float, quality: float, max_angular: int = 1 << 16):
    """Polar grid refined toward the boundary.

    Radii are uniform in hyperbolic radius ``arctanh(r)`` with spacing
    ``radial_step``; the circle of radius r carries ceil(2 pi / ((1 - r) quality))
    equally spaced angles starting at 0 (capped at ``max_angular``).
    Returns (points, radii, counts); points are ordered by (radius, angle).
    """
    if not 0.0 < r_max < 1.0:
        raise ValueError(f"r_max must lie in (0, 1), got {r_max}")
    if radial_step <= 0 or quality <= 0:
        raise ValueError("radial_step and quality must be positive")
    u_max = math.atanh(r_max)
    m = max(1, math.ceil(u_max / radial_step))
    radii = np.tanh(np.linspace(0.0, u_max, m + 1))
    counts = [1] + [circle_count(r, quality, max_angular) for r in radii[1:]]
    pts = [r * np.exp(2j * np.pi * np.arange(n) / n) for r, n in zip(radii, counts)]
    return np.concatenate(pts), radii, np.asarray(counts)


def circle_count(r: float, quality: float, max_angular: int = 1 << 16) -> int:
    """Angular sample count ceil(2 pi / ((1 - r) q)), at least 8."""
    return int(min(max_angular, max(8, math.ceil(2 * math.pi / ((1.0 - r) * quality)))))
