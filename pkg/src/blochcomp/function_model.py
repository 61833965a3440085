"""Analytic maps as expression trees with exact derivatives, and harmonic
functions f = h + conj(g) built from them.

Every node evaluates vectorised over numpy complex arrays.  Derivatives are
structural (product and chain rules, closed forms for the leaves), never
finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .disk_geometry import DomainError, as_disk, circle_count, clog1p, one_minus_abs2


def _cx(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    return complex(value)


def _unit(value) -> complex:
    u = _cx(value)
    if abs(abs(u) - 1.0) > 1e-12:
        raise ValueError(f"rotation must be unimodular, got {u}")
    return u


def _scalar_or_array(out):
    out = np.asarray(out)
    return out if out.ndim else complex(out)


class AnalyticMap:
    """Base class for expression-tree nodes.

    Subclasses implement ``_eval`` and ``_deriv`` on complex arrays; points are
    assumed to be in the disk already.  ``requires_disk`` marks nodes whose
    formula is only meaningful (or only convergent) on D, which is what a
    ``Compose`` checks its inner values against.
    """

    requires_disk = True

    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _deriv(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, z):
        return eval_analytic(self, z)

    def deriv(self, z):
        return deriv_analytic(self, z)

    def degree(self):
        """Algebraic degree when the node is a finite Blaschke product or a
        polynomial (possibly composed/scaled), else None."""
        return None


@dataclass(frozen=True)
class Polynomial(AnalyticMap):
    coefficients: tuple

    requires_disk = False

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(_cx(c) for c in self.coefficients))
        if not self.coefficients:
            object.__setattr__(self, "coefficients", (0j,))

    def _eval(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def _deriv(self, z):
        c = np.asarray(self.coefficients)
        if c.size == 1:
            return np.zeros_like(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, c[1:] * np.arange(1, c.size))

    def degree(self):
        c = list(self.coefficients)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        return len(c) - 1


@dataclass(frozen=True)
class Moebius(AnalyticMap):
    """rotation * psi_a(z), psi_a(z) = (a - z) / (1 - conj(a) z)."""

    a: complex
    rotation: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a", as_disk(_cx(self.a)))
        object.__setattr__(self, "rotation", _unit(self.rotation))

    def _eval(self, z):
        a = self.a
        return self.rotation * (a - z) / (1.0 - np.conj(a) * z)

    def _deriv(self, z):
        a = self.a
        return -self.rotation * one_minus_abs2(a) / (1.0 - np.conj(a) * z) ** 2

    def degree(self):
        return 1


@dataclass(frozen=True)
class BlaschkeProduct(AnalyticMap):
    zeros: tuple
    rotation: complex = 1.0

    def __post_init__(self):
        zs = tuple(as_disk(_cx(a)) for a in self.zeros)
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "rotation", _unit(self.rotation))

    def _factors(self, z):
        a = np.asarray(self.zeros, dtype=complex).reshape((-1,) + (1,) * z.ndim)
        den = 1.0 - np.conj(a) * z
        return (a - z) / den, -one_minus_abs2(a) / den**2

    def _eval(self, z):
        if not self.zeros:
            return np.full_like(z, self.rotation, dtype=complex)
        f, _ = self._factors(z)
        return self.rotation * np.prod(f, axis=0)

    def _deriv(self, z):
        n = len(self.zeros)
        if n == 0:
            return np.zeros_like(z, dtype=complex)
        f, df = self._factors(z)
        ones = np.ones((1,) + z.shape, dtype=complex)
        # prefix[k] = prod_{j<k} f_j, suffix[k] = prod_{j>k} f_j
        prefix = np.cumprod(np.concatenate([ones, f[:-1]]), axis=0)
        suffix = np.cumprod(np.concatenate([ones, f[:0:-1]]), axis=0)[::-1]
        return self.rotation * np.sum(df * prefix * suffix, axis=0)

    def degree(self):
        return len(self.zeros)


@dataclass(frozen=True)
class PowerSeries(AnalyticMap):
    """Truncated power series sum_{n <= degree} c_n z^n.

    ``coefficient_bound`` (optional) declares |c_n| <= M for n > degree and
    enables :meth:`tail_bound`.
    """

    coefficients: tuple
    truncation: int = None
    coefficient_bound: float = None

    def __post_init__(self):
        cs = tuple(_cx(c) for c in self.coefficients)
        deg = len(cs) - 1 if self.truncation is None else int(self.truncation)
        if deg < 0:
            raise ValueError("truncation degree must be >= 0")
        object.__setattr__(self, "coefficients", cs[: deg + 1])
        object.__setattr__(self, "truncation", deg)

    def _eval(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def _deriv(self, z):
        c = np.asarray(self.coefficients)
        if c.size <= 1:
            return np.zeros_like(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, c[1:] * np.arange(1, c.size))

    def tail_bound(self, r: float) -> float:
        """Bound on |f(z) - truncation(z)| for |z| <= r (requires a coefficient bound)."""
        if self.coefficient_bound is None:
            return math.inf
        return self.coefficient_bound * r ** (self.truncation + 1) / (1.0 - r)


@dataclass(frozen=True)
class Scale(AnalyticMap):
    inner: AnalyticMap
    factor: complex

    def __post_init__(self):
        object.__setattr__(self, "factor", _cx(self.factor))

    @property
    def requires_disk(self):
        return self.inner.requires_disk

    def _eval(self, z):
        return self.factor * self.inner._eval(z)

    def _deriv(self, z):
        return self.factor * self.inner._deriv(z)

    def degree(self):
        return self.inner.degree()


@dataclass(frozen=True)
class Compose(AnalyticMap):
    """outer(inner(z))."""

    outer: AnalyticMap
    inner: AnalyticMap

    @property
    def requires_disk(self):
        return self.inner.requires_disk

    def _inner_values(self, z):
        w = self.inner._eval(z)
        if self.outer.requires_disk:
            bad = ~(np.abs(w) < 1.0)
            if np.any(bad):
                i = np.flatnonzero(bad.ravel())[0]
                zi = complex(np.asarray(z).ravel()[i]) if np.ndim(z) else complex(z)
                raise DomainError(
                    f"inner map sends {zi} to {complex(np.asarray(w).ravel()[i])}, outside the disk",
                    witness=zi,
                )
        return w

    def _eval(self, z):
        return self.outer._eval(self._inner_values(z))

    def _deriv(self, z):
        w = self._inner_values(z)
        return self.outer._deriv(w) * self.inner._deriv(z)

    def degree(self):
        a, b = self.outer.degree(), self.inner.degree()
        return None if a is None or b is None else a * b


@dataclass(frozen=True)
class Product(AnalyticMap):
    left: AnalyticMap
    right: AnalyticMap

    @property
    def requires_disk(self):
        return self.left.requires_disk or self.right.requires_disk

    def _eval(self, z):
        return self.left._eval(z) * self.right._eval(z)

    def _deriv(self, z):
        return self.left._deriv(z) * self.right._eval(z) + self.left._eval(z) * self.right._deriv(z)

    def degree(self):
        a, b = self.left.degree(), self.right.degree()
        return None if a is None or b is None else a + b


@dataclass(frozen=True)
class AffineCombo(AnalyticMap):
    """sum_k w_k m_k(z)."""

    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((_cx(w), m) for w, m in self.terms))
        if not self.terms:
            raise ValueError("affine combination needs at least one term")

    @property
    def requires_disk(self):
        return any(m.requires_disk for _, m in self.terms)

    def _eval(self, z):
        return sum(w * m._eval(z) for w, m in self.terms)

    def _deriv(self, z):
        return sum(w * m._deriv(z) for w, m in self.terms)

    def degree(self):
        degs = [m.degree() for _, m in self.terms]
        return None if any(d is None for d in degs) else max(degs)


def _power(base, exponent):
    # principal power of a base with positive real part
    return np.exp(exponent * clog1p(base - 1.0))


@dataclass(frozen=True)
class AntiderivativePower(AnalyticMap):
    """The primitive of (psi_a')^alpha that vanishes at 0.

    The power is taken as e^{i pi alpha} (1 - |a|^2)^alpha (1 - conj(a) z)^(-2 alpha)
    with the principal power of 1 - conj(a) z (whose real part is positive on
    D).  This branch is continuous on the whole disk and agrees with the
    principal power of psi_a' at a = 0.
    """

    a: complex
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "a", as_disk(_cx(self.a)))
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def _const(self):
        return np.exp(1j * math.pi * self.alpha) * one_minus_abs2(self.a) ** self.alpha

    def _deriv(self, z):
        ab = np.conj(self.a)
        return self._const * _power(1.0 - ab * z, -2.0 * self.alpha)

    def _eval(self, z):
        ab = np.conj(self.a)
        beta = 1.0 - 2.0 * self.alpha
        if abs(ab) < 1e-8:
            # three-term series in w = conj(a) z; the closed forms divide by conj(a)
            w = ab * z
            return self._const * z * (1 + (1 - beta) * w / 2 + (1 - beta) * (2 - beta) * w * w / 6)
        log1m = clog1p(-ab * z)
        if abs(beta) < 1e-14:
            return self._const * (-log1m / ab)
        # (1 - (1 - ab z)^beta) / (ab beta), via expm1 for small |a z|
        return self._const * (-np.expm1(beta * log1m)) / (ab * beta)


@dataclass(frozen=True)
class SingularPrimitive(AnalyticMap):
    """The primitive of (1 - conj(zeta) z)^(-alpha) vanishing at 0, |zeta| = 1.

    Its derivative blows up like (1 - |z|)^(-alpha) toward the boundary point
    zeta, which makes it the standard borderline member of HB(alpha).
    """

    zeta: complex
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "zeta", _unit(self.zeta))
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    def _deriv(self, z):
        return _power(1.0 - np.conj(self.zeta) * z, -self.alpha)

    def _eval(self, z):
        zb = np.conj(self.zeta)
        log1m = clog1p(-zb * z)
        beta = 1.0 - self.alpha
        if abs(beta) < 1e-14:
            return -log1m / zb
        return (-np.expm1(beta * log1m)) / (zb * beta)


def identity() -> Polynomial:
    return Polynomial((0, 1))


def constant(c) -> Polynomial:
    return Polynomial((c,))


def monomial(n: int, coefficient=1.0) -> Polynomial:
    return Polynomial((0,) * n + (coefficient,))


def eval_analytic(m: AnalyticMap, z):
    """Value of ``m`` at ``z`` (scalar or array in D)."""
    z = as_disk(z)
    return _scalar_or_array(m._eval(np.asarray(z, dtype=complex)))


def deriv_analytic(m: AnalyticMap, z):
    """Exact complex derivative of ``m`` at ``z``."""
    z = as_disk(z)
    return _scalar_or_array(m._deriv(np.asarray(z, dtype=complex)))


ZERO = Polynomial((0,))


@dataclass(frozen=True)
class HarmonicMap:
    """f = h + conj(g) with h, g analytic on D."""

    h: AnalyticMap = ZERO
    g: AnalyticMap = ZERO

    def __call__(self, z):
        return eval_harmonic(self, z)

    def scaled(self, c) -> "HarmonicMap":
        """c * f; for f = h + conj(g) this is (c h) + conj(conj(c) g)."""
        c = complex(c)
        return HarmonicMap(Scale(self.h, c), Scale(self.g, c.conjugate()))

    def __add__(self, other: "HarmonicMap") -> "HarmonicMap":
        return HarmonicMap(
            AffineCombo(((1, self.h), (1, other.h))), AffineCombo(((1, self.g), (1, other.g)))
        )


def eval_harmonic(f: HarmonicMap, z):
    z = as_disk(z)
    zz = np.asarray(z, dtype=complex)
    return _scalar_or_array(f.h._eval(zz) + np.conj(f.g._eval(zz)))


def wirtinger(f: HarmonicMap, z):
    """(f_z, f_zbar) = (h'(z), conj(g'(z)))."""
    z = as_disk(z)
    zz = np.asarray(z, dtype=complex)
    return _scalar_or_array(f.h._deriv(zz)), _scalar_or_array(np.conj(f.g._deriv(zz)))


def extremal_phi_a(a, alpha: float) -> AntiderivativePower:
    """phi_a with phi_a(0) = 0 and phi_a' = (psi_a')^alpha."""
    return AntiderivativePower(complex(a), alpha)


def extremal_pair(a, alpha: float) -> HarmonicMap:
    """phi_a + conj(phi_a); its HB(alpha) seminorm is exactly 2."""
    phi = extremal_phi_a(a, alpha)
    return HarmonicMap(phi, phi)


class Verdict(str, Enum):
    VERIFIED = "Verified"
    VIOLATED = "Violated"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SelfMapVerdict:
    verdict: Verdict
    max_modulus_seen: float
    witness: complex
    boundary_contact: bool = False
    circle_maxima: tuple = field(default=(), repr=False)


def default_screen_radii(k_max: int = 14) -> list:
    return [1.0 - 2.0**-k for k in range(1, k_max + 1)]


def validate_self_map(
    m: AnalyticMap,
    radii: Sequence[float] | None = None,
    angular_count: int | None = None,
    margin: float = 1e-3,
    quality: float = 1.0,
) -> SelfMapVerdict:
    """Maximum-modulus screening of phi(D) in D on the circles |z| = r_k.

    Any sample with |m(z)| >= 1 is a violation.  Otherwise the map is
    Verified unless the last two circle maxima extrapolate linearly past 1 at
    the boundary (Inconclusive).  Circle maxima above ``1 - margin`` set the
    boundary-contact flag.  ``angular_count`` fixes the samples per circle;
    by default it grows like 1/(1 - r).
    """
    radii = default_screen_radii() if radii is None else list(radii)
    if not radii or any(not 0 < r < 1 for r in radii) or any(
        b <= a for a, b in zip(radii, radii[1:])
    ):
        raise ValueError("radii must be strictly increasing in (0, 1)")
    maxima = []
    best, witness = -1.0, 0j
    for r in radii:
        n = angular_count or circle_count(r, quality)
        z = r * np.exp(2j * np.pi * np.arange(n) / n)
        try:
            w = np.abs(m._eval(z))
        except DomainError as exc:
            return SelfMapVerdict(Verdict.VIOLATED, math.inf, complex(exc.witness), False, tuple(maxima))
        w = np.where(np.isfinite(w), w, np.inf)
        i = int(np.argmax(w))
        maxima.append(float(w[i]))
        if w[i] > best:
            best, witness = float(w[i]), complex(z[i])
        if w[i] >= 1.0:
            return SelfMapVerdict(Verdict.VIOLATED, best, witness, False, tuple(maxima))
    contact = best > 1.0 - margin
    if len(radii) >= 2:
        r0, r1 = radii[-2], radii[-1]
        slope = (maxima[-1] - maxima[-2]) / (r1 - r0)
        if maxima[-1] + slope * (1.0 - r1) > 1.0 + margin:
            return SelfMapVerdict(Verdict.INCONCLUSIVE, best, witness, contact, tuple(maxima))
    return SelfMapVerdict(Verdict.VERIFIED, best, witness, contact, tuple(maxima))
