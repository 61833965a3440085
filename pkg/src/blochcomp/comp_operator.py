"""The weight tau_{phi,alpha}, its supremum and boundary behaviour, the
pullback f -> f o phi, and the boundedness / compactness decision table."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .adaptive import (
    DEFAULT_BUDGET,
    Budget,
    Decay,
    DecayProfile,
    Status,
    SupEstimate,
    circle_profile,
    decay_verdict,
    default_profile_radii,
    sup_over_disk,
)
from .bloch_norms import _alpha, little_bloch_profile
from .disk_geometry import DomainError, as_disk, circle_count, one_minus_abs2
from .function_model import (
    AnalyticMap,
    Compose,
    HarmonicMap,
    SelfMapVerdict,
    Verdict,
    validate_self_map,
)


class NotASelfMap(DomainError):
    """phi was found to leave the disk."""


@dataclass(frozen=True)
class TauParams:
    phi: AnalyticMap
    alpha: float = 1.0
    screen: SelfMapVerdict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _alpha(self.alpha))
        if self.screen is None:
            object.__setattr__(self, "screen", validate_self_map(self.phi))
        if self.screen.verdict is Verdict.VIOLATED:
            w = self.screen.witness
            raise NotASelfMap(
                f"phi is not a self-map of the disk: |phi({w:.6g})| = {self.screen.max_modulus_seen:.6g}",
                witness=w,
            )


def _tau(p: TauParams, z: np.ndarray) -> np.ndarray:
    w = p.phi._eval(z)
    aw = np.abs(w)
    bad = ~(aw < 1.0)
    if np.any(bad):
        i = np.flatnonzero(np.ravel(bad))[0]
        zi = complex(np.ravel(z)[i])
        raise DomainError(f"|phi({zi})| = {float(np.ravel(aw)[i])} >= 1", witness=zi)
    a = p.alpha
    return (one_minus_abs2(z) / ((1.0 - aw) * (1.0 + aw))) ** a * np.abs(p.phi._deriv(z))


def tau(p: TauParams, z):
    """(1 - |z|^2)^alpha |phi'(z)| / (1 - |phi(z)|^2)^alpha."""
    z = as_disk(z)
    out = _tau(p, np.asarray(z, dtype=complex))
    return out if np.ndim(out) else float(out)


def tau_sup(p: TauParams, budget: Budget = DEFAULT_BUDGET) -> SupEstimate:
    return sup_over_disk(lambda z: _tau(p, z), budget)


def boundary_profile_by_base(p: TauParams, radii=None, budget: Budget = DEFAULT_BUDGET) -> DecayProfile:
    """Circle maxima of tau as |z| -> 1."""
    radii = default_profile_radii(budget.profile_k_max) if radii is None else radii
    return circle_profile(lambda z: _tau(p, z), radii, budget)


def default_deltas(budget: Budget = DEFAULT_BUDGET) -> list:
    return [2.0**-j for j in range(1, max(2, budget.profile_k_max - 1))]


def boundary_profile_by_image(p: TauParams, deltas=None, budget: Budget = DEFAULT_BUDGET) -> DecayProfile:
    """sup of tau over sampled {z : |phi(z)| > 1 - delta} for decreasing delta.

    The region is sampled by filtering the circle grids |z| = 1 - 2^-k
    (k <= profile_k_max) rather than by inverting phi.  When the region is
    empty for the smallest delta and the circle maxima of |phi| have settled
    well inside the disk, phi(D) is relatively compact and the limit
    condition holds vacuously: DecaysToZero with ``vacuous=True``.
    The ``radii`` field of the result carries 1 - delta.
    """
    deltas = default_deltas(budget) if deltas is None else [float(d) for d in deltas]
    if not deltas or any(not 0 < d < 1 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing in (0, 1)")
    zs, taus, mods, circle_mod = [], [], [], []
    for r in default_profile_radii(budget.profile_k_max):
        n = circle_count(r, budget.profile_quality, budget.max_angular)
        z = r * np.exp(2j * np.pi * np.arange(n) / n)
        m = np.abs(p.phi._eval(z))
        zs.append(z)
        mods.append(m)
        taus.append(_tau(p, z))
        circle_mod.append(float(m.max()))
    z, t, m = np.concatenate(zs), np.concatenate(taus), np.concatenate(mods)

    values, witnesses, empty = [], [], []
    for d in deltas:
        mask = m > 1.0 - d
        if mask.any():
            i = np.flatnonzero(mask)[int(np.argmax(t[mask]))]
            values.append(float(t[i]))
            witnesses.append(complex(z[i]))
            empty.append(False)
        else:
            values.append(0.0)
            witnesses.append(None)
            empty.append(True)

    radii = tuple(1.0 - d for d in deltas)
    if empty[-1]:
        gap = 1.0 - circle_mod[-1]
        settled = len(circle_mod) >= 2 and circle_mod[-1] - circle_mod[-2] <= 0.01 * gap
        if settled and gap > deltas[-1]:
            return DecayProfile(radii, tuple(values), Decay.DECAYS_TO_ZERO, tuple(witnesses), vacuous=True)
        return DecayProfile(radii, tuple(values), Decay.INCONCLUSIVE, tuple(witnesses))
    return DecayProfile(radii, tuple(values), decay_verdict(values, budget), tuple(witnesses))


def pullback(phi: AnalyticMap, f: HarmonicMap) -> HarmonicMap:
    """C_phi f = f o phi = (h o phi) + conj(g o phi)."""
    return HarmonicMap(Compose(f.h, phi), Compose(f.g, phi))


class Answer(str, Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


CRITERIA = (
    "bounded_HB_to_HB",
    "bounded_HB0_to_HB",
    "bounded_HB_to_HB0",
    "bounded_HB0_to_HB0",
    "compact_HB_to_HB",
    "compact_HB0_variants",
)


@dataclass(frozen=True)
class ClassificationReport:
    tau_sup: SupEstimate
    boundary_limit_by_base: DecayProfile
    boundary_limit_by_image: DecayProfile
    phi_little_bloch: DecayProfile
    verdicts: dict

    def definite(self) -> bool:
        return any(v is not Answer.INCONCLUSIVE for v in self.verdicts.values())


def _from_status(s: Status) -> Answer:
    return {Status.CONVERGED: Answer.YES, Status.DIVERGING: Answer.NO}.get(s, Answer.INCONCLUSIVE)


def _from_decay(d: Decay) -> Answer:
    if d is Decay.DECAYS_TO_ZERO:
        return Answer.YES
    if d in (Decay.STABILIZES, Decay.GROWS):
        return Answer.NO
    return Answer.INCONCLUSIVE


def _both(a: Answer, b: Answer) -> Answer:
    if Answer.INCONCLUSIVE in (a, b):
        return Answer.INCONCLUSIVE
    return Answer.YES if a is b is Answer.YES else Answer.NO


def decide(tau_est: SupEstimate, base: DecayProfile, image: DecayProfile, phi_profile: DecayProfile) -> dict:
    t = _from_status(tau_est.status)
    b = _from_decay(base.verdict)
    return {
        "bounded_HB_to_HB": t,
        "bounded_HB0_to_HB": t,
        "bounded_HB_to_HB0": b,
        "bounded_HB0_to_HB0": _both(_from_decay(phi_profile.verdict), t),
        "compact_HB_to_HB": _both(_from_decay(image.verdict), t),
        "compact_HB0_variants": b,
    }


def classify(p: TauParams, budget: Budget = DEFAULT_BUDGET) -> ClassificationReport:
    est = tau_sup(p, budget)
    base = boundary_profile_by_base(p, budget=budget)
    image = boundary_profile_by_image(p, budget=budget)
    phi_profile = little_bloch_profile(HarmonicMap(p.phi), p.alpha, budget=budget)
    return ClassificationReport(est, base, image, phi_profile, decide(est, base, image, phi_profile))
