"""Adaptive supremum search over the unit disk and boundary-decay profiles.

The disk is swept in dyadic annuli r_{k-1} <= |z| <= r_k, r_k = 1 - 2^-k.
Each annulus gets a polar grid whose angular count grows like 1/(1 - r_k);
the best cells are then polished by a shrinking pattern search in
(hyperbolic radius, angle) followed by a bounded golden-section search in
radius.  The running maximum after each annulus forms the trace from
which the status is read.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .disk_geometry import circle_count


class Status(str, Enum):
    CONVERGED = "Converged"
    DIVERGING = "Diverging"
    INCONCLUSIVE = "Inconclusive"


class Decay(str, Enum):
    DECAYS_TO_ZERO = "DecaysToZero"
    STABILIZES = "Stabilizes"
    GROWS = "Grows"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Budget:
    """Refinement parameters shared by every search in the package."""

    k_max: int = 20
    min_levels: int = 8
    quality: float = 0.25
    radial_subdiv: int = 4
    max_angular: int = 1 << 16
    rel_tol: float = 1e-4
    growth_factor: float = 1.5
    top_cells: int = 16
    refine_rounds: int = 12
    max_points: int = 4_000_000
    # boundary profiles
    profile_k_max: int = 14
    profile_quality: float = 1.0
    decay_tol: float = 1e-3
    stable_tol: float = 0.02
    # level-set grids
    omega_k_max: int = 9
    omega_radial_step: float = 0.005
    omega_quality: float = 1.0

    def with_overrides(self, **kw) -> "Budget":
        known = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **known)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class SupEstimate:
    value: float
    status: Status
    witness: complex
    trace: tuple = ()
    evaluations: int = 0
    extrapolated: float = math.nan


@dataclass(frozen=True)
class DecayProfile:
    radii: tuple
    values: tuple
    verdict: Decay
    witnesses: tuple = field(default=(), repr=False)
    vacuous: bool = False


def _safe(values):
    values = np.asarray(values, dtype=float)
    return np.where(np.isnan(values), -np.inf, values)


def _polish(func, u, theta, du, dtheta, u_cap, rounds, golden=2):
    """Pattern search on (u, theta) for a batch of start points, then a
    golden-section pass in radius at the final angle for the best ``golden``."""
    offs = np.array([-1.0, 0.0, 1.0])
    ou, ot = np.meshgrid(offs, offs, indexing="ij")
    ou, ot = ou.ravel(), ot.ravel()
    evaluations = 0
    for _ in range(rounds):
        uu = np.clip(u[:, None] + ou[None, :] * du[:, None], 0.0, u_cap)
        tt = theta[:, None] + ot[None, :] * dtheta[:, None]
        vals = _safe(func((np.tanh(uu) * np.exp(1j * tt)).ravel())).reshape(uu.shape)
        evaluations += vals.size
        j = np.argmax(vals, axis=1)
        rows = np.arange(u.size)
        u, theta = uu[rows, j], tt[rows, j]
        du, dtheta = du / 2, dtheta / 2
    best_v = _safe(func(np.tanh(u) * np.exp(1j * theta)))
    evaluations += u.size
    best_u = u.copy()
    for i in np.argsort(-best_v, kind="stable")[:golden]:
        lo, hi = max(0.0, u[i] - 4 * du[i]), min(u_cap, u[i] + 4 * du[i])
        if hi <= lo:
            continue
        e = np.exp(1j * theta[i])

        def neg(s, e=e):
            return -float(_safe(func(np.array([math.tanh(s) * e])))[0])

        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        evaluations += res.nfev
        if -res.fun > best_v[i]:
            best_u[i], best_v[i] = res.x, -res.fun
    z = np.tanh(best_u) * np.exp(1j * theta)
    return z, best_v, evaluations


def _aitken(a, b, c):
    d = (c - b) - (b - a)
    if d == 0 or not np.isfinite(d):
        return c
    return c - (c - b) ** 2 / d


def sup_over_disk(func: Callable[[np.ndarray], np.ndarray], budget: Budget = DEFAULT_BUDGET) -> SupEstimate:
    """Estimate sup_{z in D} func(z) for a vectorised nonnegative ``func``.

    Converged: at least ``min_levels`` annuli swept and the last three running
    maxima agree within ``rel_tol`` of their max.  Diverging: the sweep ended
    (level cap or point budget) with the running maximum growing by more than
    ``growth_factor`` on each of the last two levels.  Anything else is
    Inconclusive.
    """
    best, witness = -math.inf, 0j
    trace = []
    evaluations = 0
    converged = False
    m = budget.radial_subdiv
    for k in range(1, budget.k_max + 1):
        r_lo, r_hi = 1.0 - 2.0 ** -(k - 1), 1.0 - 2.0**-k
        u_lo, u_hi = math.atanh(r_lo), math.atanh(r_hi)
        us = u_lo + (u_hi - u_lo) * np.arange(1, m + 1) / m
        n = circle_count(r_hi, budget.quality, budget.max_angular)
        thetas = 2 * np.pi * np.arange(n) / n
        z = (np.tanh(us)[:, None] * np.exp(1j * thetas)[None, :]).ravel()
        if k == 1:
            z = np.concatenate([[0j], z])
        vals = _safe(func(z))
        evaluations += vals.size

        top = min(budget.top_cells, vals.size)
        idx = np.argpartition(-vals, top - 1)[:top]
        idx = idx[np.argsort(-vals[idx], kind="stable")]
        zc = z[idx]
        pz, pv, ne = _polish(
            func,
            np.arctanh(np.abs(zc)),
            np.angle(zc),
            np.full(top, (u_hi - u_lo) / m),
            np.full(top, 2 * np.pi / n),
            u_hi,
            budget.refine_rounds,
        )
        evaluations += ne
        i = int(np.argmax(vals))
        level_best, level_z = float(vals[i]), complex(z[i])
        j = int(np.argmax(pv))
        if pv[j] > level_best:
            level_best, level_z = float(pv[j]), complex(pz[j])
        if level_best > best:
            best, witness = level_best, level_z
        trace.append((r_hi, best))

        if k >= max(3, budget.min_levels):
            last = [t[1] for t in trace[-3:]]
            top_v = max(last)
            if not np.isfinite(top_v):
                break
            if top_v == 0 or (top_v - min(last)) <= budget.rel_tol * top_v:
                converged = True
                break
        if evaluations >= budget.max_points:
            break

    vals = [t[1] for t in trace]
    extrap = _aitken(*vals[-3:]) if len(vals) >= 3 else math.nan
    if converged:
        status = Status.CONVERGED
    elif len(vals) >= 3 and all(
        vals[-i - 1] > 0 and vals[-i] > budget.growth_factor * vals[-i - 1] for i in (1, 2)
    ):
        status = Status.DIVERGING
    elif len(vals) >= 3 and not np.isfinite(vals[-1]):
        status = Status.DIVERGING
    else:
        status = Status.INCONCLUSIVE
    return SupEstimate(float(best), status, witness, tuple(trace), evaluations, float(extrap))


def circle_max(func, r: float, quality: float, max_angular: int = 1 << 16, polish: int = 4):
    """Max of ``func`` on the circle |z| = r: uniform angles plus a bounded
    golden-section polish in angle around the best ``polish`` samples."""
    n = circle_count(r, quality, max_angular)
    theta = 2 * np.pi * np.arange(n) / n
    vals = _safe(func(r * np.exp(1j * theta)))
    i = int(np.argmax(vals))
    best, arg = float(vals[i]), float(theta[i])
    if polish and n > 1 and np.isfinite(best):
        k = min(polish, n)
        idx = np.argpartition(-vals, k - 1)[:k]
        h = 2 * np.pi / n
        for j in sorted(idx):
            t0 = float(theta[j])

            def neg(t):
                return -float(_safe(func(np.array([r * np.exp(1j * t)])))[0])

            res = minimize_scalar(neg, bounds=(t0 - h, t0 + h), method="bounded", options={"xatol": 1e-12})
            if -res.fun > best:
                best, arg = float(-res.fun), float(res.x)
    return best, complex(r * np.exp(1j * arg))


def default_profile_radii(k_max: int) -> list:
    return [1.0 - 2.0**-k for k in range(1, k_max + 1)]


def decay_verdict(values, budget: Budget = DEFAULT_BUDGET) -> Decay:
    """Classify the tail of a boundary profile.

    DecaysToZero: tail non-increasing and either the last value is below
    ``decay_tol`` or the last four values shrink by at least 25% per step.
    Grows: the last two steps each grow by more than ``growth_factor``.
    Stabilizes: the last three values stay within ``stable_tol`` of their max
    (which itself exceeds ``decay_tol``).
    """
    v = [float(x) for x in values]
    if len(v) < 3 or not all(np.isfinite(v[-3:])):
        if len(v) >= 2 and not np.isfinite(v[-1]):
            return Decay.GROWS
        return Decay.INCONCLUSIVE
    a, b, c = v[-3:]
    if max(a, b, c) == 0:
        return Decay.DECAYS_TO_ZERO
    slack = 1e-12 * max(a, b, c)
    if b <= a + slack and c <= b + slack:
        if c <= budget.decay_tol:
            return Decay.DECAYS_TO_ZERO
        if len(v) >= 4 and all(v[-i] <= 0.75 * v[-i - 1] for i in (1, 2, 3)):
            return Decay.DECAYS_TO_ZERO
    if a > 0 and b > budget.growth_factor * a and c > budget.growth_factor * b:
        return Decay.GROWS
    top = max(a, b, c)
    if top > budget.decay_tol and top - min(a, b, c) <= budget.stable_tol * top:
        return Decay.STABILIZES
    return Decay.INCONCLUSIVE


def circle_profile(func, radii, budget: Budget = DEFAULT_BUDGET) -> DecayProfile:
    radii = [float(r) for r in radii]
    if not radii or any(not 0 < r < 1 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("profile radii must be strictly increasing in (0, 1)")
    values, witnesses = [], []
    for r in radii:
        v, w = circle_max(func, r, budget.profile_quality, budget.max_angular)
        values.append(v)
        witnesses.append(w)
    return DecayProfile(tuple(radii), tuple(values), decay_verdict(values, budget), tuple(witnesses))
