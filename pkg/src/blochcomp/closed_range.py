"""Level sets Omega_c = {tau >= c}, their images G_c = phi(Omega_c), r-net
coverage, annulus containment via Newton preimages, and sampling-constant
and bounded-below estimates over finite test families."""

from __future__ import annotations

import functools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .adaptive import DEFAULT_BUDGET, Budget, Status
from .bloch_norms import _alpha, _intensity, norm, seminorm
from .comp_operator import Answer, TauParams, _tau, classify, pullback, tau_sup
from .disk_geometry import hyperbolic_lattice, one_minus_abs2, polar_grid
from .function_model import HarmonicMap, extremal_pair, monomial

log = logging.getLogger(__name__)


def worker_count() -> int:
    """Thread cap from BLOCHCOMP_THREADS (0 or unset: library default)."""
    try:
        n = int(os.environ.get("BLOCHCOMP_THREADS", "0"))
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def _pmap(fn, items):
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


@dataclass(frozen=True)
class LevelSetSample:
    c: float
    z: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    grid: dict = field(default_factory=dict)

    def __len__(self):
        return int(self.z.size)


@dataclass(frozen=True)
class ImageSetSample:
    w: np.ndarray = field(repr=False)
    preimage: np.ndarray = field(repr=False)

    def __len__(self):
        return int(self.w.size)


@dataclass(frozen=True)
class NetCheckResult:
    r: float
    probes_total: int
    probes_covered: int
    worst_gap: float
    worst_probe: complex

    @property
    def covered(self) -> bool:
        return self.probes_covered == self.probes_total


def level_set_grid(budget: Budget = DEFAULT_BUDGET):
    r_max = 1.0 - 2.0**-budget.omega_k_max
    pts, _, _ = polar_grid(r_max, budget.omega_radial_step, budget.omega_quality, budget.max_angular)
    desc = {
        "r_max": r_max,
        "radial_step": budget.omega_radial_step,
        "quality": budget.omega_quality,
        "points": int(pts.size),
    }
    return pts, desc


def omega_sample(p: TauParams, c: float, budget: Budget = DEFAULT_BUDGET) -> LevelSetSample:
    """Grid points with tau >= c (possibly none)."""
    if not c > 0:
        raise ValueError(f"c must be positive, got {c}")
    z, desc = level_set_grid(budget)
    t = _tau(p, z)
    keep = t >= c
    return LevelSetSample(float(c), z[keep], t[keep], desc)


def g_sample(p: TauParams, omega: LevelSetSample) -> ImageSetSample:
    """phi applied to an Omega sample, preimages kept."""
    if len(omega) == 0:
        return ImageSetSample(np.zeros(0, complex), np.zeros(0, complex))
    return ImageSetSample(np.asarray(p.phi._eval(omega.z)), omega.z.copy())


def _hyperbolic_disk(p, t):
    # {w : rho(p, w) < t} is the Euclidean disk with this centre and radius
    q = 1.0 - t * t * np.abs(p) ** 2
    return p * (1.0 - t * t) / q, t * one_minus_abs2(p) / q


def nearest_rho(points, probes) -> np.ndarray:
    """min_w rho(probe, w) for each probe, exact.

    A Euclidean nearest neighbour gives an upper bound t0 on the answer; the
    true pseudohyperbolic nearest point then lies in the Euclidean disk that
    represents the rho-ball of radius t0, which a KD-tree query returns.
    """
    points = np.asarray(points, dtype=complex).ravel()
    probes = np.asarray(probes, dtype=complex).ravel()
    if points.size == 0:
        return np.ones(probes.size)
    xy = np.column_stack([points.real, points.imag])
    tree = cKDTree(xy)
    _, j = tree.query(np.column_stack([probes.real, probes.imag]))
    t0 = np.abs((probes - points[j]) / (1.0 - np.conj(probes) * points[j]))
    centre, radius = _hyperbolic_disk(probes, np.minimum(t0, 1.0 - 1e-16))
    cand = tree.query_ball_point(np.column_stack([centre.real, centre.imag]), radius * (1 + 1e-9) + 1e-15)
    out = t0.copy()
    for i, idx in enumerate(cand):
        if len(idx) > 1:
            w = points[idx]
            out[i] = min(out[i], float(np.min(np.abs((probes[i] - w) / (1.0 - np.conj(probes[i]) * w)))))
    return out


def default_probes(budget: Budget = DEFAULT_BUDGET) -> np.ndarray:
    return hyperbolic_lattice(1.0 - 2.0**-budget.omega_k_max, 0.5)


def net_check(g: ImageSetSample | np.ndarray, r: float, probes=None, budget: Budget = DEFAULT_BUDGET) -> NetCheckResult:
    """Is every probe within pseudohyperbolic distance r of the G sample?

    An empty sample covers nothing; its gaps are reported as 1.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    probes = default_probes(budget) if probes is None else np.atleast_1d(np.asarray(probes, dtype=complex))
    if probes.size == 0:
        raise ValueError("need at least one probe")
    w = g.w if isinstance(g, ImageSetSample) else np.asarray(g, dtype=complex)
    if w.size == 0:
        return NetCheckResult(float(r), int(probes.size), 0, 1.0, complex(probes[0]))
    gaps = nearest_rho(w, probes)
    i = int(np.argmax(gaps))
    return NetCheckResult(float(r), int(probes.size), int(np.sum(gaps < r)), float(gaps[i]), complex(probes[i]))


class Containment(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class AnnulusResult:
    verdict: Containment
    r0: float
    r_max: float
    probes: int
    accepted: int
    failures: tuple = ()
    unresolved: tuple = ()


def _newton(phi, w, seeds, max_iter=80, max_halvings=40, tol=1e-12):
    """Damped Newton for phi(z) = w, vectorised over (target, seed) pairs.

    Returns (z, residual, state) with state 0 = root, 1 = pushed to the
    boundary, 2 = stalled.
    """
    z = seeds.copy()
    res = phi._eval(z) - w
    scale = np.maximum(1.0, np.abs(w))
    pinned = np.zeros(z.shape, bool)
    for _ in range(max_iter):
        active = (np.abs(res) > tol * scale) & ~pinned
        if not active.any():
            break
        za, ra, wa = z[active], res[active], w[active]
        with np.errstate(divide="ignore", invalid="ignore"):
            step = ra / phi._deriv(za)
        lam = np.ones(za.shape)
        znew, rnew = za.copy(), ra.copy()
        todo = np.ones(za.shape, bool)
        for _ in range(max_halvings):
            with np.errstate(invalid="ignore"):
                cand = za[todo] - lam[todo] * step[todo]
            inside = np.abs(cand) < 1.0 - 1e-13
            rc = np.full(cand.shape, np.inf, dtype=complex)
            if inside.any():
                rc[inside] = phi._eval(cand[inside]) - wa[todo][inside]
            ok = np.isfinite(rc) & (np.abs(rc) < np.abs(ra[todo]))
            t_idx = np.flatnonzero(todo)
            znew[t_idx[ok]], rnew[t_idx[ok]] = cand[ok], rc[ok]
            todo[t_idx[ok]] = False
            lam[todo] *= 0.5
            if not todo.any():
                break
        a_idx = np.flatnonzero(active)
        z[a_idx], res[a_idx] = znew, rnew
        pinned[a_idx[todo]] = True
        pinned |= np.abs(z) > 1.0 - 1e-7
    root = np.abs(res) <= tol * scale
    state = np.where(root, 0, np.where(np.abs(z) > 1.0 - 1e-6, 1, 2))
    return z, res, state


def annulus_check(
    p: TauParams,
    c: float,
    r0: float,
    probes_per_ring: int = 16,
    rings: int = 6,
    r_max: float = 0.99,
    seeds: int = 8,
    max_iter: int = 80,
) -> AnnulusResult:
    """Does G_c contain the annulus r0 < |w| <= r_max (probed on rings)?

    For each target w, damped Newton runs from ``seeds`` starts on the circle
    of radius |w|^(1/deg) at angles arg(w)/deg + j*2pi/seeds.  A target is
    accepted when some root z has tau(z) >= c.  It counts against
    containment when roots were found but all have tau < c, or when every
    seed was driven to the boundary (no preimage in D).
    """
    if not 0.0 < r0 < 1.0:
        raise ValueError(f"r0 must lie in (0, 1), got {r0}")
    if not r0 < r_max < 1.0:
        raise ValueError("need r0 < r_max < 1")
    radii = r0 + (r_max - r0) * np.arange(1, rings + 1) / rings
    ang = 2 * np.pi * np.arange(probes_per_ring) / probes_per_ring
    targets = (radii[:, None] * np.exp(1j * ang)[None, :]).ravel()
    deg = p.phi.degree() or 1
    sr = np.abs(targets) ** (1.0 / deg)
    sa = np.angle(targets) / deg
    offsets = 2 * np.pi * np.arange(seeds) / seeds
    z0 = (sr[:, None] * np.exp(1j * (sa[:, None] + offsets[None, :]))).ravel()
    wt = np.repeat(targets, seeds)
    z, _, state = _newton(p.phi, wt, z0, max_iter=max_iter)
    z, state = z.reshape(-1, seeds), state.reshape(-1, seeds)

    accepted, failures, unresolved = 0, [], []
    for i, w in enumerate(targets):
        roots = z[i][state[i] == 0]
        if roots.size:
            t = _tau(p, roots)
            if np.any(t >= c):
                accepted += 1
                continue
            failures.append((complex(w), "preimages below c", float(t.max())))
        elif np.all(state[i] == 1):
            failures.append((complex(w), "no preimage in D", math.nan))
        else:
            unresolved.append(complex(w))
    if failures:
        verdict = Containment.FAILS
    elif unresolved:
        verdict = Containment.INCONCLUSIVE
    else:
        verdict = Containment.HOLDS
    return AnnulusResult(verdict, float(r0), float(r_max), int(targets.size), accepted, tuple(failures), tuple(unresolved))


@functools.lru_cache(maxsize=4096)
def _member_seminorm(f: HarmonicMap, alpha: float, budget: Budget):
    return seminorm(f, alpha, budget)


def default_family(alpha, lattice_r_max: float = 0.95, step: float = 0.8, max_power: int = 8):
    """Extremal pairs phi_a + conj(phi_a) over a hyperbolic a-lattice, plus z^n."""
    a = _alpha(alpha)
    fam = [(f"extremal a={complex(pt):.4g}", extremal_pair(complex(pt), a)) for pt in hyperbolic_lattice(lattice_r_max, step)]
    fam += [(f"z^{n}", HarmonicMap(monomial(n))) for n in range(1, max_power + 1)]
    return fam


def _labelled(family):
    out = []
    for i, item in enumerate(family):
        if isinstance(item, HarmonicMap):
            out.append((f"member {i}", item))
        else:
            out.append(tuple(item))
    if not out:
        raise ValueError("test family is empty")
    return out


@dataclass(frozen=True)
class SamplingEstimate:
    S_est: float
    minimizer: str
    family_size: int
    skipped: tuple = ()


def sampling_constant_estimate(g: ImageSetSample, alpha, family, budget: Budget = DEFAULT_BUDGET) -> SamplingEstimate:
    """min over the family of sup_G(intensity) / seminorm.

    Members with zero (or non-converged) seminorm are skipped with a warning.
    The result bounds the true sampling constant from above.
    """
    a = _alpha(alpha)
    fam = _labelled(family)
    w = g.w if isinstance(g, ImageSetSample) else np.asarray(g, dtype=complex)

    def one(item):
        label, f = item
        est = _member_seminorm(f, a, budget)
        if est.status is not Status.CONVERGED or est.value <= 0:
            return label, None, est
        on_g = float(np.max(_intensity(f, a, w))) if w.size else 0.0
        return label, on_g / est.value, est

    best, arg, skipped = math.inf, "", []
    for label, ratio, est in _pmap(one, fam):
        if ratio is None:
            log.warning("skipping %s: seminorm %.3g (%s)", label, est.value, est.status.value)
            skipped.append(label)
        elif ratio < best:
            best, arg = ratio, label
    return SamplingEstimate(float(best), arg, len(fam), tuple(skipped))


@dataclass(frozen=True)
class BoundedBelowEstimate:
    eps_est: float
    minimizer: str
    K: float
    family_size: int
    skipped: tuple = ()


def bounded_below_estimate(p: TauParams, family, budget: Budget = DEFAULT_BUDGET, K: float | None = None) -> BoundedBelowEstimate:
    """min over the family of ||C_phi f|| / ||f|| (an upper bound on the
    operator's lower bound).  ``K`` is the tau supremum carried alongside."""
    fam = _labelled(family)
    if K is None:
        K = tau_sup(p, budget).value

    def one(item):
        label, f = item
        ef = _member_seminorm(f, p.alpha, budget)
        nf = abs(complex(f(0.0))) + ef.value
        if ef.status is not Status.CONVERGED or nf <= 0:
            return label, None
        nc, ec = norm(pullback(p.phi, f), p.alpha, budget)
        if ec.status is not Status.CONVERGED:
            return label, None
        return label, nc / nf

    best, arg, skipped = math.inf, "", []
    for label, ratio in _pmap(one, fam):
        if ratio is None:
            log.warning("skipping %s: norm not converged or zero", label)
            skipped.append(label)
        elif ratio < best:
            best, arg = ratio, label
    return BoundedBelowEstimate(float(best), arg, float(K), len(fam), tuple(skipped))


class Evidence(str, Enum):
    FOR = "EvidenceFor"
    AGAINST = "EvidenceAgainst"
    INCONCLUSIVE = "Inconclusive"


class NotBounded(ValueError):
    """Closed-range analysis presupposes a bounded operator."""


@dataclass(frozen=True)
class LevelReport:
    c: float
    omega: LevelSetSample
    g: ImageSetSample
    net_r: float
    net: NetCheckResult
    annulus: tuple
    sampling: SamplingEstimate | None


@dataclass(frozen=True)
class ClosedRangeReport:
    verdict: Evidence
    K: float
    bounded_below: BoundedBelowEstimate
    levels: tuple
    eps_threshold: float


DEFAULT_R0_SWEEP = (0.2, 0.45, 0.7, 0.9)


def net_radius(eps: float, K: float, alpha: float) -> float:
    """sqrt(1 - (eps / 2K)^(1/alpha)) clamped to [0.1, 0.99]."""
    x = min(1.0, max(0.0, eps / (2.0 * K))) ** (1.0 / alpha)
    return float(min(0.99, max(0.1, math.sqrt(max(0.0, 1.0 - x)))))


def closed_range_report(
    p: TauParams,
    c_grid: Sequence[float],
    budget: Budget = DEFAULT_BUDGET,
    family=None,
    r0_sweep: Sequence[float] = DEFAULT_R0_SWEEP,
    eps_threshold: float = 0.1,
    r: float | None = None,
    with_sampling: bool = True,
) -> ClosedRangeReport:
    """Evidence for / against closed range of C_phi on HB(alpha).

    For each c: Omega_c and G_c samples, an r-net check, annulus containment
    over ``r0_sweep`` and (optionally) a sampling-constant estimate.  The net
    radius defaults to sqrt(1 - (eps / 2K)^(1/alpha)) with eps the measured
    bounded-below estimate (2c when that is unavailable).

    EvidenceFor: some c has an annulus that Holds.  EvidenceAgainst: the
    bounded-below estimate is under ``eps_threshold`` and every net check
    fails.  Otherwise Inconclusive.
    """
    if not c_grid:
        raise ValueError("c_grid is empty")
    bounded = classify(p, budget).verdicts["bounded_HB_to_HB"]
    if bounded is Answer.NO:
        raise NotBounded("C_phi is not bounded on HB(alpha); closed range is not analysed")
    K_est = tau_sup(p, budget)
    K = K_est.value
    fam = default_family(p.alpha) if family is None else family
    bb = bounded_below_estimate(p, fam, budget, K=K)

    levels = []
    for c in c_grid:
        om = omega_sample(p, c, budget)
        gs = g_sample(p, om)
        eps = bb.eps_est if math.isfinite(bb.eps_est) and bb.eps_est > 0 else 2.0 * c
        nr = net_radius(eps, K, p.alpha) if r is None else float(r)
        net = net_check(gs, nr, budget=budget)
        ann = tuple(annulus_check(p, c, r0) for r0 in r0_sweep)
        samp = sampling_constant_estimate(gs, p.alpha, fam, budget) if with_sampling and len(gs) else None
        levels.append(LevelReport(float(c), om, gs, nr, net, ann, samp))

    if any(a.verdict is Containment.HOLDS for lv in levels for a in lv.annulus):
        verdict = Evidence.FOR
    elif bb.eps_est < eps_threshold and all(not lv.net.covered for lv in levels):
        verdict = Evidence.AGAINST
    else:
        verdict = Evidence.INCONCLUSIVE
    return ClosedRangeReport(verdict, float(K), bb, tuple(levels), eps_threshold)
