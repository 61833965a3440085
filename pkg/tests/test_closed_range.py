import math

import numpy as np
import pytest

from blochcomp.closed_range import (
    Containment,
    Evidence,
    ImageSetSample,
    NotBounded,
    annulus_check,
    bounded_below_estimate,
    closed_range_report,
    default_family,
    g_sample,
    nearest_rho,
    net_check,
    net_radius,
    omega_sample,
    sampling_constant_estimate,
)
from blochcomp.bloch_norms import seminorm
from blochcomp.comp_operator import TauParams, pullback
from blochcomp.function_model import HarmonicMap, Moebius, Polynomial, Scale, SingularPrimitive, extremal_pair, identity, monomial

from conftest import random_disk

# z^2 at alpha = 1: tau = 2r / (1 + r^2) >= c  <=>  r >= (1 - sqrt(1 - c^2)) / c
Z2_THRESHOLD = (1 - math.sqrt(1 - 0.81)) / 0.9


def test_omega_threshold_for_z_squared():
    p = TauParams(monomial(2))
    om = omega_sample(p, 0.9)
    assert len(om) > 0
    assert np.all(om.tau >= 0.9)
    assert np.min(np.abs(om.z)) == pytest.approx(Z2_THRESHOLD, abs=0.005)
    g = g_sample(p, om)
    assert np.min(np.abs(g.w)) == pytest.approx(Z2_THRESHOLD**2, abs=0.01)
    assert np.allclose(g.w, om.z**2)


def test_omega_examples():
    assert len(omega_sample(TauParams(identity()), 0.5)) == omega_sample(TauParams(identity()), 0.5).grid["points"]
    assert len(omega_sample(TauParams(Scale(identity(), 0.5)), 0.9)) == 0
    assert len(g_sample(TauParams(Scale(identity(), 0.5)), omega_sample(TauParams(Scale(identity(), 0.5)), 0.9))) == 0
    with pytest.raises(ValueError):
        omega_sample(TauParams(identity()), 0)


def test_nearest_rho_matches_brute_force(rng):
    pts = random_disk(rng, 3000, 0.999)
    probes = random_disk(rng, 500, 0.999)
    brute = np.min(np.abs((probes[:, None] - pts[None, :]) / (1 - np.conj(probes[:, None]) * pts[None, :])), axis=1)
    assert np.max(np.abs(nearest_rho(pts, probes) - brute)) < 1e-14


def test_net_check_examples(rng):
    probes = random_disk(rng, 200, 0.9)
    res = net_check(np.array([0j]), 0.5, probes)
    assert res.probes_covered == int(np.sum(np.abs(probes) < 0.5))
    assert res.worst_gap == pytest.approx(np.max(np.abs(probes)))
    res = net_check(probes, 0.01, probes)
    assert res.covered and res.worst_gap == 0
    empty = net_check(ImageSetSample(np.zeros(0, complex), np.zeros(0, complex)), 0.5, probes)
    assert empty.probes_covered == 0 and empty.worst_gap == 1.0 and not empty.covered
    with pytest.raises(ValueError):
        net_check(probes, 1.0, probes)


def test_net_check_monotone_in_r(rng):
    pts = random_disk(rng, 300, 0.95)
    probes = random_disk(rng, 1000, 0.99)
    counts = [net_check(pts, r, probes).probes_covered for r in (0.1, 0.3, 0.5, 0.7, 0.9)]
    assert counts == sorted(counts)


def test_identity_image_is_a_net():
    p = TauParams(identity())
    res = net_check(g_sample(p, omega_sample(p, 0.5)), 0.5)
    assert res.covered


def test_annulus_examples():
    assert annulus_check(TauParams(monomial(2)), 0.9, 0.45).verdict is Containment.HOLDS
    assert annulus_check(TauParams(identity()), 0.5, 0.2).verdict is Containment.HOLDS
    # preimages of |w| ~ 0.27 sit at |z| ~ 0.52 where tau ~ 0.83 < 0.9
    res = annulus_check(TauParams(monomial(2)), 0.9, 0.2)
    assert res.verdict is Containment.FAILS
    assert any(f[1] == "preimages below c" for f in res.failures)
    res = annulus_check(TauParams(Scale(identity(), 0.5)), 0.1, 0.2)
    assert res.verdict is Containment.FAILS
    assert any(f[1] == "no preimage in D" for f in res.failures)
    with pytest.raises(ValueError):
        annulus_check(TauParams(identity()), 0.5, 0.995)


def test_annulus_preimages_are_roots():
    # an automorphism has tau = 1, so every target with a preimage is accepted
    res = annulus_check(TauParams(Moebius(0.3)), 0.99, 0.5)
    assert res.verdict is Containment.HOLDS and res.accepted == res.probes


def test_sampling_constant_examples():
    g = np.array([0j])
    fam = [("ext", extremal_pair(0.9, 1.0)), ("z", HarmonicMap(identity()))]
    est = sampling_constant_estimate(g, 1.0, fam)
    # intensity at 0 is 2(1 - 0.81) against seminorm 2
    assert est.S_est == pytest.approx(0.19, abs=1e-6)
    assert est.minimizer == "ext"
    assert est.family_size == 2


def test_sampling_skips_degenerate_members():
    fam = [("zero", HarmonicMap()), ("z", HarmonicMap(identity())), ("wild", HarmonicMap(SingularPrimitive(1.0, 3.0)))]
    est = sampling_constant_estimate(np.array([0j]), 1.0, fam)
    assert est.S_est == pytest.approx(1.0)
    assert set(est.skipped) == {"zero", "wild"}


def test_family_superset_lowers_estimates(rng):
    p = TauParams(Polynomial((0.1, 0.6, 0.2)))
    fam = default_family(1.0, 0.9, 0.9, 3)
    small = fam[::3]
    a = bounded_below_estimate(p, small)
    b = bounded_below_estimate(p, fam)
    assert b.eps_est <= a.eps_est
    w = random_disk(rng, 20, 0.8)
    assert sampling_constant_estimate(w, 1.0, fam).S_est <= sampling_constant_estimate(w, 1.0, small).S_est


def test_bounded_below_examples():
    fam = default_family(1.0, 0.9, 0.9, 4)
    res = bounded_below_estimate(TauParams(identity()), fam)
    assert res.eps_est == pytest.approx(1.0, abs=1e-6)
    assert res.K == pytest.approx(1.0, abs=1e-6)
    res = bounded_below_estimate(TauParams(Scale(identity(), 0.5)), fam)
    # z^4 composed with z / 2 shrinks by 1/16
    assert res.eps_est == pytest.approx(1 / 16, rel=1e-4)
    with pytest.raises(ValueError):
        bounded_below_estimate(TauParams(identity()), [])


def test_net_radius():
    assert net_radius(2.0, 1.0, 1.0) == 0.1
    assert net_radius(0.0, 1.0, 1.0) == 0.99
    assert net_radius(1.0, 1.0, 1.0) == pytest.approx(math.sqrt(0.5))


def test_report_with_small_family():
    fam = default_family(1.0, 0.9, 0.9, 4)
    rep = closed_range_report(TauParams(identity()), [0.5], family=fam, r0_sweep=(0.45,))
    assert rep.verdict is Evidence.FOR
    rep = closed_range_report(TauParams(Scale(identity(), 0.5)), [0.1, 0.3], family=fam, r0_sweep=(0.45,))
    assert rep.verdict is Evidence.AGAINST
    assert len(rep.levels) == 2


def test_report_rejects_unbounded():
    # phi = 1 - (1 - z)^0.1 pinches the boundary point 1; at alpha = 0.1 tau ~ |1 - z|^-0.81
    phi = Scale(SingularPrimitive(1.0, 0.9), 0.1)
    with pytest.raises(NotBounded):
        closed_range_report(TauParams(phi, 0.1), [0.5], family=[("z", HarmonicMap(identity()))])


def test_bounded_below_scale_against_concentrated_member():
    res = bounded_below_estimate(TauParams(Scale(identity(), 0.5)), [("a=0.99", extremal_pair(0.99, 1.0))])
    assert res.eps_est < 0.2


def test_bounded_below_automorphism():
    phi = Moebius(0.4)
    fam = [(f"a={a}", extremal_pair(a, 1.0)) for a in (0.1, 0.5, -0.7j)]
    # the intensity sup is invariant under automorphisms; only |f(0)| moves
    for _, f in fam:
        assert seminorm(pullback(phi, f), 1.0).value == pytest.approx(seminorm(f, 1.0).value, rel=1e-6)
    res = bounded_below_estimate(TauParams(phi), fam)
    assert 0.5 < res.eps_est < 2
