import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from blochcomp.adaptive import DEFAULT_BUDGET, Decay, Status, decay_verdict, sup_over_disk
from blochcomp.bloch_norms import (
    Alpha,
    extremal_pair_check,
    growth_bound,
    little_bloch_profile,
    local_intensity,
    norm,
    path_integral_factor,
    seminorm,
)
from blochcomp.disk_geometry import DomainError, pseudo_hyperbolic
from blochcomp.function_model import (
    HarmonicMap,
    Polynomial,
    PowerSeries,
    SingularPrimitive,
    constant,
    eval_harmonic,
    extremal_pair,
    identity,
    monomial,
)

from conftest import random_disk


def dense_grid_sup(f, alpha, n_r=600, n_t=1200):
    """Brute-force sup of the Bloch intensity on a polar grid reaching 1 - 1e-4."""
    r = np.concatenate([np.linspace(0, 0.99, n_r), 1 - np.logspace(-2, -4, n_r // 3)])
    t = 2 * np.pi * np.arange(n_t) / n_t
    best = 0.0
    for rr in r:
        z = rr * np.exp(1j * t)
        v = (1 - rr * rr) ** alpha * (np.abs(f.h._deriv(z)) + np.abs(f.g._deriv(z)))
        best = max(best, float(v.max()))
    return best


def test_alpha_validation():
    Alpha(0.5)
    for bad in (0, -1, math.inf, math.nan):
        with pytest.raises(ValueError):
            Alpha(bad)
    with pytest.raises(ValueError):
        seminorm(HarmonicMap(identity()), 0)


def test_local_intensity_examples():
    f = HarmonicMap(identity())
    assert local_intensity(f, 1, 0) == 1
    assert local_intensity(f, 1, 0.5) == pytest.approx(0.75)
    assert local_intensity(HarmonicMap(identity(), identity()), 2, 0.5) == pytest.approx(2 * 0.75**2)
    with pytest.raises(DomainError):
        local_intensity(f, 1, 1.0)


def test_seminorm_examples():
    est = seminorm(HarmonicMap(identity()), 1)
    assert est.value == pytest.approx(1, abs=1e-12)
    assert abs(est.witness) < 1e-6
    assert est.status is Status.CONVERGED
    # z^2: sup 2r(1 - r^2) at r = 1/sqrt(3)
    est = seminorm(HarmonicMap(monomial(2)), 1)
    assert est.value == pytest.approx(4 / (3 * math.sqrt(3)), rel=1e-8)
    assert abs(est.witness) == pytest.approx(1 / math.sqrt(3), abs=1e-4)
    assert seminorm(HarmonicMap(constant(3.0)), 1).value == 0


def test_log_series_seminorm_against_dense_grid():
    # log(1/(1-z)) truncated at degree 200
    c = (0,) + tuple(1 / n for n in range(1, 201))
    f = HarmonicMap(PowerSeries(c))
    est = seminorm(f, 1)
    assert est.value == pytest.approx(dense_grid_sup(f, 1), rel=1e-3)


def test_norm_adds_value_at_origin():
    f = HarmonicMap(Polynomial((2, 1)), Polynomial((1j,)))
    value, est = norm(f, 1)
    assert abs(eval_harmonic(f, 0)) == pytest.approx(math.sqrt(5))
    assert value == pytest.approx(math.sqrt(5) + 1, abs=1e-10)
    assert est.value == pytest.approx(1, abs=1e-10)


def test_diverging_seminorm_is_flagged():
    # |h'| = |1 - z|^-2 is too singular for alpha = 1
    est = seminorm(HarmonicMap(SingularPrimitive(1.0, 2.0)), 1)
    assert est.status is Status.DIVERGING


@pytest.mark.parametrize("a", [0.1, 0.5, 0.9 * complex(math.cos(math.pi / 3), math.sin(math.pi / 3))])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_extremal_seminorm_is_two(a, alpha):
    est = seminorm(extremal_pair(a, alpha), alpha)
    assert est.value == pytest.approx(2, abs=1e-6)
    assert pseudo_hyperbolic(est.witness, a) < 0.05


def test_little_bloch_profiles():
    # (1 - r^2) * 2r -> 0
    assert little_bloch_profile(HarmonicMap(monomial(2)), 1).verdict is Decay.DECAYS_TO_ZERO
    assert little_bloch_profile(HarmonicMap(identity()), 0.5).verdict is Decay.DECAYS_TO_ZERO
    assert little_bloch_profile(HarmonicMap(SingularPrimitive(1.0, 1.0)), 1).verdict is Decay.STABILIZES
    assert little_bloch_profile(HarmonicMap(SingularPrimitive(1.0, 0.5)), 1).verdict is Decay.DECAYS_TO_ZERO
    assert little_bloch_profile(HarmonicMap(SingularPrimitive(1.0, 2.0)), 1).verdict is Decay.GROWS


def test_decay_verdict_examples():
    assert decay_verdict([1, 0.5, 0.25, 0.1, 0.01, 1e-4]) is Decay.DECAYS_TO_ZERO
    assert decay_verdict([1, 2, 4, 8, 16]) is Decay.GROWS
    assert decay_verdict([0.9, 0.99, 0.999, 0.9999]) is Decay.STABILIZES
    assert decay_verdict([1, 0.2, 1, 0.2, 1, 0.2]) is Decay.INCONCLUSIVE
    assert decay_verdict([0.5]) is Decay.INCONCLUSIVE


def test_sup_over_disk_deterministic():
    f = HarmonicMap(Polynomial((0, 1, 0.3j, -0.2)))
    a = seminorm(f, 1.5)
    b = seminorm(f, 1.5)
    assert a.value == b.value and a.witness == b.witness and a.trace == b.trace


def test_sup_over_disk_inconclusive_on_tiny_budget():
    est = sup_over_disk(lambda z: np.abs(z), DEFAULT_BUDGET.with_overrides(k_max=2, min_levels=2))
    assert est.status is Status.INCONCLUSIVE


def test_path_integral_factor_examples():
    assert path_integral_factor(0.5, 1) == pytest.approx(2 * math.log(2), abs=1e-12)
    assert path_integral_factor(0, 1.7) == 1
    assert path_integral_factor(0.5, 0.5) == pytest.approx(2 * (1 - math.sqrt(0.5)) / 0.5, abs=1e-14)
    with pytest.raises(ValueError):
        path_integral_factor(1.0, 1)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.999), st.floats(0.05, 4.0))
def test_path_integral_factor_matches_quadrature(s, alpha):
    ref, _ = quad(lambda t: (1 - s * t) ** -alpha, 0, 1, epsabs=1e-13, epsrel=1e-12)
    assert path_integral_factor(s, alpha) == pytest.approx(ref, rel=1e-9)


def test_growth_bound_example():
    assert growth_bound(1.0, 1, 0.5) == pytest.approx(math.log(2), abs=1e-12)
    assert growth_bound(1.0, 1, 0.5, f0=2) == pytest.approx(2 + math.log(2), abs=1e-12)
    with pytest.raises(ValueError):
        growth_bound(-1, 1, 0.5)


def test_growth_bound_holds_on_random_polynomials(rng):
    for _ in range(30):
        alpha = 0.3 + 2 * rng.random()
        h = Polynomial(tuple(rng.normal(size=5) + 1j * rng.normal(size=5)))
        g = Polynomial(tuple(rng.normal(size=4) + 1j * rng.normal(size=4)))
        f = HarmonicMap(h, g)
        est = seminorm(f, alpha)
        assert est.status is Status.CONVERGED
        f0 = eval_harmonic(f, 0)
        for z in random_disk(rng, 30, 0.999):
            assert abs(eval_harmonic(f, z) - f0) <= growth_bound(est.value, alpha, z) * (1 + 1e-9)


def test_extremal_pair_check():
    a, alpha = 0.3, 1.0
    f = extremal_pair(a, alpha)
    grid = np.array([0, 0.5, -0.9j, 0.99])
    chk = extremal_pair_check(f.h, f.h, alpha, grid)
    # (1 - |z|)|psi_a'| (two copies) is 2(1 - |a|^2)(1 - |z|)/|1 - a z|^2; the minimum sits at 0.99
    assert not chk.passes
    assert chk.witness == 0.99
    # (1 - r)^alpha * (1 - r)^-alpha = 1 on the positive radius
    s = SingularPrimitive(1.0, 1.0)
    chk = extremal_pair_check(s, constant(0.0), 1.0, np.array([0.0, 0.5, 0.9]))
    assert chk.passes and chk.min_ratio == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.3, 2.5))
def test_seminorm_homogeneity(re, im, alpha):
    c = complex(re, im)
    f = HarmonicMap(Polynomial((0, 1, 0.5)), Polynomial((0, 0.2j)))
    base = seminorm(f, alpha).value
    assert seminorm(f.scaled(c), alpha).value == pytest.approx(abs(c) * base, rel=1e-6, abs=1e-12)


def test_seminorm_triangle_and_monotonicity(rng):
    for _ in range(8):
        f1 = HarmonicMap(Polynomial(tuple(rng.normal(size=4))), Polynomial(tuple(rng.normal(size=3))))
        f2 = HarmonicMap(Polynomial(tuple(rng.normal(size=4) * 1j)))
        s1, s2, s12 = (seminorm(x, 1).value for x in (f1, f2, f1 + f2))
        assert s12 <= s1 + s2 + 1e-8
        # (1 - |z|^2)^alpha shrinks as alpha grows
        assert seminorm(f1, 1.5).value <= s1 + 1e-10
