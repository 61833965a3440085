"""Numerical analysis of composition operators on harmonic alpha-Bloch spaces."""

from .adaptive import Budget, Decay, DecayProfile, Status, SupEstimate
from .bloch_norms import (
    Alpha,
    extremal_pair_check,
    growth_bound,
    little_bloch_profile,
    local_intensity,
    norm,
    seminorm,
)
from .closed_range import (
    annulus_check,
    bounded_below_estimate,
    closed_range_report,
    g_sample,
    net_check,
    omega_sample,
    sampling_constant_estimate,
)
from .comp_operator import (
    TauParams,
    boundary_profile_by_base,
    boundary_profile_by_image,
    classify,
    pullback,
    tau,
    tau_sup,
)
from .disk_geometry import (
    DiskPoint,
    DomainError,
    hyperbolic,
    hyperbolic_lattice,
    is_r_separated,
    moebius,
    moebius_deriv,
    pseudo_hyperbolic,
)
from .function_model import (
    AffineCombo,
    AnalyticMap,
    AntiderivativePower,
    BlaschkeProduct,
    Compose,
    HarmonicMap,
    Moebius,
    Polynomial,
    PowerSeries,
    Product,
    Scale,
    SingularPrimitive,
    deriv_analytic,
    eval_analytic,
    eval_harmonic,
    extremal_pair,
    extremal_phi_a,
    constant,
    identity,
    monomial,
    validate_self_map,
    wirtinger,
)
from .specdoc import parse_spec

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "Decay",
    "DecayProfile",
    "Status",
    "SupEstimate",
    "Alpha",
    "extremal_pair_check",
    "growth_bound",
    "little_bloch_profile",
    "local_intensity",
    "norm",
    "seminorm",
    "annulus_check",
    "bounded_below_estimate",
    "closed_range_report",
    "g_sample",
    "net_check",
    "omega_sample",
    "sampling_constant_estimate",
    "TauParams",
    "boundary_profile_by_base",
    "boundary_profile_by_image",
    "classify",
    "pullback",
    "tau",
    "tau_sup",
    "DiskPoint",
    "DomainError",
    "hyperbolic",
    "hyperbolic_lattice",
    "is_r_separated",
    "moebius",
    "moebius_deriv",
    "pseudo_hyperbolic",
    "AffineCombo",
    "AnalyticMap",
    "AntiderivativePower",
    "BlaschkeProduct",
    "Compose",
    "HarmonicMap",
    "Moebius",
    "Polynomial",
    "PowerSeries",
    "Product",
    "Scale",
    "SingularPrimitive",
    "deriv_analytic",
    "eval_analytic",
    "eval_harmonic",
    "extremal_pair",
    "extremal_phi_a",
    "constant",
    "identity",
    "monomial",
    "validate_self_map",
    "wirtinger",
    "parse_spec",
]
