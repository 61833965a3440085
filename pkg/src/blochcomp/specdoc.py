"""JSON map-specification documents.

A document is a JSON object::

    {
      "map":   <node>,              # the self-map phi (most commands)
      "alpha": 1.0,                 # optional, default 1
      "budget": {"k_max": 16, ...}, # optional Budget field overrides
      "h": <node>, "g": <node>,     # optional harmonic function f = h + conj(g)
      "extremal": {"a": [re, im]}   # optional shorthand for phi_a + conj(phi_a)
    }

Complex numbers are written [re, im] (a bare number means a real value).
Node kinds::

    {"type": "identity"}
    {"type": "poly", "coeffs": [c0, c1, ...]}
    {"type": "moebius", "a": c, "rotation": c}
    {"type": "blaschke", "zeros": [c, ...], "rotation": c}
    {"type": "series", "coeffs": [...], "degree": n, "bound": M}
    {"type": "scale", "inner": node, "factor": c}
    {"type": "compose", "outer": node, "inner": node}
    {"type": "product", "left": node, "right": node}
    {"type": "affine", "terms": [{"weight": c, "map": node}, ...]}
    {"type": "extremal", "a": c, "alpha": x}
    {"type": "singular", "zeta": c, "alpha": x}

``rotation`` defaults to 1 and ``alpha`` inside an ``extremal`` node
defaults to the document's alpha.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field

from .adaptive import Budget
from .disk_geometry import DomainError
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
    ZERO,
    extremal_pair,
    identity,
)


class SpecError(ValueError):
    """Malformed or semantically invalid specification document."""


@dataclass(frozen=True)
class MapSpecDocument:
    map: AnalyticMap | None
    alpha: float = 1.0
    budget: dict = field(default_factory=dict)
    harmonic: HarmonicMap | None = None
    digest: str = ""


def _complex(value, path):
    if isinstance(value, bool):
        raise SpecError(f"{path}: expected a number or [re, im], got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise SpecError(f"{path}: expected a number or [re, im], got {value!r}")


def _real(value, path, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SpecError(f"{path}: expected a real number, got {value!r}")
    if positive and not value > 0:
        raise SpecError(f"{path}: must be positive, got {value!r}")
    return float(value)


def _field(node, key, path):
    if key not in node:
        raise SpecError(f"{path}: missing field {key!r}")
    return node[key]


def _clist(value, path):
    if not isinstance(value, list):
        raise SpecError(f"{path}: expected a list")
    return [_complex(v, f"{path}[{i}]") for i, v in enumerate(value)]


def build_map(node, alpha: float = 1.0, path: str = "map") -> AnalyticMap:
    """Turn a parsed JSON node into an AnalyticMap, naming the node on error."""
    if not isinstance(node, dict):
        raise SpecError(f"{path}: expected an object with a 'type' field")
    kind = _field(node, "type", path)
    try:
        if kind == "identity":
            return identity()
        if kind == "poly":
            return Polynomial(tuple(_clist(_field(node, "coeffs", path), f"{path}.coeffs")))
        if kind == "moebius":
            return Moebius(
                _complex(_field(node, "a", path), f"{path}.a"),
                _complex(node.get("rotation", 1.0), f"{path}.rotation"),
            )
        if kind == "blaschke":
            zeros = _clist(_field(node, "zeros", path), f"{path}.zeros")
            for i, a in enumerate(zeros):
                if not abs(a) < 1:
                    raise SpecError(f"{path}.zeros[{i}]: Blaschke zero {a} is outside the disk")
            return BlaschkeProduct(tuple(zeros), _complex(node.get("rotation", 1.0), f"{path}.rotation"))
        if kind == "series":
            deg = node.get("degree")
            if deg is not None and (isinstance(deg, bool) or not isinstance(deg, int) or deg < 0):
                raise SpecError(f"{path}.degree: expected a nonnegative integer")
            bound = node.get("bound")
            return PowerSeries(
                tuple(_clist(_field(node, "coeffs", path), f"{path}.coeffs")),
                deg,
                None if bound is None else _real(bound, f"{path}.bound"),
            )
        if kind == "scale":
            return Scale(
                build_map(_field(node, "inner", path), alpha, f"{path}.inner"),
                _complex(_field(node, "factor", path), f"{path}.factor"),
            )
        if kind == "compose":
            return Compose(
                build_map(_field(node, "outer", path), alpha, f"{path}.outer"),
                build_map(_field(node, "inner", path), alpha, f"{path}.inner"),
            )
        if kind == "product":
            return Product(
                build_map(_field(node, "left", path), alpha, f"{path}.left"),
                build_map(_field(node, "right", path), alpha, f"{path}.right"),
            )
        if kind == "affine":
            terms = _field(node, "terms", path)
            if not isinstance(terms, list) or not terms:
                raise SpecError(f"{path}.terms: expected a nonempty list")
            out = []
            for i, t in enumerate(terms):
                tp = f"{path}.terms[{i}]"
                if not isinstance(t, dict):
                    raise SpecError(f"{tp}: expected {{'weight': c, 'map': node}}")
                out.append((_complex(t.get("weight", 1.0), f"{tp}.weight"), build_map(_field(t, "map", tp), alpha, f"{tp}.map")))
            return AffineCombo(tuple(out))
        if kind == "extremal":
            a = _complex(_field(node, "a", path), f"{path}.a")
            if not abs(a) < 1:
                raise SpecError(f"{path}.a: {a} is outside the disk")
            return AntiderivativePower(a, _real(node.get("alpha", alpha), f"{path}.alpha", positive=True))
        if kind == "singular":
            return SingularPrimitive(
                _complex(_field(node, "zeta", path), f"{path}.zeta"),
                _real(node.get("alpha", alpha), f"{path}.alpha", positive=True),
            )
    except SpecError:
        raise
    except (DomainError, ValueError) as exc:
        raise SpecError(f"{path}: {exc}") from exc
    raise SpecError(f"{path}: unknown node type {kind!r}")


def parse_spec(text: str) -> MapSpecDocument:
    """Parse and validate a specification document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise SpecError("document root must be a JSON object")
    alpha = _real(raw.get("alpha", 1.0), "alpha", positive=True)

    budget = raw.get("budget", {})
    if not isinstance(budget, dict):
        raise SpecError("budget: expected an object")
    names = {f.name for f in dataclasses.fields(Budget)}
    for k in budget:
        if k not in names:
            raise SpecError(f"budget.{k}: unknown budget field")

    phi = build_map(raw["map"], alpha, "map") if "map" in raw else None

    harmonic = None
    if "extremal" in raw:
        ex = raw["extremal"]
        if not isinstance(ex, dict):
            raise SpecError("extremal: expected an object with field 'a'")
        a = _complex(_field(ex, "a", "extremal"), "extremal.a")
        if not abs(a) < 1:
            raise SpecError(f"extremal.a: {a} is outside the disk")
        harmonic = extremal_pair(a, _real(ex.get("alpha", alpha), "extremal.alpha", positive=True))
    elif "h" in raw or "g" in raw:
        h = build_map(raw["h"], alpha, "h") if "h" in raw else ZERO
        g = build_map(raw["g"], alpha, "g") if "g" in raw else ZERO
        harmonic = HarmonicMap(h, g)

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return MapSpecDocument(phi, alpha, dict(budget), harmonic, digest)
