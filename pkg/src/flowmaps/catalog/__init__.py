"""Catalog of exact solution families.

Every family has an identifier, a catalog section label, default
parameters, and a constructor from ``FamilyParams``. ``build`` accepts a
params object, a plain dict, or just a family id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..core import FlowCandidate
from .columnar import build_columnar, stretch_solutions
from .m2 import build_2d_m2
from .m3 import build_3d_m3
from .m4 import (
    BLOWUP_THRESHOLD,
    build_2d_m4,
    case1_equilibrium_residual,
    case1_initial_state,
    case1_rhs,
    case1_trajectory,
    gerstner_frequency,
    stability_threshold,
)
from .m5 import build_3d_m5
from .m6 import build_3d_m6
from .params import FamilyParams, deep_merge, load_params_file, set_by_path

__all__ = [
    "Family",
    "FamilyParams",
    "FAMILIES",
    "list_families",
    "get_family",
    "default_params",
    "build",
    "build_from_dict",
    "build_from_file",
    "load_params_file",
    "deep_merge",
    "set_by_path",
    "gerstner_frequency",
    "stability_threshold",
    "case1_rhs",
    "case1_trajectory",
    "case1_initial_state",
    "case1_equilibrium_residual",
    "stretch_solutions",
    "BLOWUP_THRESHOLD",
]


@dataclass(frozen=True)
class Family:
    family_id: str
    section: str
    n: int
    m: int
    description: str
    builder: Callable[[FamilyParams], FlowCandidate]
    defaults: dict


def _defaults(fid: str, window, **extra) -> dict:
    out = {"family_id": fid, "t_window": list(window)}
    out.update(extra)
    return out


_RAW = [
    Family(
        "Columnar2D", "3", 2, 4,
        "planar columns over a free stretch: (z1/a, a1 f1 + a2 f2 + a z2)",
        build_columnar,
        _defaults(
            "Columnar2D", (0.0, 6.0),
            constants={"c0": -1.0},
            time_functions={"a": {"name": "affine_trig", "const": 1.0, "sin_amp": 0.1}},
        ),
    ),
    Family(
        "Columnar3DExt", "3", 3, 5,
        "rotating base plus oscillating vertical columns a1 f1 + a2 f2 + a z3",
        build_columnar,
        _defaults("Columnar3DExt", (0.0, 6.0), constants={"c0": -4.0}),
    ),
    Family(
        "M2Triangular", "4.1", 2, 2,
        "triangular 2x2 map; shear balances the running buoyancy torque",
        build_2d_m2,
        _defaults("M2Triangular", (0.0, 6.0), constants={"c0": 1.0, "c": 0.5}),
    ),
    Family(
        "M2Rotational", "4.1", 2, 2,
        "rotation times shear, free b and theta; rho = c0 z2",
        build_2d_m2,
        _defaults("M2Rotational", (0.0, 6.0), constants={"c0": -1.0, "c": 0.0}),
    ),
    Family(
        "M4Case1General", "4.2", 2, 4,
        "wave-coupled rotation integrated from the five-function system",
        build_2d_m4,
        _defaults(
            "M4Case1General", (0.0, 20.0),
            constants={"c0": -1.0},
            initial_conditions={"b11": 0.8, "b12": 0.0, "s_delta": 0.01, "theta0": 0.0, "theta": 0.0},
        ),
    ),
    Family(
        "M4Case1Gerstner", "4.2", 2, 4,
        "stretched-ellipse wave at the equilibrium of case 1",
        build_2d_m4,
        _defaults("M4Case1Gerstner", (0.0, 12.0), constants={"c0": -1.0, "c1": 0.8}),
    ),
    Family(
        "M4Case2Explicit", "4.2", 2, 4,
        "explicit power-law map diag(10/c0, c0/10) (t^-2, t^3; t^2, t^-3)",
        build_2d_m4,
        _defaults("M4Case2Explicit", (1.0, 10.0), constants={"c0": 1.0}),
    ),
    Family(
        "M4Case3Explicit", "4.2", 2, 4,
        "explicit fractional-power map on the parabolic basis; rho = c1 z1",
        build_2d_m4,
        _defaults("M4Case3Explicit", (1.0, 5.0), constants={"c1": 1.0}),
    ),
    Family(
        "M4Case4Quadrature", "4.2", 2, 4,
        "free b1 and theta; b2, b3, b4 by running integrals; rho = c0 f2(z2)",
        build_2d_m4,
        _defaults("M4Case4Quadrature", (0.0, 6.0), constants={"c0": -1.0, "c12": 0.0, "c13": 0.5, "c14": 0.0}),
    ),
    Family(
        "M3QRShearVerticalRho", "5.1", 3, 3,
        "triangular 3x3 under planar rotation; rho = f(z3) + c0 z2",
        build_3d_m3,
        _defaults("M3QRShearVerticalRho", (0.0, 6.0), constants={"c0": -1.0, "c13": 0.3, "c23": 0.1}),
    ),
    Family(
        "M3QRShearLinearRho", "5.1", 3, 3,
        "triangular 3x3 under a free rotation; rho = c0 z3",
        build_3d_m3,
        _defaults("M3QRShearLinearRho", (0.0, 6.0), constants={"c0": -1.0, "c13": 0.0, "c23": 0.0}),
    ),
    Family(
        "M3Columnar", "5.1", 3, 5,
        "zero vertical shears extended by stretch columns; a = 1/(b11 b22)",
        build_3d_m3,
        _defaults("M3Columnar", (0.0, 3.0), constants={"c0": -1.0}),
    ),
    Family(
        "M5Elliptic", "5.2", 3, 5,
        "two rotating column pairs over an arbitrary clock; anti-CR pair",
        build_3d_m5,
        _defaults("M5Elliptic", (0.0, 6.0), constants={"k1": 1.0, "k2": -1.0}),
    ),
    Family(
        "M5Hyperbolic", "5.2", 3, 5,
        "exponentially shearing column pairs over an arbitrary clock",
        build_3d_m5,
        _defaults("M5Hyperbolic", (0.0, 3.0)),
    ),
    Family(
        "M5Parabolic", "5.2", 3, 5,
        "linearly coupled column pairs over an arbitrary clock",
        build_3d_m5,
        _defaults("M5Parabolic", (0.0, 6.0)),
    ),
    Family(
        "M5EllipticExtended", "5.2", 3, 7,
        "elliptic block plus two stretch columns; rho = c0 z3",
        build_3d_m5,
        _defaults("M5EllipticExtended", (0.0, 6.0), constants={"k1": 1.0, "k2": -1.0, "c0": -1.0}),
    ),
    Family(
        "M6Case1", "5.3", 3, 6,
        "semi-explicit wave: cube-root inner rate, one ODE integrated",
        build_3d_m6,
        _defaults("M6Case1", (0.0, 8.0)),
    ),
    Family(
        "M6Case1Example", "5.3", 3, 6,
        "single-clock reduction (c13 = c23 = 0, c12 = -1) with periodic paths",
        build_3d_m6,
        _defaults("M6Case1Example", (0.0, 25.0)),
    ),
    Family(
        "M6Case2Quadrature", "5.4", 3, 6,
        "free monotone l3; the rest by quadrature under unit-product laws",
        build_3d_m6,
        _defaults("M6Case2Quadrature", (0.0, 3.0)),
    ),
    Family(
        "M6Case2Explicit", "5.4", 3, 6,
        "oscillating positive l3 with a3 = 1; stably stratified",
        build_3d_m6,
        _defaults("M6Case2Explicit", (0.0, 6.0), constants={"N": 1.0}),
    ),
]

FAMILIES = {fam.family_id: fam for fam in _RAW}


def list_families(section: Optional[str] = None):
    fams = list(FAMILIES.values())
    if section is not None:
        fams = [f for f in fams if f.section == str(section)]
    return fams


def get_family(family_id: str) -> Family:
    try:
        return FAMILIES[family_id]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise KeyError(f"unknown family {family_id!r}; known: {known}") from None


def default_params(family_id: str) -> FamilyParams:
    return FamilyParams.from_dict(get_family(family_id).defaults)


def build(params) -> FlowCandidate:
    """Build a candidate from FamilyParams, a dict, or a bare family id."""
    if isinstance(params, str):
        params = default_params(params)
    elif isinstance(params, dict):
        params = build_params_dict(params)
    fam = get_family(params.family_id)
    return fam.builder(params)


def build_params_dict(data: dict) -> FamilyParams:
    """Merge a raw dict over the family defaults."""
    fid = data.get("family_id")
    if not fid:
        raise ValueError("parameter dict needs a family_id")
    merged = deep_merge(get_family(fid).defaults, data)
    return FamilyParams.from_dict(merged)


def build_from_dict(data: dict) -> FlowCandidate:
    return build(build_params_dict(data))


def build_from_file(path) -> FlowCandidate:
    return build_from_dict(load_params_file(path))


def param_schema(family_id: str) -> dict:
    """Machine-readable description of a family's default parameters."""
    fam = get_family(family_id)
    return {
        "family_id": fam.family_id,
        "section": fam.section,
        "n": fam.n,
        "m": fam.m,
        "description": fam.description,
        "defaults": fam.defaults,
    }
