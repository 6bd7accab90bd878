"""3D five-column families driven by an arbitrary strictly-increasing clock.

All three shapes share phi_3 = theta'(t) z3 and a density depending on z3
only; the horizontal block is a rotation pattern in theta scaled by
1/sqrt(theta') so that volume is preserved. The elliptic shape can be
extended by two stretch columns solving y'' + q y = 0 with a = theta'.
"""

from __future__ import annotations

from ..core import FlowCandidate, TimeMatrix, mat_mul_tf, planar_rotation3d
from ..errors import InvalidClock
from ..spatial import (
    ConstraintClass,
    DensityField,
    Profile1D,
    SlopeBlend,
    SpatialBasis,
)
from ..timefuncs import Const, TimeFunc, cos_of, exp_of, sin_of, sqrt_of
from ._shared import check_positive, domain_box, padded, pair_param, profile_param, sf_param, tf_param
from .columnar import stretch_solutions
from .params import FamilyParams

__all__ = ["build_3d_m5"]


def build_3d_m5(params: FamilyParams) -> FlowCandidate:
    builders = {
        "M5Elliptic": _elliptic,
        "M5Hyperbolic": _hyperbolic,
        "M5Parabolic": _parabolic,
        "M5EllipticExtended": _elliptic_extended,
    }
    try:
        build = builders[params.family_id]
    except KeyError:
        raise ValueError(f"not an m=5 family: {params.family_id}") from None
    return build(params)


def _clock(params: FamilyParams) -> TimeFunc:
    theta = tf_param(params, "theta", {"name": "poly", "coeffs": [0.0, 1.0]})
    check_positive(theta.d, padded(params.t_window), "theta'", InvalidClock)
    return theta


def _rho_of_z3(params: FamilyParams, key: str = "rho"):
    prof = profile_param(params, key, {"name": "poly", "coeffs": [0.0, 0.0, 1.0]})
    return DensityField(3, terms=[(1.0, Profile1D(prof, 2))])


def _elliptic_block(theta: TimeFunc, k1: float, k2: float):
    """Columns (1,2,4,5) rotate with rates k1, k2; column 3 is theta' e3."""
    isq = 1.0 / sqrt_of(theta.d)
    c1, s1 = cos_of(k1 * theta), sin_of(k1 * theta)
    c2, s2 = cos_of(k2 * theta), sin_of(k2 * theta)
    zero = Const(0.0)
    return [
        [c1 * isq, -1.0 * s1 * isq, zero, c2 * isq, -1.0 * s2 * isq],
        [s1 * isq, c1 * isq, zero, s2 * isq, c2 * isq],
        [zero, zero, theta.d, zero, zero],
    ]


def _elliptic(params: FamilyParams) -> FlowCandidate:
    k1 = params.const("k1", 1.0)
    k2 = params.const("k2", -1.0)
    window = params.t_window
    theta = _clock(params)
    A = TimeMatrix(_elliptic_block(theta, k1, k2), t0=window[0], source="closed-form")
    f1, f2 = pair_param(params, "pair", {"pair": "exp_wave", "scale": 1.0})
    basis = SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2), f1, f2],
        ConstraintClass.ANTI_CR_3D,
        free_functions={"f1": f1, "f2": f2},
        acr_indices=(3, 4),
    )
    box = domain_box(params, [-3.0, -2.0, -1.0], [3.0, -0.1, 1.0])
    return FlowCandidate(
        A, basis, _rho_of_z3(params), box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _hyperbolic(params: FamilyParams) -> FlowCandidate:
    window = params.t_window
    theta = _clock(params)
    isq = 1.0 / sqrt_of(theta.d)
    ep, em = exp_of(theta), exp_of(-1.0 * theta)
    zero = Const(0.0)
    inner = [
        [ep * isq, zero, zero, zero, em * isq],
        [zero, em * isq, zero, ep * isq, zero],
        [zero, zero, theta.d, zero, zero],
    ]
    A = TimeMatrix(mat_mul_tf(planar_rotation3d(theta), inner), t0=window[0], source="closed-form")
    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.3})
    f2 = profile_param(params, "f2", {"name": "sin", "amp": 0.3})
    basis = SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2), Profile1D(f1, 0), Profile1D(f2, 1)],
        ConstraintClass.SEPARATED_3D,
        free_functions={"f1": Profile1D(f1, 0), "f2": Profile1D(f2, 1)},
    )
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    return FlowCandidate(
        A, basis, _rho_of_z3(params), box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _parabolic(params: FamilyParams) -> FlowCandidate:
    window = params.t_window
    theta = _clock(params)
    isq = 1.0 / sqrt_of(theta.d)
    zero = Const(0.0)
    inner = [
        [zero, zero, zero, isq, theta * isq],
        [theta * isq, isq, zero, zero, zero],
        [zero, zero, theta.d, zero, zero],
    ]
    A = TimeMatrix(mat_mul_tf(planar_rotation3d(theta), inner), t0=window[0], source="closed-form")
    f1 = profile_param(params, "f1", {"name": "poly", "coeffs": [0.0, 2.0]})
    f2 = profile_param(params, "f2", {"name": "sin", "amp": 0.5})
    v4 = SlopeBlend(f2, f1, ax_var=0, ax_lin=1)  # f1(z1) + z2 f2'(z1)
    v5 = Profile1D(f2, 0)
    basis = SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2), v4, v5],
        ConstraintClass.PARABOLIC_3D,
        free_functions={"f1": Profile1D(f1, 0), "f2": v5},
    )
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    return FlowCandidate(
        A, basis, _rho_of_z3(params), box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _elliptic_extended(params: FamilyParams) -> FlowCandidate:
    """Elliptic block plus stretch columns (a1, a2) with a = theta'; the
    density must be linear in z3 for the extension."""
    k1 = params.const("k1", 1.0)
    k2 = params.const("k2", -1.0)
    c0 = params.const("c0", -1.0)
    window = params.t_window
    theta = _clock(params)
    block = _elliptic_block(theta, k1, k2)
    a1, a2, _q = stretch_solutions(_const_or_node(theta.d), c0, window)
    zero = Const(0.0)
    entries = [
        block[0] + [zero, zero],
        block[1] + [zero, zero],
        block[2] + [a1, a2],
    ]
    A = TimeMatrix(entries, t0=window[0], source="ode-backed")
    f1, f2 = pair_param(params, "pair", {"pair": "exp_wave", "scale": 1.0})
    f3 = sf_param(params, "f3", {"name": "wave2d", "amp": 0.5, "kx": 1.0, "ky": 1.0})
    f4 = sf_param(params, "f4", {"name": "exp_sin", "scale": 0.4})
    basis = SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2), f1, f2, f3, f4],
        ConstraintClass.MIXED_3D,
        free_functions={"f1": f1, "f2": f2, "f3": f3, "f4": f4},
        acr_indices=(3, 4),
    )
    rho = DensityField(3, coeffs=[0.0, 0.0, c0])
    box = domain_box(params, [-3.0, -2.0, -1.0], [3.0, -0.1, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _const_or_node(tf: TimeFunc) -> TimeFunc:
    """Fold a derivative node that is constant into Const so the stretch
    solver can take the closed-form branch."""
    from ..timefuncs import Poly

    if isinstance(tf, Const):
        return tf
    if isinstance(tf, Poly) and len(tf.coeffs) == 1:
        return Const(float(tf.coeffs[0]))
    return tf
