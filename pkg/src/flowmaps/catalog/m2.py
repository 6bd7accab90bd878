"""Planar families with a square 2x2 coefficient matrix (v = (z1, z2)).

Volume preservation pins det A = 1, and a column transform reduces A to
either a triangular form (one arbitrary diagonal function) or a rotation
times a shear (two arbitrary functions b, theta). Both are fully explicit
up to running integrals.
"""

from __future__ import annotations

from ..core import FlowCandidate, TimeMatrix, mat_mul_tf, rotation2d
from ..errors import Degenerate
from ..odes import antiderivative
from ..spatial import ConstraintClass, DensityField, Profile1D, SpatialBasis
from ..timefuncs import Const, sin_of
from ._shared import check_nonvanishing, check_positive, domain_box, padded, profile_param, tf_param
from .params import FamilyParams

__all__ = ["build_2d_m2"]


def build_2d_m2(params: FamilyParams) -> FlowCandidate:
    if params.family_id == "M2Triangular":
        return _triangular(params)
    if params.family_id == "M2Rotational":
        return _rotational(params)
    raise ValueError(f"not an m=2 family: {params.family_id}")


def _identity_basis():
    return SpatialBasis(2, [("coord", 0), ("coord", 1)], ConstraintClass.IDENTITY)


def _triangular(params: FamilyParams) -> FlowCandidate:
    """A = [[1/a22, a12], [0, a22]], rho = c0 z1 + f(z2).

    The shear integrates the running stratification torque:
    a12 = (1/a22) * int (c0 y2 - c) a22^2 dt with y2' = a22.
    """
    c0 = params.const("c0", 1.0)
    c = params.const("c", 0.5)
    window = params.t_window
    t0 = window[0]
    a22 = tf_param(params, "a22", {"name": "affine_trig", "const": 1.0, "sin_amp": 0.3})
    check_nonvanishing(a22, padded(window), "a22", Degenerate)

    y2 = antiderivative(a22, t0, params.gauge("y2"), label="y2")
    shear_load = (c0 * y2 - c) * a22 * a22
    a12 = (1.0 / a22) * antiderivative(shear_load, t0, params.gauge("a12"), label="a12")

    A = TimeMatrix(
        [[1.0 / a22, a12], [Const(0.0), a22]],
        t0=t0,
        y_funcs=[None, y2],
        source="quadrature-backed",
    )
    f = profile_param(params, "f", {"name": "sin", "amp": 0.3})
    rho = DensityField(2, coeffs=[c0, 0.0], terms=[(1.0, Profile1D(f, 1))])
    box = domain_box(params, [-1.0, -1.0], [1.0, 1.0])
    return FlowCandidate(
        A, _identity_basis(), rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _rotational(params: FamilyParams) -> FlowCandidate:
    """A = R(theta) [[b, l b], [0, 1/b]], rho = c0 z2.

    The shear rate balances rotation against the running buoyancy torque:
    b^2 l' = 2 theta' - c - c0 y1 with y1' = b sin(theta).
    """
    c0 = params.const("c0", -1.0)
    c = params.const("c", 0.0)
    window = params.t_window
    t0 = window[0]
    b = tf_param(params, "b", {"name": "affine_trig", "const": 1.0, "sin_amp": 0.2})
    theta = tf_param(params, "theta", {"name": "poly", "coeffs": [0.0, 1.0]})
    check_positive(b, padded(window), "b", Degenerate)

    y1 = antiderivative(b * sin_of(theta), t0, params.gauge("y1"), label="y1")
    ell = antiderivative((2.0 * theta.d - c - c0 * y1) / (b * b), t0, params.gauge("ell"), label="ell")

    inner = [[b, ell * b], [Const(0.0), 1.0 / b]]
    A = TimeMatrix(mat_mul_tf(rotation2d(theta), inner), t0=t0, source="quadrature-backed")
    rho = DensityField(2, coeffs=[0.0, c0])
    box = domain_box(params, [-1.0, -1.0], [1.0, 1.0])
    return FlowCandidate(
        A, _identity_basis(), rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )
