"""Spatially linear 3D families (v = (z1, z2, z3)) via QR-shaped matrices.

A = R B with R a rotation and B upper triangular, det B = 1. Off-diagonal
entries come from running integrals driven by the rotation rates
w = 2(<R2', R3>, -<R1', R3>, <R1', R2>) and the accumulated bottom-row
antiderivatives. The columnar branch zeroes the vertical shears and gains
two stretch columns.
"""

from __future__ import annotations

from ..core import FlowCandidate, TimeMatrix, mat_mul_tf, planar_rotation3d
from ..errors import Degenerate
from ..odes import antiderivative
from ..spatial import ConstraintClass, DensityField, Profile1D, SpatialBasis
from ..timefuncs import Const, TimeFunc, cos_of, sin_of
from ._shared import check_nonvanishing, domain_box, padded, profile_param, sf_param, tf_param
from .columnar import stretch_solutions
from .params import FamilyParams

__all__ = ["build_3d_m3", "rotation_about_axes", "rotation_rates"]


def rotation_about_axes(alpha: TimeFunc, beta: TimeFunc):
    """R = Rz(alpha) Rx(beta) as a matrix of time functions."""
    ca, sa = cos_of(alpha), sin_of(alpha)
    cb, sb = cos_of(beta), sin_of(beta)
    zero, one = Const(0.0), Const(1.0)
    rz = [[ca, -1.0 * sa, zero], [sa, ca, zero], [zero, zero, one]]
    rx = [[one, zero, zero], [zero, cb, -1.0 * sb], [zero, sb, cb]]
    return mat_mul_tf(rz, rx)


def rotation_rates(R) -> tuple:
    """w = 2(<R2', R3>, -<R1', R3>, <R1', R2>) over the columns of R."""

    def col_dot(i, j):
        acc: TimeFunc = Const(0.0)
        for k in range(3):
            acc = acc + R[k][i].d * R[k][j]
        return acc

    return 2.0 * col_dot(1, 2), -2.0 * col_dot(0, 2), 2.0 * col_dot(0, 1)


def _identity_basis3():
    return SpatialBasis(3, [("coord", 0), ("coord", 1), ("coord", 2)], ConstraintClass.IDENTITY)


def build_3d_m3(params: FamilyParams) -> FlowCandidate:
    builders = {
        "M3QRShearVerticalRho": _vertical_rho,
        "M3QRShearLinearRho": _linear_rho,
        "M3Columnar": _columnar,
    }
    try:
        build = builders[params.family_id]
    except KeyError:
        raise ValueError(f"not an m=3 family: {params.family_id}") from None
    return build(params)


def _diag_functions(params: FamilyParams, window):
    b11 = tf_param(params, "b11", {"name": "affine_trig", "const": 1.0, "sin_amp": 0.2})
    b22 = tf_param(params, "b22", {"name": "affine_trig", "const": 1.0, "sin_amp": 0.2})
    check_nonvanishing(b11, padded(window), "b11", Degenerate)
    check_nonvanishing(b22, padded(window), "b22", Degenerate)
    return b11, b22


def _vertical_rho(params: FamilyParams) -> FlowCandidate:
    """Planar rotation, rho = f(z3) + c0 z2; bottom row is (0, 0, 1/(b11 b22))."""
    c0 = params.const("c0", -1.0)
    c13 = params.const("c13", 0.3)
    c23 = params.const("c23", 0.1)
    window = params.t_window
    t0 = window[0]
    b11, b22 = _diag_functions(params, window)
    theta = tf_param(params, "theta", {"name": "poly", "coeffs": [0.0, 1.0]})
    b33 = 1.0 / (b11 * b22)

    y3 = antiderivative(b33, t0, params.gauge("y3"), label="y3")
    b12 = b11 * antiderivative(2.0 * theta.d * b22 / b11, t0, params.gauge("b12"), label="b12")
    b23 = b22 * antiderivative(
        (-c13 * b12 / b11 + c0 * y3 - c23) / (b22 * b22), t0, params.gauge("b23"), label="b23"
    )
    b13 = b11 * antiderivative(
        (2.0 * theta.d * b11 * b23 + c13) / (b11 * b11), t0, params.gauge("b13"), label="b13"
    )

    zero = Const(0.0)
    B = [[b11, b12, b13], [zero, b22, b23], [zero, zero, b33]]
    A = TimeMatrix(
        mat_mul_tf(planar_rotation3d(theta), B),
        t0=t0,
        y_funcs=[None, None, y3],
        source="quadrature-backed",
    )
    f = profile_param(params, "f", {"name": "poly", "coeffs": [0.0, 0.0, 0.5]})
    rho = DensityField(3, coeffs=[0.0, c0, 0.0], terms=[(1.0, Profile1D(f, 2))])
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    return FlowCandidate(
        A, _identity_basis3(), rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _linear_rho(params: FamilyParams) -> FlowCandidate:
    """Arbitrary rotation, rho = c0 z3, vertical invariant component zeroed."""
    c0 = params.const("c0", -1.0)
    c13 = params.const("c13", 0.0)
    c23 = params.const("c23", 0.0)
    window = params.t_window
    t0 = window[0]
    b11, b22 = _diag_functions(params, window)
    alpha = tf_param(params, "alpha", {"name": "poly", "coeffs": [0.0, 1.0]})
    beta = tf_param(params, "beta", {"name": "poly", "coeffs": [0.0, 0.5]})
    R = rotation_about_axes(alpha, beta)
    w1, w2, w3 = rotation_rates(R)
    b33 = 1.0 / (b11 * b22)

    b12 = b11 * antiderivative(w3 * b22 / b11, t0, params.gauge("b12"), label="b12")
    # bottom-row antiderivatives feed the later shears, so build them in order
    a31 = R[2][0] * b11
    a32 = R[2][0] * b12 + R[2][1] * b22
    y1 = antiderivative(a31, t0, params.gauge("y1"), label="y1")
    y2 = antiderivative(a32, t0, params.gauge("y2"), label="y2")
    b23 = b22 * antiderivative(
        ((w1 + b12 * (c0 * y1 - c13)) / b11 - c0 * y2 - c23) / (b22 * b22),
        t0,
        params.gauge("b23"),
        label="b23",
    )
    b13 = b11 * antiderivative(
        (-1.0 * w2 / b22 + w3 * b11 * b23 - c0 * y1 + c13) / (b11 * b11),
        t0,
        params.gauge("b13"),
        label="b13",
    )

    zero = Const(0.0)
    B = [[b11, b12, b13], [zero, b22, b23], [zero, zero, b33]]
    A = TimeMatrix(
        mat_mul_tf(R, B),
        t0=t0,
        y_funcs=[y1, y2, None],
        source="quadrature-backed",
    )
    rho = DensityField(3, coeffs=[0.0, 0.0, c0])
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    return FlowCandidate(
        A, _identity_basis3(), rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _columnar(params: FamilyParams) -> FlowCandidate:
    """Planar rotation with zero vertical shears, extended by two stretch
    columns: row 3 is (0, 0, a, a1, a2) with a = 1/(b11 b22)."""
    c0 = params.const("c0", -1.0)
    window = params.t_window
    t0 = window[0]
    b11 = tf_param(params, "b11", {"name": "exp", "amp": 1.0, "rate": -0.5})
    b22 = tf_param(params, "b22", {"name": "exp", "amp": 1.0, "rate": -0.5})
    check_nonvanishing(b11, padded(window), "b11", Degenerate)
    check_nonvanishing(b22, padded(window), "b22", Degenerate)
    theta = tf_param(params, "theta", {"name": "poly", "coeffs": [0.0, 1.0]})

    b12 = b11 * antiderivative(2.0 * theta.d * b22 / b11, t0, params.gauge("b12"), label="b12")
    stretch = 1.0 / (b11 * b22)
    a1, a2, _q = stretch_solutions(stretch, c0, window)

    zero = Const(0.0)
    B = [
        [b11, b12, zero, zero, zero],
        [zero, b22, zero, zero, zero],
        [zero, zero, stretch, a1, a2],
    ]
    A = TimeMatrix(
        mat_mul_tf(planar_rotation3d(theta), B),
        t0=t0,
        source="ode-backed",
    )
    f1 = sf_param(params, "f1", {"name": "wave2d", "amp": 0.5, "kx": 1.0, "ky": 1.0})
    f2 = sf_param(params, "f2", {"name": "exp_cos", "scale": 0.4})
    basis = SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2), f1, f2],
        ConstraintClass.COLUMNAR,
        free_functions={"f1": f1, "f2": f2},
    )
    rho = DensityField(3, coeffs=[0.0, 0.0, c0])
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )
