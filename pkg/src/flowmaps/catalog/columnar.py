"""Columnar families: vertical columns stretch but stay vertical.

The vertical component obeys a f'' - (a'' + c0) f = 0, so the two extra
column coefficients solve y'' + q y = 0 with q = -(a'' + c0)/a. A constant
stretch with negative linear stratification gives the classic oscillating
column: phi_3 = z3 + f1 cos(N t) + f2 sin(N t), N^2 = -c0.
"""

from __future__ import annotations

import math

from ..core import FlowCandidate, TimeMatrix, mat_mul_tf, rotation2d
from ..errors import DegenerateStretch
from ..odes import antiderivative, sl_timefunc, solve_sl
from ..spatial import (
    Box,
    ConstraintClass,
    DensityField,
    Profile1D,
    SpatialBasis,
)
from ..timefuncs import Const, Poly, TimeFunc, cos_of, sin_of
from ._shared import (
    check_nonvanishing,
    domain_box,
    padded,
    profile_param,
    sf_param,
    tf_param,
)
from .params import FamilyParams

__all__ = ["build_columnar", "stretch_solutions"]


def stretch_solutions(a: TimeFunc, c0: float, window) -> tuple:
    """Solutions (a1, a2) of y'' + q y = 0 with q = -(a'' + c0)/a.

    For a constant stretch the pair is closed-form: (cos, sin) of the
    buoyancy frequency for q > 0, (cosh, sinh)-like growth for q < 0 and
    (1, t) in the neutral case. Otherwise the pair is integrated with unit
    initial data and Wronskian 1.
    """
    if isinstance(a, Const):
        q = -c0 / a.value
        if q > 0.0:
            n_freq = math.sqrt(q)
            return cos_of(Poly([0.0, n_freq])), sin_of(Poly([0.0, n_freq])), q
        if q == 0.0:
            return Const(1.0), Poly([0.0, 1.0]), q
        k = math.sqrt(-q)
        return _cosh(k), _sinh(k), q
    q = -(a.d.d + c0) / a
    sol1, sol2 = solve_sl(q, padded(window))
    return sl_timefunc(sol1, q), sl_timefunc(sol2, q), q


def _cosh(k: float) -> TimeFunc:
    from ..timefuncs import exp_of

    return 0.5 * (exp_of(Poly([0.0, k])) + exp_of(Poly([0.0, -k])))


def _sinh(k: float) -> TimeFunc:
    from ..timefuncs import exp_of

    return 0.5 * (exp_of(Poly([0.0, k])) - exp_of(Poly([0.0, -k])))


def build_columnar(params: FamilyParams) -> FlowCandidate:
    if params.family_id == "Columnar2D":
        return _columnar_2d(params)
    if params.family_id == "Columnar3DExt":
        return _columnar_3d(params)
    raise ValueError(f"not a columnar family: {params.family_id}")


def _columnar_2d(params: FamilyParams) -> FlowCandidate:
    """phi = (z1/a, a1 f1(z1) + a2 f2(z1) + a z2), rho = c0 z2."""
    c0 = params.const("c0", -1.0)
    window = params.t_window
    a = tf_param(params, "a", {"name": "const", "value": 1.0})
    check_nonvanishing(a, padded(window), "stretch a", DegenerateStretch)
    a1, a2, _q = stretch_solutions(a, c0, window)

    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.5})
    f2 = profile_param(params, "f2", {"name": "cos", "amp": 0.5})

    zero = Const(0.0)
    entries = [
        [1.0 / a, zero, zero, zero],
        [zero, a, a1, a2],
    ]
    A = TimeMatrix(entries, t0=window[0], source="ode-backed" if not isinstance(a, Const) else "closed-form")
    basis = SpatialBasis(
        2,
        [("coord", 0), ("coord", 1), Profile1D(f1, 0), Profile1D(f2, 0)],
        ConstraintClass.COLUMNAR,
        free_functions={"f1": Profile1D(f1, 0), "f2": Profile1D(f2, 0)},
    )
    rho = DensityField(2, coeffs=[0.0, c0])
    box = domain_box(params, [-1.0, -1.0], [1.0, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id,
        t_window=window,
        params=params.to_dict(),
    )


def _columnar_3d(params: FamilyParams) -> FlowCandidate:
    """phi = (phi1, phi2, a1 f1 + a2 f2 + a z3), rho = c0 z3.

    The horizontal part is a sheared rotation with det 1/a so that the full
    map preserves volume; with a == 1 it reduces to the rigidly rotating
    oscillating-column flow.
    """
    c0 = params.const("c0", -4.0)
    window = params.t_window
    t0 = window[0]
    a = tf_param(params, "a", {"name": "const", "value": 1.0})
    theta = tf_param(params, "theta", {"name": "poly", "coeffs": [0.0, 1.0]})
    check_nonvanishing(a, padded(window), "stretch a", DegenerateStretch)
    a1, a2, _q = stretch_solutions(a, c0, window)

    # horizontal block R(theta) [[b11, b12], [0, b22]] with b11 b22 = 1/a
    b11 = 1.0 / a
    b22 = Const(1.0)
    b12 = b11 * antiderivative(2.0 * theta.d * b22 / b11, t0, params.gauge("b12"), label="b12")
    rot = rotation2d(theta)
    hblock = mat_mul_tf(rot, [[b11, b12], [Const(0.0), b22]])

    zero = Const(0.0)
    entries = [
        [hblock[0][0], hblock[0][1], zero, zero, zero],
        [hblock[1][0], hblock[1][1], zero, zero, zero],
        [zero, zero, a, a1, a2],
    ]
    A = TimeMatrix(entries, t0=t0, source="closed-form" if isinstance(a, Const) else "ode-backed")

    f1 = sf_param(params, "f1", {"name": "wave2d", "amp": 0.6, "kx": 1.0, "ky": 1.0})
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
        family_id=params.family_id,
        t_window=window,
        params=params.to_dict(),
    )
