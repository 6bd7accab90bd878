"""3D six-column families.

Case 1 couples two horizontal wave columns to a vertically driven pair
through an inner phase mu with a cube-root rate law; one scalar ODE is
integrated numerically and everything else is explicit in (mu, theta).
Case 2 is a fully diagonal-plus-shear structure where one profile (l3) is
free and the rest follow by quadrature, subject to the unit-product
conservation laws a1 a2 a3 = l1 l2 l3 = 1.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import FlowCandidate, TimeMatrix, mat_mul_tf, planar_rotation3d
from ..errors import ComplexBranch, Degenerate, LostRegularity, QuadratureBreakdown
from ..odes import antiderivative, integrate_ivp
from ..spatial import (
    ConstraintClass,
    DensityField,
    LinComb,
    Profile1D,
    SpatialBasis,
)
from ..timefuncs import Const, TimeFunc, cbrt_of, cos_of, sin_of, sqrt_of
from ._shared import check_nonvanishing, check_positive, domain_box, padded, pair_param, profile_param, sign_at, tf_param
from .params import FamilyParams

__all__ = ["build_3d_m6"]


def build_3d_m6(params: FamilyParams) -> FlowCandidate:
    builders = {
        "M6Case1": _case1_general,
        "M6Case1Example": _case1_example,
        "M6Case2Quadrature": _case2_quadrature,
        "M6Case2Explicit": _case2_explicit,
    }
    try:
        build = builders[params.family_id]
    except KeyError:
        raise ValueError(f"not an m=6 family: {params.family_id}") from None
    return build(params)


def _case1_basis(params: FamilyParams) -> SpatialBasis:
    """v = (z1, z2, z3, f1(z3), f2, f3) with (f2, f3) an anti-CR pair."""
    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.5})
    f2, f3 = pair_param(params, "pair", {"pair": "mixed", "lin": 1.0, "wave": 0.3})
    return SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2), Profile1D(f1, 2), f2, f3],
        ConstraintClass.MIXED_3D,
        free_functions={"f1": Profile1D(f1, 2), "f2": f2, "f3": f3},
        acr_indices=(4, 5),
    )


def _case1_rho(params: FamilyParams, basis: SpatialBasis) -> DensityField:
    c5 = params.const("c5")
    c6 = params.const("c6")
    terms = []
    if c5:
        terms.append((c5, basis.components[4]))
    if c6:
        terms.append((c6, basis.components[5]))
    return DensityField(3, terms=terms)


def _case1_general(params: FamilyParams) -> FlowCandidate:
    """Semi-explicit solution with k1 = 0: mu solves the cube-root rate law
    k2^2 (mu')^3 = k2 c5 cos(mu) - k2 c6 sin(mu) + c56 and theta follows
    2 k2 theta' = -1/b11^2."""
    params.ensure_constants(
        {"c12": -1.0, "c13": 0.2, "c23": 0.1, "c5": 0.1, "c6": 0.05, "c56": 2.0}
    )
    c12 = params.const("c12")
    c13 = params.const("c13")
    c23 = params.const("c23")
    c5 = params.const("c5")
    c6 = params.const("c6")
    c56 = params.const("c56")
    window = params.t_window
    t0 = window[0]

    radicand = c12 * c12 - c13 * c13 - c23 * c23
    if radicand <= 0.0:
        raise ComplexBranch(
            f"need c12^2 > c13^2 + c23^2 for a real inner rate (got {radicand:.3g})"
        )
    k2 = 1.0 / math.sqrt(radicand)
    if abs(c56) <= abs(k2) * math.hypot(c5, c6):
        raise LostRegularity("|c56| too small: the inner rate mu' can reach zero")

    def mu_rate(mu):
        return np.cbrt((k2 * c5 * np.cos(mu) - k2 * c6 * np.sin(mu) + c56) / (k2 * k2))

    def b11_sq_of(mu, rate):
        return (c23 * np.cos(mu) + c13 * np.sin(mu) - c12) / rate

    mu_init = float(params.initial_conditions.get("mu", 0.0))
    th_init = float(params.initial_conditions.get("theta", 0.0))
    probe = b11_sq_of(np.linspace(0.0, 2.0 * np.pi, 181), mu_rate(np.linspace(0.0, 2.0 * np.pi, 181)))
    if not np.all(probe > 0.0):
        raise ComplexBranch("b11^2 must stay positive; adjust the constants")

    def rhs(t, u):
        rate = mu_rate(u[0])
        return (rate, -1.0 / (2.0 * k2 * b11_sq_of(u[0], rate)))

    sol = integrate_ivp(rhs, (mu_init, th_init), padded(window), rtol=1e-11, atol=1e-13)
    mu = sol.state_node(0)
    theta = sol.state_node(1)
    # exact rate laws as expression trees, so all derivatives are analytic
    mu_rate_node = cbrt_of((k2 * c5 * cos_of(mu) - k2 * c6 * sin_of(mu) + c56) / (k2 * k2))
    mu._diff_cache = mu_rate_node
    b11_sq = (c23 * cos_of(mu) + c13 * sin_of(mu) - c12) / mu_rate_node
    theta._diff_cache = -1.0 / (2.0 * k2 * b11_sq)

    b11 = sqrt_of(b11_sq)
    b22 = 1.0 / (k2 * mu_rate_node * b11)
    b12 = k2 * (c23 * sin_of(mu) - c13 * cos_of(mu)) * b22
    l1, l2 = cos_of(mu), sin_of(mu)
    b35 = -k2 * mu_rate_node

    zero = Const(0.0)
    B = [
        [b11, b12, l1 * b11 + l2 * b12, -1.0 * l2 * b11 + l1 * b12, zero, zero],
        [zero, b22, l2 * b22, l1 * b22, zero, zero],
        [zero, zero, zero, zero, l1 * b35, -1.0 * l2 * b35],
    ]
    entries = mat_mul_tf(planar_rotation3d(theta), B)
    # bottom row integrates exactly: y5 = -k2 sin(mu), y6 = -k2 cos(mu)
    y_funcs = [None, None, None, None, -k2 * sin_of(mu), -k2 * cos_of(mu)]
    A = TimeMatrix(entries, t0=t0, y_funcs=y_funcs, source="ode-backed")

    basis = _case1_basis(params)
    rho = _case1_rho(params, basis)
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, -0.1, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
        notes={"k2": k2},
    )


def _case1_example(params: FamilyParams) -> FlowCandidate:
    """The c13 = c23 = 0, c12 = -1 reduction: a single autonomous clock with
    8 (theta')^3 + c5 cos(2 theta) + c6 sin(2 theta) + c56 = 0."""
    params.ensure_constants({"c5": 0.1, "c6": 0.0, "c56": 2.0})
    c5 = params.const("c5")
    c6 = params.const("c6")
    c56 = params.const("c56")
    window = params.t_window
    t0 = window[0]
    if abs(c56) <= math.hypot(c5, c6):
        raise LostRegularity("|c56| too small: theta' can reach zero")

    def theta_rate(th):
        return np.cbrt(-(c5 * np.cos(2.0 * th) + c6 * np.sin(2.0 * th) + c56) / 8.0)

    th_init = float(params.initial_conditions.get("theta", 0.0))
    sol = integrate_ivp(lambda t, u: (theta_rate(u[0]),), (th_init,), padded(window), rtol=1e-11, atol=1e-13)
    theta = sol.state_node(0)
    rate_node = cbrt_of(-1.0 * (c5 * cos_of(2.0 * theta) + c6 * sin_of(2.0 * theta) + c56) / 8.0)
    theta._diff_cache = rate_node
    sigma = sign_at(rate_node, t0)
    # the printed matrix normalizes columns by sqrt(theta'); keep it real for
    # either rate sign by scaling with sqrt(|theta'|) (a constant column
    # rescale of the same solution)
    isq = 1.0 / sqrt_of(sigma * rate_node)
    cth, sth = cos_of(theta), sin_of(theta)
    c2, s2 = cos_of(2.0 * theta), sin_of(2.0 * theta)
    zero = Const(0.0)
    entries = [
        [cth * isq, -1.0 * sth * isq, cth * isq, sth * isq, zero, zero],
        [sth * isq, cth * isq, -1.0 * sth * isq, cth * isq, zero, zero],
        [zero, zero, zero, zero, 2.0 * rate_node * c2, 2.0 * rate_node * s2],
    ]
    y_funcs = [None, None, None, None, s2, -1.0 * c2]
    A = TimeMatrix(entries, t0=t0, y_funcs=y_funcs, source="ode-backed")

    basis = _case1_basis(params)
    rho = _case1_rho(params, basis)
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, -0.1, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
        notes={"theta_rate_sign": sigma},
    )


def _case2_basis(params: FamilyParams) -> tuple:
    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.3})
    f2 = profile_param(params, "f2", {"name": "sin", "amp": 0.3})
    f3 = profile_param(params, "f3", {"name": "sin", "amp": 0.3})
    fields = [Profile1D(f1, 0), Profile1D(f2, 1), Profile1D(f3, 2)]
    basis = SpatialBasis(
        3,
        [("coord", 0), ("coord", 1), ("coord", 2)] + fields,
        ConstraintClass.SEPARATED_3D,
        free_functions={"f1": fields[0], "f2": fields[1], "f3": fields[2]},
    )
    return basis, fields


def _case2_rho(params: FamilyParams, f2_field) -> DensityField:
    c1 = params.const("c1")
    c2 = params.const("c2")
    terms = [(c2, f2_field)] if c2 else []
    return DensityField(3, coeffs=[0.0, 0.0, c1], terms=terms)


def _case2_assemble(params, l1, l2, l3, a1, a2, a3, window):
    zero = Const(0.0)
    entries = [
        [a1, zero, zero, zero, zero, l1 * a1],
        [zero, a2, zero, l2 * a2, zero, zero],
        [zero, zero, a3, zero, l3 * a3, zero],
    ]
    A = TimeMatrix(entries, t0=window[0], source="quadrature-backed")
    basis, fields = _case2_basis(params)
    rho = _case2_rho(params, fields[1])
    box = domain_box(params, [-1.0, -1.0, -1.0], [1.0, 1.0, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _shear_chain(params, l3, a3, c16, c24, window, t0):
    """(l1, l2, a1, a2) from l3 and a3 via the quadratic for l1'/l1.

    The discriminant delta = l3'^2 - 4 c16 c24 l3^3 a3^2 must stay
    nonnegative; the branch is picked so the diagonal squares are positive.
    """
    l3p = l3.d
    delta = l3p * l3p - 4.0 * c16 * c24 * (l3 ** 3) * (a3 * a3)
    ts = np.linspace(window[0], padded(window)[1], 257)
    dvals = np.asarray(delta(ts), dtype=float)
    if np.any(dvals < 0.0):
        raise ComplexBranch(f"discriminant turns negative (min {dvals.min():.3g})")
    sig3 = sign_at(l3, t0)
    sqrt_delta = sqrt_of(delta)

    chosen = None
    for branch in (params.constants.get("branch"), 1.0, -1.0):
        if branch is None:
            continue
        branch = float(branch)
        x = (-1.0 * l3p + branch * sqrt_delta) / (2.0 * l3)
        xv = np.asarray(x(ts), dtype=float)
        if np.all(-c16 * xv > 0.0):
            chosen = (branch, x)
            break
    if chosen is None:
        raise ComplexBranch("no branch keeps a1^2 = -c16 / l1' positive on the window")
    branch, x = chosen

    s_node = branch * sqrt_delta / (2.0 * l3)
    k1c = params.const("k1", 1.0)
    growth = antiderivative(s_node, t0, params.gauge("l1_exp"), label="l1_exp")
    from ..timefuncs import exp_of

    l1 = k1c * exp_of(growth) / sqrt_of(sig3 * l3)
    l2 = 1.0 / (l1 * l3)
    a1 = sqrt_of(-c16 / l1.d)
    a2 = sqrt_of(-c24 / l2.d)
    # positivity of the second square is implied by the first on a valid
    # branch, but cheap to confirm
    a2v = np.asarray((-c24 / l2.d)(ts), dtype=float)
    if np.any(a2v <= 0.0):
        raise ComplexBranch("a2^2 = -c24 / l2' not positive on the window")
    return l1, l2, a1, a2, branch


def _case2_quadrature(params: FamilyParams) -> FlowCandidate:
    """Free monotone l3; a3 from the vertical balance quadrature, the rest
    from the shear chain."""
    params.ensure_constants({"c1": -1.0, "c2": 0.2, "c16": -1.0, "c24": 1.0, "k0": 20.0})
    c1 = params.const("c1")
    c2 = params.const("c2")
    c16 = params.const("c16")
    c24 = params.const("c24")
    k0 = params.const("k0")
    window = params.t_window
    t0 = window[0]
    l3 = tf_param(params, "l3", {"name": "exp", "amp": 1.0, "rate": 1.0})

    l3p = l3.d
    check_nonvanishing(l3, padded(window), "l3", Degenerate)
    min_rate = check_nonvanishing(l3p, padded(window), "l3'", QuadratureBreakdown)
    if min_rate < 1e-10:
        raise QuadratureBreakdown("l3' too close to zero for the a3 quadrature")
    sig = sign_at(l3p, t0)
    w = sqrt_of(sig * l3p)
    load = antiderivative((c1 * l3 - c2) / (2.0 * w), t0, k0, label="a3_load")
    a3 = load / w
    check_nonvanishing(a3, padded(window), "a3", Degenerate)

    l1, l2, a1, a2, _branch = _shear_chain(params, l3, a3, c16, c24, window, t0)
    return _case2_assemble(params, l1, l2, l3, a1, a2, a3, window)


def _case2_explicit(params: FamilyParams) -> FlowCandidate:
    """a3 = 1 and l3 = -c2/N^2 + k2 cos(N t) + k3 sin(N t) with c1 = -N^2 < 0
    and c16 c24 < 0; requires l3 > 0 throughout."""
    n_freq = params.const("N", 1.0)
    if n_freq <= 0.0:
        raise Degenerate("N must be positive")
    params.ensure_constants({"c2": -1.0, "c16": 1.0, "c24": -1.0, "k2": 0.5, "k3": 0.0})
    params.constants["c1"] = -n_freq * n_freq
    c2 = params.const("c2")
    c16 = params.const("c16")
    c24 = params.const("c24")
    if c16 * c24 >= 0.0:
        raise ComplexBranch("need c16 c24 < 0 for a nonnegative discriminant")
    k2 = params.const("k2")
    k3 = params.const("k3")
    window = params.t_window
    t0 = window[0]

    from ..timefuncs import Poly

    l3 = (
        Const(-c2 / (n_freq * n_freq))
        + k2 * cos_of(Poly([0.0, n_freq]))
        + k3 * sin_of(Poly([0.0, n_freq]))
    )
    check_positive(l3, padded(window), "l3", Degenerate)
    a3 = Const(1.0)

    l1, l2, a1, a2, _branch = _shear_chain(params, l3, a3, c16, c24, window, t0)
    return _case2_assemble(params, l1, l2, l3, a1, a2, a3, window)
