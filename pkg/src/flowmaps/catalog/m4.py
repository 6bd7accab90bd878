"""Planar families with four columns: wave-like and explicit power-law maps.

Case 1 couples an anti-CR pair to the rotation through a five-function ODE
system whose equilibrium is the stretched-ellipse (Gerstner-type) wave.
Cases 2 and 3 are explicit power-law matrices on windows excluding t = 0;
case 4 is fully quadrature-driven with a free density profile.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import FlowCandidate, TimeMatrix, mat_mul_tf, rotation2d
from ..errors import Degenerate, InvalidStratification, SingularWindow
from ..odes import antiderivative, component_magnitude_event, integrate_ivp
from ..spatial import (
    ConstraintClass,
    DensityField,
    Profile1D,
    SlopeBlend,
    SpatialBasis,
)
from ..timefuncs import Const, Poly, Power, cos_of, sin_of
from ._shared import check_positive, domain_box, pair_param, padded, profile_param, tf_param
from .params import FamilyParams

__all__ = [
    "build_2d_m4",
    "gerstner_frequency",
    "case1_rhs",
    "case1_initial_state",
    "case1_trajectory",
    "case1_equilibrium_residual",
    "stability_threshold",
    "BLOWUP_THRESHOLD",
]

#: integration stops when |b11| or |s| falls below this
BLOWUP_THRESHOLD = 1e-6


def gerstner_frequency(c0: float, c1: float) -> float:
    """mu0 with mu0^2 = c0 c1 / (c1^4 - 1); requires matching signs."""
    if c1 <= 0.0 or c1 == 1.0:
        raise InvalidStratification(f"need c1 > 0, c1 != 1 (got {c1})")
    mu_sq = c0 * c1 / (c1**4 - 1.0)
    if mu_sq <= 0.0:
        raise InvalidStratification(
            f"sign(c0) must equal sign(c1^4 - 1): c0={c0}, c1={c1} give mu0^2={mu_sq:.3g}"
        )
    return math.sqrt(mu_sq)


def stability_threshold() -> float:
    """Smaller positive root of y^8 - 12 y^4 + 3; boundary of the oscillatory
    spectrum of the wave equilibrium (approximately 0.711)."""
    y4 = (12.0 - math.sqrt(132.0)) / 2.0
    return y4**0.25


def case1_rhs(c0: float):
    """Right-hand side of the case-1 system, state (b11, b12, s, th0, th, mu).

    The five printed rates plus mu' = s; mu is carried because the
    coefficient matrix needs the accumulated inner phase.
    """

    def rhs(t, u):
        b11, b12, s, th0, th, _mu = u
        cth = math.cos(th)
        sth = math.sin(th)
        b11_sq = b11 * b11
        b11_cb = b11_sq * b11
        s_sq = s * s
        db11 = -(c0 * b11 * b12 * cth + 2.0 * b12 * s_sq + c0 * sth) / (4.0 * s)
        db12 = (
            c0 * b11_sq * b12 * sth
            - c0 * b11_cb * b12 * b12 * cth
            - 2.0 * c0 * b11 * cth
            + 2.0 * (b11_sq * b11_sq - 1.0) * s_sq
        ) / (4.0 * b11_cb * s)
        ds = c0 * (b11 * b12 * cth - sth) / (2.0 * b11)
        dth0 = (
            2.0 * c0 * c0 * b11_sq * b12 * sth * sth
            + c0 * c0 * b11_sq * b12
            - 8.0 * b12 * s_sq * s_sq
            + (4.0 * c0 * b11_cb * b12 * s * th0 - 10.0 * c0 * b11 * b12 * s_sq) * cth
            + (
                4.0 * c0 * b11_sq * s * th0
                + 2.0 * (3.0 * c0 * b11_sq * b11_sq - c0) * s_sq
                - (3.0 * c0 * c0 * b11_cb * b12 * b12 + 5.0 * c0 * c0 * b11) * cth
            )
            * sth
        ) / (16.0 * b11_cb * s_sq)
        return (db11, db12, ds, dth0, th0, s)

    return rhs


def case1_equilibrium_residual(c0: float, c1: float) -> float:
    """Norm of the case-1 rates at the wave equilibrium (c1, 0, mu0, 0, 0)."""
    mu0 = gerstner_frequency(c0, c1)
    rates = case1_rhs(c0)(0.0, (c1, 0.0, mu0, 0.0, 0.0, 0.0))
    return float(np.linalg.norm(rates[:5]))


def build_2d_m4(params: FamilyParams) -> FlowCandidate:
    builders = {
        "M4Case1General": _case1_general,
        "M4Case1Gerstner": _case1_gerstner,
        "M4Case2Explicit": _case2_explicit,
        "M4Case3Explicit": _case3_explicit,
        "M4Case4Quadrature": _case4_quadrature,
    }
    try:
        build = builders[params.family_id]
    except KeyError:
        raise ValueError(f"not an m=4 family: {params.family_id}") from None
    return build(params)


def _acr_basis(params: FamilyParams, default_pair=None) -> SpatialBasis:
    default_pair = default_pair or {"pair": "exp_wave", "scale": 1.0}
    f1, f2 = pair_param(params, "pair", default_pair)
    return SpatialBasis(
        2,
        [("coord", 0), ("coord", 1), f1, f2],
        ConstraintClass.ANTI_CR_2D,
        free_functions={"f1": f1, "f2": f2},
        acr_indices=(2, 3),
    )


def case1_initial_state(params: FamilyParams):
    """Initial (b11, b12, s, theta0, theta, mu); s defaults to mu0 + s_delta."""
    c0 = params.const("c0", -1.0)
    init = dict(params.initial_conditions)
    b11_0 = float(init.get("b11", 0.8))
    b12_0 = float(init.get("b12", 0.0))
    th0_0 = float(init.get("theta0", 0.0))
    th_0 = float(init.get("theta", 0.0))
    mu_0 = float(init.get("mu", 0.0))
    if "s" in init:
        s_0 = float(init["s"])
    else:
        s_0 = gerstner_frequency(c0, b11_0) + float(init.get("s_delta", 0.0))
    if b11_0 <= 0.0:
        raise Degenerate("b11(t0) must be positive")
    if abs(s_0) <= BLOWUP_THRESHOLD:
        raise Degenerate("s(t0) must be away from zero")
    return (b11_0, b12_0, s_0, th0_0, th_0, mu_0)


def case1_trajectory(params: FamilyParams, rtol: float = 1e-10, atol: float = 1e-12):
    """Integrate the case-1 system with blow-up events on the padded window."""
    c0 = params.const("c0", -1.0)
    y0 = case1_initial_state(params)
    events = [
        component_magnitude_event(0, BLOWUP_THRESHOLD, kind="b11_zero"),
        component_magnitude_event(2, BLOWUP_THRESHOLD, kind="s_zero"),
    ]
    return integrate_ivp(case1_rhs(c0), y0, padded(params.t_window), rtol=rtol, atol=atol, events=events)


def _case1_general(params: FamilyParams) -> FlowCandidate:
    """ODE-backed wave: A = R(theta) B(b11, b12, mu) integrated numerically.

    Integration halts (and the candidate window shrinks) when |b11| or |s|
    reaches the blow-up threshold.
    """
    c0 = params.const("c0", -1.0)
    window = params.t_window
    t0 = window[0]
    sol = case1_trajectory(params)
    b11 = sol.state_node(0)
    b12 = sol.state_node(1)
    theta = sol.state_node(4)
    mu = sol.state_node(5)
    cmu, smu = cos_of(mu), sin_of(mu)
    inner = [
        [b11, b12, cmu * b11 + smu * b12, cmu * b12 - smu * b11],
        [Const(0.0), 1.0 / b11, smu / b11, cmu / b11],
    ]
    entries = mat_mul_tf(rotation2d(theta), inner)

    t_end = window[1]
    notes = {}
    if sol.truncated:
        t_end = max(t0, sol.t_end - 1e-3)
        notes["blow_up_time"] = sol.t_end
        notes["blow_up_events"] = sol.events
    A = TimeMatrix(entries, t0=t0, source="ode-backed", t_window=(t0, t_end))
    rho = DensityField(2, coeffs=[0.0, c0])
    box = domain_box(params, [-math.pi, -2.0], [math.pi, -0.1])
    return FlowCandidate(
        A, _acr_basis(params), rho, box,
        family_id=params.family_id, t_window=(t0, t_end),
        params=params.to_dict(), notes=notes,
    )


def _case1_gerstner(params: FamilyParams) -> FlowCandidate:
    """Stretched-ellipse wave: diag(c1, 1/c1) times a rotating pair block."""
    c0 = params.const("c0", -1.0)
    c1 = params.const("c1", 0.8)
    mu0 = float(params.constants["mu0"]) if "mu0" in params.constants else gerstner_frequency(c0, c1)
    window = params.t_window
    phase = Poly([0.0, mu0])
    cmu, smu = cos_of(phase), sin_of(phase)
    entries = [
        [Const(c1), Const(0.0), c1 * cmu, -c1 * smu],
        [Const(0.0), Const(1.0 / c1), smu * (1.0 / c1), cmu * (1.0 / c1)],
    ]
    A = TimeMatrix(entries, t0=window[0], source="closed-form")
    rho = DensityField(2, coeffs=[0.0, c0])
    box = domain_box(params, [-math.pi, -2.0], [math.pi, -0.1])
    return FlowCandidate(
        A, _acr_basis(params), rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
        notes={"mu0": mu0, "c1": c1},
    )


def _window_excluding_zero(params: FamilyParams):
    t0, t1 = params.t_window
    if t0 <= 0.0 <= t1 or t0 == 0.0 or t1 == 0.0:
        raise SingularWindow(f"window [{t0}, {t1}] touches the singular time t=0")
    return (t0, t1)


def _case2_explicit(params: FamilyParams) -> FlowCandidate:
    """A = diag(10/c0, c0/10) [[t^-2,0,0,t^3],[0,t^2,t^-3,0]], rho = c0 z2."""
    c0 = params.const("c0", 1.0)
    if c0 == 0.0:
        raise Degenerate("c0 must be nonzero")
    window = _window_excluding_zero(params)
    k = 10.0 / c0
    entries = [
        [Power(k, -2.0), Const(0.0), Const(0.0), Power(k, 3.0)],
        [Const(0.0), Power(1.0 / k, 2.0), Power(1.0 / k, -3.0), Const(0.0)],
    ]
    A = TimeMatrix(entries, t0=window[0], source="closed-form")
    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.3})
    f2 = profile_param(params, "f2", {"name": "sin", "amp": 0.3})
    basis = SpatialBasis(
        2,
        [("coord", 0), ("coord", 1), Profile1D(f1, 0), Profile1D(f2, 1)],
        ConstraintClass.SEPARATED_2D,
        free_functions={"f1": Profile1D(f1, 0), "f2": Profile1D(f2, 1)},
    )
    rho = DensityField(2, coeffs=[0.0, c0])
    box = domain_box(params, [-1.0, -1.0], [1.0, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _case3_explicit(params: FamilyParams) -> FlowCandidate:
    """A = [[0,0,t^-1/3,(9/20)c1 t^4/3],[-(9/20)c1 t^2,-t^1/3,0,0]], rho = c1 z1."""
    c1 = params.const("c1", 1.0)
    window = _window_excluding_zero(params)
    if window[0] < 0.0:
        raise SingularWindow("fractional powers need t > 0")
    g = 0.45 * c1  # 9/20
    entries = [
        [Const(0.0), Const(0.0), Power(1.0, -1.0 / 3.0), Power(g, 4.0 / 3.0)],
        [Power(-g, 2.0), Power(-1.0, 1.0 / 3.0), Const(0.0), Const(0.0)],
    ]
    A = TimeMatrix(entries, t0=window[0], source="closed-form")
    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.5})
    f2 = profile_param(params, "f2", {"name": "poly", "coeffs": [0.0, 2.0]})
    v3 = SlopeBlend(f1, f2, ax_var=0, ax_lin=1)  # z2 f1'(z1) + f2(z1)
    v4 = Profile1D(f1, 0)
    basis = SpatialBasis(
        2,
        [("coord", 0), ("coord", 1), v3, v4],
        ConstraintClass.PARABOLIC_2D,
        free_functions={"f1": v4, "f2": Profile1D(f2, 0)},
    )
    rho = DensityField(2, coeffs=[c1, 0.0])
    box = domain_box(params, [-1.0, -1.0], [1.0, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )


def _case4_quadrature(params: FamilyParams) -> FlowCandidate:
    """A = R(theta) [[b1,b2,b3,b4],[0,1/b1,0,0]], rho = c0 f2(z2).

    b2, b3, b4 come from the three running integrals driven by theta and
    the accumulated y1 = int b1 sin(theta).
    """
    c0 = params.const("c0", -1.0)
    c12 = params.const("c12", 0.0)
    c13 = params.const("c13", 0.5)
    c14 = params.const("c14", 0.0)
    window = params.t_window
    t0 = window[0]
    b1 = tf_param(params, "b1", {"name": "affine_trig", "const": 1.0, "sin_amp": 0.2})
    theta = tf_param(params, "theta", {"name": "poly", "coeffs": [0.0, 1.0]})
    check_positive(b1, padded(window), "b1", Degenerate)

    y1 = antiderivative(b1 * sin_of(theta), t0, params.gauge("y1"), label="y1")
    inv_b1_sq = 1.0 / (b1 * b1)
    b2 = b1 * antiderivative((2.0 * theta.d - c12) * inv_b1_sq, t0, params.gauge("b2"), label="b2")
    b3 = -1.0 * b1 * antiderivative(Const(c13) * inv_b1_sq, t0, params.gauge("b3"), label="b3")
    b4 = -1.0 * b1 * antiderivative((c0 * y1 + c14) * inv_b1_sq, t0, params.gauge("b4"), label="b4")

    inner = [[b1, b2, b3, b4], [Const(0.0), 1.0 / b1, Const(0.0), Const(0.0)]]
    A = TimeMatrix(mat_mul_tf(rotation2d(theta), inner), t0=t0, source="quadrature-backed")

    f1 = profile_param(params, "f1", {"name": "sin", "amp": 0.5})
    f2 = profile_param(params, "f2", {"name": "poly", "coeffs": [0.0, 1.0]})
    f2_field = Profile1D(f2, 1)
    basis = SpatialBasis(
        2,
        [("coord", 0), ("coord", 1), Profile1D(f1, 1), f2_field],
        ConstraintClass.SEPARATED_2D,
        free_functions={"f1": Profile1D(f1, 1), "f2": f2_field},
    )
    rho = DensityField(2, terms=[(c0, f2_field)])
    box = domain_box(params, [-1.0, -1.0], [1.0, 1.0])
    return FlowCandidate(
        A, basis, rho, box,
        family_id=params.family_id, t_window=window, params=params.to_dict(),
    )
