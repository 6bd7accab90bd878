"""Exact separated Lagrangian flow maps for stratified incompressible flow.

The map phi(z, t) = A(t) v(z) solves the buoyancy-coupled incompressible
equations exactly when det(d phi) never vanishes and both det(d phi) and
the Cauchy-invariant combination h are independent of time. This package
constructs a catalog of such families, verifies the conditions numerically
on space-time grids, and turns candidates into particle paths, isopycnals,
Eulerian fields, and stability experiments.
"""

__version__ = "0.1.0"

from . import catalog
from ._kernels import backend as kernel_backend
from .core import FlowCandidate, TimeMatrix, apply_H_transform, evaluate_map
from .invariants import (
    GridSpec,
    InvariantReport,
    Tolerances,
    cauchy_h,
    check_anti_cr,
    det_dphi,
    minor_table,
    verify_candidate,
)
from .kinematics import (
    IsopycnalCurve,
    ParticlePath,
    eulerian_velocity_linear,
    gerstner_pressure_gradient,
    isopycnal_curve,
    particle_path,
)
from .odes import Antiderivative, DenseSolution, Event, antiderivative, integrate_ivp, solve_sl
from .spatial import Box, ConstraintClass, DensityField, DensityInterpretation, SpatialBasis

__all__ = [
    "__version__",
    "catalog",
    "kernel_backend",
    "FlowCandidate",
    "TimeMatrix",
    "apply_H_transform",
    "evaluate_map",
    "GridSpec",
    "InvariantReport",
    "Tolerances",
    "cauchy_h",
    "check_anti_cr",
    "det_dphi",
    "minor_table",
    "verify_candidate",
    "IsopycnalCurve",
    "ParticlePath",
    "eulerian_velocity_linear",
    "gerstner_pressure_gradient",
    "isopycnal_curve",
    "particle_path",
    "Antiderivative",
    "DenseSolution",
    "Event",
    "antiderivative",
    "integrate_ivp",
    "solve_sl",
    "Box",
    "ConstraintClass",
    "DensityField",
    "DensityInterpretation",
    "SpatialBasis",
]
