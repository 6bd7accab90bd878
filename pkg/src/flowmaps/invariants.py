"""Verification of flow candidates against the solution conditions.

A candidate solves the stratified system iff det(d phi) never vanishes and
det(d phi) and the Cauchy-invariant combination h are independent of time
(the density is a function of labels only by construction). The engine
samples a space-time grid, computes the determinant's analytic time
derivative through the column minors, differences h in time, and reports
residuals against tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Optional

import numpy as np

from . import _kernels
from .core import FlowCandidate
from .errors import ConstraintClassMismatch, GridOutsideDomain
from .spatial import ConstraintClass, SpatialBasis

__all__ = [
    "Tolerances",
    "GridSpec",
    "MinorTable",
    "InvariantReport",
    "det_dphi",
    "cauchy_h",
    "minor_table",
    "verify_candidate",
    "check_anti_cr",
]


@dataclass(frozen=True)
class Tolerances:
    """Absolute residual tolerances for the verification verdict."""

    det: float = 1e-8
    h: float = 1e-6
    nondegeneracy: float = 1e-6
    h_step: float = 1e-4

    def to_json(self):
        return {
            "det": self.det,
            "h": self.h,
            "nondegeneracy": self.nondegeneracy,
            "h_step": self.h_step,
        }


@dataclass(frozen=True)
class GridSpec:
    """Sampling plan: per-axis spatial counts plus a time count."""

    spatial: tuple = (5, 5, 5)
    times: int = 7

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse '5x5x7' (2D) or '5x5x5x7' (3D): last figure is time."""
        parts = [int(p) for p in text.lower().split("x")]
        if len(parts) < 2:
            raise ValueError("grid must have at least one spatial and one time count")
        return cls(tuple(parts[:-1]), parts[-1])

    def for_dimension(self, n: int) -> "GridSpec":
        sp = self.spatial
        if len(sp) < n:
            sp = sp + (sp[-1],) * (n - len(sp))
        return GridSpec(tuple(sp[:n]), self.times)


def _basis_arrays(c: FlowCandidate, z: np.ndarray):
    z = np.atleast_2d(np.asarray(z, dtype=float))
    dv = np.ascontiguousarray(c.v.grad(z), dtype=float)
    grho = np.ascontiguousarray(c.rho.grad(z), dtype=float)
    return z, dv, grho


def _kernel_at(c: FlowCandidate, dv, grho, t: float):
    A = np.ascontiguousarray(c.A.eval(t))
    Ap = np.ascontiguousarray(c.A.deriv(t))
    y = np.ascontiguousarray(c.A.antider_row_n(t))
    fn = _kernels.invariants_2d if c.n == 2 else _kernels.invariants_3d
    return fn(A, Ap, y, dv, grho)


def det_dphi(c: FlowCandidate, z, t: float):
    """det(d phi)(z, t) via the minor sum; scalar for a single z."""
    single = np.asarray(z).ndim == 1
    zz, dv, grho = _basis_arrays(c, z)
    det, _, _ = _kernel_at(c, dv, grho, float(t))
    return float(det[0]) if single else det


def cauchy_h(c: FlowCandidate, z, t: float):
    """The Cauchy-invariant combination h; scalar (2D) or 3-vector (3D)."""
    single = np.asarray(z).ndim == 1
    zz, dv, grho = _basis_arrays(c, z)
    _, _, h = _kernel_at(c, dv, grho, float(t))
    if single:
        return float(h[0]) if c.n == 2 else h[0]
    return h


@dataclass
class MinorTable:
    """Column minors of A, gradient minors of v, and the Q/G pairings."""

    p: dict
    g: dict
    Q: dict
    Gv: dict

    @staticmethod
    def _signed(table: dict, idx: tuple):
        return table[idx]


def minor_table(c: FlowCandidate, z, t: float) -> MinorTable:
    """All index-pair/triple minors at one sample, with antisymmetry filled in."""
    z = np.asarray(z, dtype=float)
    A = c.A.eval(t)
    Ap = c.A.deriv(t)
    dv = c.v.grad(z)  # (m, n)
    m, n = c.m, c.n

    p: dict = {}
    g: dict = {}
    Q: dict = {}
    Gv: dict = {}
    if n == 2:
        for i, j in combinations(range(m), 2):
            pij = A[0, i] * A[1, j] - A[0, j] * A[1, i]
            gij = dv[i, 0] * dv[j, 1] - dv[j, 0] * dv[i, 1]
            p[(i, j)], p[(j, i)] = pij, -pij
            g[(i, j)], g[(j, i)] = gij, -gij
    else:
        for tri in combinations(range(m), 3):
            cols = A[:, tri]
            ptri = float(np.linalg.det(cols))
            gtri = float(np.linalg.det(dv[list(tri), :]))
            for perm in permutations(range(3)):
                sign = _perm_sign(perm)
                key = tuple(tri[k] for k in perm)
                p[key] = sign * ptri
                g[key] = sign * gtri
        for i, j in combinations(range(m), 2):
            Gij = np.cross(dv[i], dv[j])
            Gv[(i, j)], Gv[(j, i)] = Gij, -Gij
    apa = Ap.T @ A
    for i, j in combinations(range(m), 2):
        qij = apa[i, j] - apa[j, i]
        Q[(i, j)], Q[(j, i)] = qij, -qij
    return MinorTable(p=p, g=g, Q=Q, Gv=Gv)


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


@dataclass
class InvariantReport:
    """Residuals over the sampled grid plus the pass/fail verdict."""

    family_id: str
    grid_z: np.ndarray
    grid_t: np.ndarray
    det_values: np.ndarray
    det_time_residuals: np.ndarray
    h_values: np.ndarray
    h_time_residuals: np.ndarray
    tolerances: Tolerances
    failures: list = field(default_factory=list)

    @property
    def min_abs_det(self) -> float:
        return float(np.min(np.abs(self.det_values)))

    @property
    def max_det_residual(self) -> float:
        return float(np.max(np.abs(self.det_time_residuals)))

    @property
    def max_h_residual(self) -> float:
        return float(np.max(np.abs(self.h_time_residuals)))

    @property
    def verdict(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "family_id": self.family_id,
            "verdict": "pass" if self.verdict else "fail",
            "min_abs_det": self.min_abs_det,
            "max_det_residual": self.max_det_residual,
            "max_h_residual": self.max_h_residual,
            "tolerances": self.tolerances.to_json(),
            "failures": self.failures,
            "grid": {
                "n_space": int(self.grid_z.shape[0]),
                "n_time": int(len(self.grid_t)),
                "t": self.grid_t.tolist(),
            },
            "samples": {
                "det": self.det_values.tolist(),
                "det_time_residual": self.det_time_residuals.tolist(),
                "h": self.h_values.tolist(),
                "h_time_residual": self.h_time_residuals.tolist(),
            },
        }

    def summary(self) -> str:
        lines = [
            f"family        : {self.family_id}",
            f"verdict       : {'pass' if self.verdict else 'FAIL'}",
            f"min |det|     : {self.min_abs_det:.6e} (tol > {self.tolerances.nondegeneracy:.1e})",
            f"max |d det/dt|: {self.max_det_residual:.6e} (tol {self.tolerances.det:.1e})",
            f"max |d h/dt|  : {self.max_h_residual:.6e} (tol {self.tolerances.h:.1e})",
            f"grid          : {self.grid_z.shape[0]} space x {len(self.grid_t)} time",
        ]
        for f in self.failures:
            lines.append(f"failure       : {f}")
        return "\n".join(lines)


def verify_candidate(
    c: FlowCandidate,
    grid: Optional[GridSpec] = None,
    tol: Optional[Tolerances] = None,
    z_points: Optional[np.ndarray] = None,
    t_points: Optional[np.ndarray] = None,
) -> InvariantReport:
    """Check time-constancy of det(d phi) and h and nondegeneracy on a grid.

    The determinant residual is the analytic d/dt det through the minors;
    the h residual is a central difference with step ``tol.h_step``.
    """
    tol = tol or Tolerances()
    grid = (grid or GridSpec()).for_dimension(c.n)
    if z_points is None:
        z_points = c.domain_hint.grid(grid.spatial)
    z_points = np.atleast_2d(np.asarray(z_points, dtype=float))
    for z in z_points:
        if not c.domain_hint.contains(z):
            raise GridOutsideDomain(f"sample {z} outside domain box")
    if t_points is None:
        t0, t1 = c.t_window
        # keep the h-difference stencil inside the integrated window
        t_points = np.linspace(t0 + tol.h_step, t1 - tol.h_step, grid.times)
    t_points = np.asarray(t_points, dtype=float)

    _, dv, grho = _basis_arrays(c, z_points)
    n_space = z_points.shape[0]
    n_time = len(t_points)

    det_vals = np.empty((n_time, n_space))
    det_res = np.empty((n_time, n_space))
    h_shape = (n_time, n_space) if c.n == 2 else (n_time, n_space, 3)
    h_vals = np.empty(h_shape)
    h_res = np.empty(h_shape)

    for k, t in enumerate(t_points):
        det, ddet, h = _kernel_at(c, dv, grho, float(t))
        _, _, h_plus = _kernel_at(c, dv, grho, float(t) + tol.h_step)
        _, _, h_minus = _kernel_at(c, dv, grho, float(t) - tol.h_step)
        det_vals[k] = det
        det_res[k] = ddet
        h_vals[k] = h
        h_res[k] = (h_plus - h_minus) / (2.0 * tol.h_step)

    failures = []
    abs_det = np.abs(det_vals)
    if abs_det.min() <= tol.nondegeneracy:
        k, s = np.unravel_index(np.argmin(abs_det), abs_det.shape)
        failures.append(
            {
                "condition": "nondegeneracy",
                "min_abs_det": float(abs_det.min()),
                "z": z_points[s].tolist(),
                "t": float(t_points[k]),
            }
        )
    if np.max(np.abs(det_res)) > tol.det:
        k, s = np.unravel_index(np.argmax(np.abs(det_res)), det_res.shape)
        failures.append(
            {
                "condition": "det_time_constancy",
                "max_residual": float(np.max(np.abs(det_res))),
                "z": z_points[s].tolist(),
                "t": float(t_points[k]),
            }
        )
    h_res_flat = np.abs(h_res).reshape(n_time, n_space, -1).max(axis=2)
    if h_res_flat.max() > tol.h:
        k, s = np.unravel_index(np.argmax(h_res_flat), h_res_flat.shape)
        failures.append(
            {
                "condition": "h_time_constancy",
                "max_residual": float(h_res_flat.max()),
                "z": z_points[s].tolist(),
                "t": float(t_points[k]),
            }
        )

    return InvariantReport(
        family_id=c.family_id,
        grid_z=z_points,
        grid_t=t_points,
        det_values=det_vals,
        det_time_residuals=det_res,
        h_values=h_vals,
        h_time_residuals=h_res,
        tolerances=tol,
        failures=failures,
    )


def check_anti_cr(v: SpatialBasis, points) -> float:
    """Max anti-CR residual of the designated pair over the points."""
    if v.constraint_class not in (ConstraintClass.ANTI_CR_2D, ConstraintClass.ANTI_CR_3D):
        raise ConstraintClassMismatch(
            f"anti-CR check requires an anti-CR basis, got {v.constraint_class.value}"
        )
    if v.acr_indices is None:
        raise ConstraintClassMismatch("basis has no designated anti-CR pair")
    res = v.anti_cr_residual(np.atleast_2d(np.asarray(points, dtype=float)))
    return float(np.max(res))
