"""Separated Lagrangian flow maps phi(z, t) = A(t) v(z).

``TimeMatrix`` holds the n x m coefficient matrix as an array of time
functions with exact first and second derivatives plus the running
antiderivatives y_i of its bottom row (y_i' = a_{ni}), which the invariant
computation needs. ``FlowCandidate`` bundles the matrix with a spatial basis
and a density field; everything is immutable after construction.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import SingularTransform
from .odes import antiderivative
from .spatial import Box, DensityField, SpatialBasis
from .timefuncs import Const, TimeFunc, as_timefunc, cos_of, sin_of

__all__ = [
    "TimeMatrix",
    "FlowCandidate",
    "evaluate_map",
    "apply_H_transform",
    "rotation2d",
    "planar_rotation3d",
    "mat_mul_tf",
    "const_matrix",
]

SOURCE_CLOSED = "closed-form"
SOURCE_ODE = "ode-backed"
SOURCE_QUAD = "quadrature-backed"


def _as_entry_grid(entries) -> list:
    grid = []
    for row in entries:
        grid.append([as_timefunc(e) for e in row])
    width = {len(r) for r in grid}
    if len(width) != 1:
        raise ValueError("ragged entry matrix")
    return grid


def mat_mul_tf(a, b) -> list:
    """Product of two matrices of time functions (or numbers)."""
    a = _as_entry_grid(a)
    b = _as_entry_grid(b)
    inner = len(b)
    if len(a[0]) != inner:
        raise ValueError("shape mismatch")
    out = []
    for i in range(len(a)):
        row = []
        for j in range(len(b[0])):
            acc: TimeFunc = Const(0.0)
            for k in range(inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def const_matrix(arr) -> list:
    return [[Const(float(x)) for x in row] for row in np.atleast_2d(arr)]


def rotation2d(theta: TimeFunc) -> list:
    c, s = cos_of(theta), sin_of(theta)
    return [[c, -1.0 * s], [s, c]]


def planar_rotation3d(theta: TimeFunc) -> list:
    c, s = cos_of(theta), sin_of(theta)
    one, zero = Const(1.0), Const(0.0)
    return [[c, -1.0 * s, zero], [s, c, zero], [zero, zero, one]]


class TimeMatrix:
    """n x m matrix A(t) with derivative and bottom-row antiderivative access."""

    def __init__(
        self,
        entries,
        t0: float = 0.0,
        gauges: Optional[Sequence[float]] = None,
        y_funcs: Optional[Sequence[Optional[TimeFunc]]] = None,
        source: str = SOURCE_CLOSED,
        t_window: Optional[tuple] = None,
    ):
        self.entries = _as_entry_grid(entries)
        self.n = len(self.entries)
        self.m = len(self.entries[0])
        if self.n not in (2, 3):
            raise ValueError("spatial dimension must be 2 or 3")
        self.t0 = float(t0)
        self.source = source
        self.t_window = t_window
        gauges = [0.0] * self.m if gauges is None else list(gauges)
        if len(gauges) != self.m:
            raise ValueError("need one gauge constant per column")
        self.gauges = [float(g) for g in gauges]
        bottom = self.entries[self.n - 1]
        self.y = []
        for i in range(self.m):
            given = None if y_funcs is None else y_funcs[i]
            if given is not None:
                self.y.append(given)
            else:
                self.y.append(antiderivative(bottom[i], self.t0, self.gauges[i], label=f"y{i + 1}"))

    def eval(self, t) -> np.ndarray:
        return np.array([[float(e(t)) for e in row] for row in self.entries])

    def deriv(self, t) -> np.ndarray:
        return np.array([[float(e.d1(t)) for e in row] for row in self.entries])

    def deriv2(self, t) -> np.ndarray:
        return np.array([[float(e.d2(t)) for e in row] for row in self.entries])

    def antider_row_n(self, t) -> np.ndarray:
        return np.array([float(yi(t)) for yi in self.y])


class FlowCandidate:
    """A flow map A(t) v(z), its density, and the box it is trusted on."""

    def __init__(
        self,
        A: TimeMatrix,
        v: SpatialBasis,
        rho: DensityField,
        domain_hint: Box,
        family_id: str = "custom",
        t_window: tuple = (0.0, 1.0),
        gauge_constants: Optional[dict] = None,
        params: Optional[dict] = None,
        notes: Optional[dict] = None,
    ):
        if A.m != v.m:
            raise ValueError(f"column mismatch: A has m={A.m}, v has m={v.m}")
        if A.n != v.n:
            raise ValueError(f"dimension mismatch: A has n={A.n}, v has n={v.n}")
        if rho.n != A.n or domain_hint.n != A.n:
            raise ValueError("density/domain dimension mismatch")
        self.A = A
        self.v = v
        self.rho = rho
        self.n = A.n
        self.m = A.m
        self.domain_hint = domain_hint
        self.family_id = family_id
        self.t_window = (float(t_window[0]), float(t_window[1]))
        self.gauge_constants = dict(gauge_constants or {})
        self.params = params
        self.notes = dict(notes or {})

    def evaluate(self, z, t):
        """phi(z, t) = A(t) v(z); z of shape (..., n) -> (..., n)."""
        a = self.A.eval(t)
        vals = self.v.eval(z)
        return vals @ a.T

    def velocity(self, z, t):
        """phi'(z, t) = A'(t) v(z)."""
        return self.v.eval(z) @ self.A.deriv(t).T

    def accel(self, z, t):
        """phi''(z, t) = A''(t) v(z)."""
        return self.v.eval(z) @ self.A.deriv2(t).T

    def jacobian(self, z, t):
        """d phi = A(t) dv(z); (..., n, n)."""
        a = self.A.eval(t)
        dv = self.v.grad(z)
        return np.einsum("ik,...kj->...ij", a, dv)

    def to_json(self) -> dict:
        return {
            "family_id": self.family_id,
            "n": self.n,
            "m": self.m,
            "params": self.params,
            "domain_hint": self.domain_hint.to_json(),
            "gauge_constants": self.gauge_constants,
            "t_window": list(self.t_window),
        }


def evaluate_map(candidate: FlowCandidate, z, t):
    """Map labels through the candidate's flow at time t."""
    return candidate.evaluate(z, t)


def apply_H_transform(candidate: FlowCandidate, H) -> FlowCandidate:
    """Column-mixing change (A, v) -> (A H^-1, H v); the map is unchanged.

    H must be a well-conditioned constant m x m matrix.
    """
    H = np.asarray(H, dtype=float)
    m = candidate.m
    if H.shape != (m, m):
        raise SingularTransform(f"H must be {m}x{m}, got {H.shape}")
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond >= 1e12:
        raise SingularTransform(f"H is singular or near-singular (cond={cond:.3g})")
    Hinv = np.linalg.inv(H)

    A = candidate.A
    new_entries = []
    for i in range(A.n):
        row = []
        for j in range(m):
            acc: TimeFunc = Const(0.0)
            for k in range(m):
                if Hinv[k, j] != 0.0:
                    acc = acc + Hinv[k, j] * A.entries[i][k]
            row.append(acc)
        new_entries.append(row)
    # y_i transform with the same coefficients: they stay antiderivatives
    # of the new bottom row, so nothing is re-integrated.
    new_y = []
    for j in range(m):
        acc = Const(0.0)
        for k in range(m):
            if Hinv[k, j] != 0.0:
                acc = acc + Hinv[k, j] * A.y[k]
        new_y.append(acc)
    new_A = TimeMatrix(
        new_entries,
        t0=A.t0,
        gauges=[0.0] * m,
        y_funcs=new_y,
        source=A.source,
        t_window=A.t_window,
    )

    from .spatial import LinComb  # local import to avoid cycle at module load

    new_components = []
    for i in range(m):
        terms = [(H[i, j], candidate.v.components[j]) for j in range(m) if H[i, j] != 0.0]
        new_components.append(LinComb(terms))
    is_identity = np.array_equal(H, np.eye(m))
    new_v = SpatialBasis(
        candidate.v.n,
        new_components,
        candidate.v.constraint_class,
        free_functions=candidate.v.free_functions if is_identity else {},
        acr_indices=candidate.v.acr_indices if is_identity else None,
        acr_axes=candidate.v.acr_axes,
    )
    notes = dict(candidate.notes)
    notes["transformed"] = True
    return FlowCandidate(
        new_A,
        new_v,
        candidate.rho,
        candidate.domain_hint,
        family_id=candidate.family_id,
        t_window=candidate.t_window,
        gauge_constants=candidate.gauge_constants,
        params=None,
        notes=notes,
    )
