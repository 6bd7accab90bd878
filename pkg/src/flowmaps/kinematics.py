"""Physical outputs: particle paths, isopycnals, Eulerian fields, pressure.

Paths are pure evaluations of the flow map (never re-integrations of the
velocity field), so they are exact up to the map's own accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .core import FlowCandidate
from .errors import EmptyCurve, NotLinearMap
from .spatial import ConstraintClass

__all__ = [
    "ParticlePath",
    "IsopycnalCurve",
    "particle_path",
    "isopycnal_curve",
    "eulerian_velocity_linear",
    "gerstner_pressure_gradient",
    "gerstner_newton_residual",
    "fit_ellipse_axes",
    "write_path_csv",
]


@dataclass
class ParticlePath:
    """Sampled trajectory of one labelled particle."""

    label: np.ndarray
    times: np.ndarray
    points: np.ndarray  # (n_samples, n)
    period: Optional[float] = None
    truncated: bool = False

    @property
    def closed(self) -> bool:
        return self.period is not None


@dataclass
class IsopycnalCurve:
    """Image under the flow of a constant-density curve in label space."""

    level: float
    time: float
    labels: np.ndarray  # (k, n) points with rho = level
    points: np.ndarray  # (k, n) mapped positions


def particle_path(
    c: FlowCandidate,
    z0,
    t_window: Optional[tuple] = None,
    n_samples: int = 400,
    detect_period: bool = True,
) -> ParticlePath:
    """Uniformly sampled path t -> phi(z0, t) with first-return detection."""
    z0 = np.asarray(z0, dtype=float)
    want = t_window or c.t_window
    t0 = float(want[0])
    t1 = float(want[1])
    truncated = False
    lo, hi = min(c.t_window), max(c.t_window)
    if t0 < lo or t1 > hi:
        t0, t1 = max(t0, lo), min(t1, hi)
        truncated = True
    times = np.linspace(t0, t1, int(n_samples))
    points = np.stack([c.evaluate(z0, t) for t in times])

    period = None
    if detect_period and len(times) > 8:
        period = _first_return_period(c, z0, times, points)
    return ParticlePath(label=z0, times=times, points=points, period=period, truncated=truncated)


def _first_return_period(c, z0, times, points) -> Optional[float]:
    x0 = points[0]
    dist = np.linalg.norm(points - x0, axis=1)
    diameter = float(np.max(dist))
    if diameter <= 0.0:
        return None  # constant path
    left = np.nonzero(dist > 0.5 * diameter)[0]
    if len(left) == 0:
        return None
    start = left[0]
    tol = 1e-4 * max(1.0, diameter)
    for k in range(start + 1, len(times) - 1):
        if dist[k] <= dist[k - 1] and dist[k] <= dist[k + 1] and dist[k] < 0.05 * diameter:
            res = minimize_scalar(
                lambda t: float(np.linalg.norm(c.evaluate(z0, t) - x0)),
                bounds=(times[k - 1], times[k + 1]),
                method="bounded",
                options={"xatol": 1e-10},
            )
            if res.fun < tol:
                return float(res.x - times[0])
    return None


def isopycnal_curve(
    c: FlowCandidate,
    level: float,
    t: float,
    seed_start,
    seed_end,
    n_points: int = 64,
    normal: Optional[Sequence[float]] = None,
    search: float = 2.0,
) -> IsopycnalCurve:
    """Map the rho = level curve found along normals of a seed line.

    For each point of the seed segment, the density is root-found along the
    ``normal`` direction (default: the density gradient direction at the
    segment midpoint) by bisection, then pushed through the map at time t.
    """
    seed_start = np.asarray(seed_start, dtype=float)
    seed_end = np.asarray(seed_end, dtype=float)
    if normal is None:
        mid = 0.5 * (seed_start + seed_end)
        g = np.asarray(c.rho.grad(mid), dtype=float)
        norm = np.linalg.norm(g)
        if norm == 0.0:
            raise EmptyCurve("density gradient vanishes on the seed line")
        normal = g / norm
    normal = np.asarray(normal, dtype=float)

    fractions = np.linspace(0.0, 1.0, int(n_points))
    labels = []
    for frac in fractions:
        p = seed_start + frac * (seed_end - seed_start)

        def offset_of(s):
            return float(c.rho.eval(p + s * normal)) - level

        lo, hi = -search, search
        flo, fhi = offset_of(lo), offset_of(hi)
        if flo == 0.0:
            s_root = lo
        elif fhi == 0.0:
            s_root = hi
        elif flo * fhi > 0.0:
            continue
        else:
            s_root = bisect(offset_of, lo, hi, xtol=1e-12)
        labels.append(p + s_root * normal)
    if not labels:
        raise EmptyCurve(f"level {level} not bracketed along the seed normals")
    labels = np.stack(labels)
    points = np.stack([c.evaluate(z, t) for z in labels])
    return IsopycnalCurve(level=float(level), time=float(t), labels=labels, points=points)


def eulerian_velocity_linear(c: FlowCandidate, t: float, x) -> np.ndarray:
    """u(x, t) = A'(t) A(t)^{-1} x for maps linear in the labels."""
    if c.m != c.n or c.v.constraint_class is not ConstraintClass.IDENTITY:
        raise NotLinearMap(
            f"{c.family_id}: Eulerian closed form needs a square matrix on the identity basis"
        )
    a = c.A.eval(t)
    ap = c.A.deriv(t)
    x = np.asarray(x, dtype=float)
    return ap @ np.linalg.solve(a, x)


def _gerstner_pieces(c: FlowCandidate, z):
    f1 = c.v.free_functions["f1"]
    f2 = c.v.free_functions["f2"]
    z = np.asarray(z, dtype=float)
    v1 = f1.value(z)
    v2 = f2.value(z)
    g1 = f1.grad(z)
    return v1, v2, g1[..., 0], g1[..., 1]


def gerstner_pressure_gradient(c: FlowCandidate, z, t: float):
    """Pressure gradient of the stretched-ellipse wave, scaled by the mean
    density times mu0^2, plus the free-surface obstruction determinant.

    det_G = g1^2 + g2^2 = |grad f1|^2 (f1^2 + f2^2); it must vanish along a
    free surface, which forces the wave pair to be trivial.
    """
    if "mu0" not in c.notes or "c1" not in c.notes:
        raise ValueError("pressure gradient is defined for the stretched-ellipse family")
    c1 = float(c.notes["c1"])
    mu0 = float(c.notes["mu0"])
    z = np.asarray(z, dtype=float)
    z2 = z[..., 1]
    f1, f2, f1x, f1y = _gerstner_pieces(c, z)
    gamma = c1 * c1 - 1.0 / (c1 * c1)
    cs = math.cos(mu0 * t)
    sn = math.sin(mu0 * t)
    inv_c1sq = 1.0 / (c1 * c1)
    c1sq = c1 * c1

    g1 = f1 * f1x - f2 * f1y
    g2 = f1 * f1y + f2 * f1x

    p10 = (
        gamma * g1 * cs * cs
        - gamma * g2 * cs * sn
        + (c1sq * f1 - gamma * z2 * f1y) * cs
        - (gamma * z2 * f1x + c1sq * f2) * sn
        + c1sq * f2 * f1y
        + f1 * f1x * inv_c1sq
    )
    p01 = (
        gamma * g2 * cs * cs
        + gamma * g1 * cs * sn
        + (gamma * z2 * f1x + f2 * inv_c1sq) * cs
        + (f1 * inv_c1sq - gamma * z2 * f1y) * sn
        + f1 * f1y * inv_c1sq
        - c1sq * f2 * f1x
        - gamma * z2
    )
    det_g = g1 * g1 + g2 * g2
    return np.stack([p10, p01], axis=-1), det_g


def gerstner_newton_residual(c: FlowCandidate, z, t: float) -> float:
    """Max mismatch between the printed pressure gradient and the momentum
    balance grad p = -dphi^T (phi'' + rho e2), all scaled by mu0^2."""
    mu0 = float(c.notes["mu0"])
    z = np.asarray(z, dtype=float)
    grad_p, _ = gerstner_pressure_gradient(c, z, t)
    dphi = c.jacobian(z, t)
    acc = c.accel(z, t)
    rho = np.asarray(c.rho.eval(z), dtype=float)
    force = acc.copy()
    force[..., 1] = force[..., 1] + rho
    oracle = -np.einsum("...ij,...i->...j", dphi, force)
    return float(np.max(np.abs(mu0 * mu0 * grad_p - oracle)))


def fit_ellipse_axes(points: np.ndarray) -> tuple:
    """Semi-axes (major, minor) of an ellipse fit by algebraic least squares.

    Fits the conic a x^2 + b x y + c y^2 + d x + e y + f = 0 via the SVD
    null vector of the design matrix, then reads the axes from the centred
    quadratic form.
    """
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    design = np.stack([x * x, x * y, y * y, x, y, np.ones_like(x)], axis=1)
    _, _, vt = np.linalg.svd(design, full_matrices=False)
    a, b, cc, d, e, f = vt[-1]
    M = np.array([[a, b / 2.0], [b / 2.0, cc]])
    center = np.linalg.solve(2.0 * M, [-d, -e])
    k = float(center @ M @ center) - f  # M-form value on the ellipse
    eigvals = np.linalg.eigvalsh(M)
    if k <= 0.0 or np.any(eigvals <= 0.0):
        eigvals, k = -eigvals[::-1], -k
    if k <= 0.0 or np.any(eigvals <= 0.0):
        raise ValueError("points do not lie on an ellipse")
    semi = np.sqrt(k / eigvals)
    return float(np.max(semi)), float(np.min(semi))


def write_path_csv(path: ParticlePath, stream) -> None:
    """CSV with header t,x1,..,xn at 17 significant digits."""
    n = path.points.shape[1]
    header = "t," + ",".join(f"x{k + 1}" for k in range(n))
    stream.write(header + "\n")
    for t, row in zip(path.times, path.points):
        cells = [f"{t:.17g}"] + [f"{val:.17g}" for val in row]
        stream.write(",".join(cells) + "\n")
