"""Spatial ingredients of a separated flow map: basis vectors and density.

A basis ``v`` maps labels z in R^n to R^m. Components are either bare
coordinates or registered scalar fields with hand-written analytic
gradients; no symbolic algebra and no finite differencing on the evaluation
path. Free-function slots in parameter files refer to registry names.
"""

from __future__ import annotations

import enum
from typing import Optional, Sequence

import numpy as np

from .timefuncs import TimeFunc, time_function

__all__ = [
    "ConstraintClass",
    "DensityInterpretation",
    "ScalarField",
    "Profile1D",
    "ExpTrig",
    "Separable",
    "LinComb",
    "SlopeBlend",
    "SpatialBasis",
    "DensityField",
    "spatial_function",
    "acr_pair",
    "Box",
]


class ConstraintClass(enum.Enum):
    IDENTITY = "identity"
    ANTI_CR_2D = "anti_cr_2d"
    SEPARATED_2D = "separated_2d"
    PARABOLIC_2D = "parabolic_2d"
    COLUMNAR = "columnar"
    ANTI_CR_3D = "anti_cr_3d"
    SEPARATED_3D = "separated_3d"
    PARABOLIC_3D = "parabolic_3d"
    MIXED_3D = "mixed_3d"


class DensityInterpretation(enum.Enum):
    #: carried value is g * ln(rho_hat)
    LOG_DENSITY = "log_density"
    #: carried value is g * rho_hat / rho_mean
    LINEARIZED_DENSITY = "linearized_density"


class ScalarField:
    """Scalar function of the label z with an analytic gradient.

    ``z`` has shape (..., n); ``value`` returns (...,) and ``grad`` (..., n).
    """

    def value(self, z):
        raise NotImplementedError

    def grad(self, z):
        raise NotImplementedError


class Profile1D(ScalarField):
    """profile(z[axis]) for a 1-variable profile with exact derivatives."""

    def __init__(self, profile: TimeFunc, axis: int):
        self.profile = profile
        self.axis = int(axis)

    def value(self, z):
        return self.profile(z[..., self.axis])

    def grad(self, z):
        out = np.zeros_like(z, dtype=float)
        out[..., self.axis] = self.profile.d1(z[..., self.axis])
        return out

    def d1(self, x):
        return self.profile.d1(x)

    def d2(self, x):
        return self.profile.d2(x)


class ExpTrig(ScalarField):
    """scale * exp(z[ax_exp]) * cos/sin(z[ax_trig]).

    The cos/sin pair of these is the canonical wave-like anti-CR pair.
    """

    def __init__(self, kind: str, scale: float = 1.0, ax_trig: int = 0, ax_exp: int = 1):
        if kind not in ("cos", "sin"):
            raise ValueError("kind must be 'cos' or 'sin'")
        self.kind = kind
        self.scale = float(scale)
        self.ax_trig = int(ax_trig)
        self.ax_exp = int(ax_exp)

    def value(self, z):
        trig = np.cos if self.kind == "cos" else np.sin
        return self.scale * np.exp(z[..., self.ax_exp]) * trig(z[..., self.ax_trig])

    def grad(self, z):
        e = self.scale * np.exp(z[..., self.ax_exp])
        a = z[..., self.ax_trig]
        out = np.zeros_like(z, dtype=float)
        if self.kind == "cos":
            out[..., self.ax_trig] = -e * np.sin(a)
            out[..., self.ax_exp] = e * np.cos(a)
        else:
            out[..., self.ax_trig] = e * np.cos(a)
            out[..., self.ax_exp] = e * np.sin(a)
        return out


class Separable(ScalarField):
    """fa(z[ax_a]) * fb(z[ax_b])."""

    def __init__(self, fa: TimeFunc, ax_a: int, fb: TimeFunc, ax_b: int):
        self.fa, self.ax_a = fa, int(ax_a)
        self.fb, self.ax_b = fb, int(ax_b)

    def value(self, z):
        return self.fa(z[..., self.ax_a]) * self.fb(z[..., self.ax_b])

    def grad(self, z):
        a, b = z[..., self.ax_a], z[..., self.ax_b]
        out = np.zeros_like(z, dtype=float)
        out[..., self.ax_a] = self.fa.d1(a) * self.fb(b)
        out[..., self.ax_b] = self.fa(a) * self.fb.d1(b)
        return out


class LinComb(ScalarField):
    """const + sum of weighted fields (fields may overlap in axes)."""

    def __init__(self, terms: Sequence[tuple], const: float = 0.0):
        self.terms = [(float(w), f) for w, f in terms]
        self.const = float(const)

    def value(self, z):
        out = np.full(z.shape[:-1], self.const, dtype=float)
        for w, f in self.terms:
            out = out + w * f.value(z)
        return out

    def grad(self, z):
        out = np.zeros_like(z, dtype=float)
        for w, f in self.terms:
            out = out + w * f.grad(z)
        return out


class SlopeBlend(ScalarField):
    """z[ax_lin] * f'(z[ax_var]) + g(z[ax_var]) — the parabolic-case component."""

    def __init__(self, f: TimeFunc, g: TimeFunc, ax_var: int = 0, ax_lin: int = 1):
        self.f, self.g = f, g
        self.ax_var, self.ax_lin = int(ax_var), int(ax_lin)

    def value(self, z):
        x = z[..., self.ax_var]
        return z[..., self.ax_lin] * self.f.d1(x) + self.g(x)

    def grad(self, z):
        x = z[..., self.ax_var]
        out = np.zeros_like(z, dtype=float)
        out[..., self.ax_var] = z[..., self.ax_lin] * self.f.d2(x) + self.g.d1(x)
        out[..., self.ax_lin] = self.f.d1(x)
        return out


class _Coord(ScalarField):
    def __init__(self, axis: int):
        self.axis = int(axis)

    def value(self, z):
        return z[..., self.axis].astype(float, copy=True)

    def grad(self, z):
        out = np.zeros_like(z, dtype=float)
        out[..., self.axis] = 1.0
        return out


class _ConstField(ScalarField):
    def __init__(self, c: float):
        self.c = float(c)

    def value(self, z):
        return np.full(z.shape[:-1], self.c, dtype=float)

    def grad(self, z):
        return np.zeros_like(z, dtype=float)


# -- registry ---------------------------------------------------------------

_PROFILE_NAMES = ("const", "poly", "sin", "cos", "exp", "linear")


def _profile(spec) -> TimeFunc:
    """1-variable profile; reuses the time-function registry."""
    if isinstance(spec, dict) and spec.get("name") == "linear":
        return time_function({"name": "poly", "coeffs": [spec.get("intercept", 0.0), spec.get("slope", 1.0)]})
    return time_function(spec)


def spatial_function(spec, axis: int = 0) -> ScalarField:
    """Build a registered scalar field.

    1-variable specs ({"name": "sin", ...}) apply to ``axis`` unless they
    carry their own "axis" key. 2-variable specs: "exp_cos", "exp_sin",
    "wave2d", "const".
    """
    if isinstance(spec, (int, float)):
        return _ConstField(float(spec))
    if not isinstance(spec, dict) or "name" not in spec:
        raise ValueError(f"bad spatial function spec: {spec!r}")
    name = spec["name"]
    if name == "const":
        return _ConstField(spec.get("value", 0.0))
    if name in ("exp_cos", "exp_sin"):
        return ExpTrig(
            "cos" if name == "exp_cos" else "sin",
            scale=spec.get("scale", 1.0),
            ax_trig=spec.get("ax_trig", 0),
            ax_exp=spec.get("ax_exp", 1),
        )
    if name == "wave2d":
        axes = spec.get("axes", (0, 1))
        fa = _profile({"name": "sin", "amp": spec.get("amp", 1.0), "omega": spec.get("kx", 1.0), "phase": spec.get("px", 0.0)})
        fb = _profile({"name": "cos", "amp": 1.0, "omega": spec.get("ky", 1.0), "phase": spec.get("py", 0.0)})
        return Separable(fa, axes[0], fb, axes[1])
    if name in _PROFILE_NAMES:
        ax = spec.get("axis", axis)
        clean = {k: v for k, v in spec.items() if k != "axis"}
        return Profile1D(_profile(clean), ax)
    raise ValueError(f"unknown spatial function {name!r}")


def acr_pair(spec, ax_trig: int = 0, ax_exp: int = 1):
    """Build a registered anti-CR pair (f1, f2) over axes (ax_trig, ax_exp).

    Pairs satisfy f1_x + f2_y = 0 and f1_y - f2_x = 0 by construction.
    """
    if not isinstance(spec, dict) or "pair" not in spec:
        raise ValueError(f"bad anti-CR pair spec: {spec!r}")
    kind = spec["pair"]
    ax_trig = spec.get("ax_trig", ax_trig)
    ax_exp = spec.get("ax_exp", ax_exp)
    if kind == "exp_wave":
        s = spec.get("scale", 1.0)
        return (
            ExpTrig("cos", s, ax_trig, ax_exp),
            ExpTrig("sin", s, ax_trig, ax_exp),
        )
    if kind == "linear":
        s = spec.get("scale", 1.0)
        f1 = LinComb([(s, _Coord(ax_trig))])
        f2 = LinComb([(-s, _Coord(ax_exp))])
        return f1, f2
    if kind == "mixed":
        lin = spec.get("lin", 1.0)
        wave = spec.get("wave", 0.3)
        f1 = LinComb([(lin, _Coord(ax_trig)), (wave, ExpTrig("cos", 1.0, ax_trig, ax_exp))])
        f2 = LinComb([(-lin, _Coord(ax_exp)), (wave, ExpTrig("sin", 1.0, ax_trig, ax_exp))])
        return f1, f2
    raise ValueError(f"unknown anti-CR pair {kind!r}")


# -- basis and density -------------------------------------------------------

class SpatialBasis:
    """The vector v(z) of a separated map, with analytic gradients."""

    def __init__(
        self,
        n: int,
        components: Sequence,
        constraint_class: ConstraintClass,
        free_functions: Optional[dict] = None,
        acr_indices: Optional[tuple] = None,
        acr_axes: tuple = (0, 1),
    ):
        self.n = int(n)
        self.components = []
        for comp in components:
            if isinstance(comp, tuple) and comp[0] == "coord":
                self.components.append(_Coord(comp[1]))
            elif isinstance(comp, ScalarField):
                self.components.append(comp)
            else:
                raise TypeError(f"bad basis component: {comp!r}")
        self.m = len(self.components)
        self.constraint_class = constraint_class
        self.free_functions = dict(free_functions or {})
        #: indices (i, j) of the designated anti-CR pair inside components
        self.acr_indices = acr_indices
        self.acr_axes = acr_axes

    def eval(self, z):
        """v(z); z shape (..., n) -> (..., m)."""
        z = np.asarray(z, dtype=float)
        vals = [c.value(z) for c in self.components]
        return np.stack(vals, axis=-1)

    def grad(self, z):
        """Rows grad v^i; z shape (..., n) -> (..., m, n)."""
        z = np.asarray(z, dtype=float)
        grads = [c.grad(z) for c in self.components]
        return np.stack(grads, axis=-2)

    def anti_cr_residual(self, z):
        """|f1_x + f2_y| + |f1_y - f2_x| for the designated pair; (...)."""
        if self.acr_indices is None:
            raise ValueError("basis has no designated anti-CR pair")
        z = np.asarray(z, dtype=float)
        i, j = self.acr_indices
        ax, ay = self.acr_axes
        g1 = self.components[i].grad(z)
        g2 = self.components[j].grad(z)
        return np.abs(g1[..., ax] + g2[..., ay]) + np.abs(g1[..., ay] - g2[..., ax])


class DensityField:
    """Stratification rho(z) = const + coeffs . z + sum of profile terms."""

    def __init__(
        self,
        n: int,
        coeffs: Optional[Sequence[float]] = None,
        const: float = 0.0,
        terms: Sequence[tuple] = (),
        interpretation: DensityInterpretation = DensityInterpretation.LOG_DENSITY,
    ):
        self.n = int(n)
        self.coeffs = np.zeros(self.n) if coeffs is None else np.asarray(coeffs, dtype=float)
        if self.coeffs.shape != (self.n,):
            raise ValueError("coeffs must have length n")
        self.const = float(const)
        self.terms = [(float(w), f) for w, f in terms]
        self.interpretation = interpretation

    def eval(self, z):
        z = np.asarray(z, dtype=float)
        out = self.const + z @ self.coeffs
        for w, f in self.terms:
            out = out + w * f.value(z)
        return out

    def grad(self, z):
        z = np.asarray(z, dtype=float)
        out = np.broadcast_to(self.coeffs, z.shape).copy()
        for w, f in self.terms:
            out = out + w * f.grad(z)
        return out

    @property
    def is_zero(self) -> bool:
        return self.const == 0.0 and not self.terms and not np.any(self.coeffs)


class Box:
    """Axis-aligned label-space box used as a candidate's trust region."""

    def __init__(self, lo: Sequence[float], hi: Sequence[float]):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise ValueError("invalid box bounds")

    @property
    def n(self) -> int:
        return len(self.lo)

    def contains(self, z, rtol: float = 1e-12) -> bool:
        z = np.asarray(z, dtype=float)
        pad = rtol * np.maximum(1.0, np.abs(self.hi - self.lo))
        return bool(np.all(z >= self.lo - pad) and np.all(z <= self.hi + pad))

    def grid(self, counts) -> np.ndarray:
        """Regular inclusive grid, flattened to (N, n)."""
        counts = [int(c) for c in (counts if np.iterable(counts) else [counts] * self.n)]
        if len(counts) != self.n:
            raise ValueError("counts must match box dimension")
        axes = [np.linspace(self.lo[k], self.hi[k], counts[k]) for k in range(self.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def to_json(self):
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["lo"], obj["hi"])
