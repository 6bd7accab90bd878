"""Scalar functions of time with exact derivatives.

Every coefficient a_ij(t) of a flow map's time matrix is represented as a
``TimeFunc``: a small expression tree over closed-form leaves (polynomials,
trig, exponentials, powers) plus opaque leaves backed by ODE dense output or
quadrature accumulators. ``diff()`` returns the derivative as another tree,
so derivatives of any order are available without finite differencing as
long as the leaves can supply them.

The module also hosts the registry of named time functions that family
parameter files may reference.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "TimeFunc",
    "Const",
    "Poly",
    "Power",
    "CallableTimeFunc",
    "T",
    "as_timefunc",
    "cos_of",
    "sin_of",
    "exp_of",
    "sqrt_of",
    "cbrt_of",
    "time_function",
    "TIME_FUNCTION_NAMES",
]


class TimeFunc:
    """A scalar function of time. Accepts floats or numpy arrays."""

    def __call__(self, t):
        raise NotImplementedError

    def diff(self) -> "TimeFunc":
        raise NotImplementedError

    @property
    def d(self) -> "TimeFunc":
        cached = getattr(self, "_diff_cache", None)
        if cached is None:
            cached = self.diff()
            self._diff_cache = cached
        return cached

    def d1(self, t):
        return self.d(t)

    def d2(self, t):
        return self.d.d(t)

    def antiderivative(self, t0: float = 0.0, gauge: float = 0.0) -> Optional["TimeFunc"]:
        """Closed-form antiderivative F with F(t0) = gauge, or None."""
        raw = self._raw_antiderivative()
        if raw is None:
            return None
        return raw + Const(gauge - float(raw(t0)))

    def _raw_antiderivative(self) -> Optional["TimeFunc"]:
        return None

    # -- operator sugar (with constant folding to keep trees small) --------

    def __add__(self, other):
        return tf_add(self, as_timefunc(other))

    def __radd__(self, other):
        return tf_add(as_timefunc(other), self)

    def __sub__(self, other):
        return tf_add(self, tf_scale(-1.0, as_timefunc(other)))

    def __rsub__(self, other):
        return tf_add(as_timefunc(other), tf_scale(-1.0, self))

    def __neg__(self):
        return tf_scale(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return tf_scale(float(other), self)
        return tf_mul(self, as_timefunc(other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return tf_scale(float(other), self)
        return tf_mul(as_timefunc(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return tf_scale(1.0 / float(other), self)
        return Quotient(self, as_timefunc(other))

    def __rtruediv__(self, other):
        return Quotient(as_timefunc(other), self)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 2:
            raise ValueError("only integer powers >= 2; use sqrt_of/Quotient otherwise")
        out = self
        for _ in range(n - 1):
            out = Product(out, self)
        return out


def as_timefunc(x) -> TimeFunc:
    if isinstance(x, TimeFunc):
        return x
    if isinstance(x, (int, float, np.floating)):
        return Const(float(x))
    raise TypeError(f"cannot interpret {x!r} as a time function")


def tf_add(a: "TimeFunc", b: "TimeFunc") -> "TimeFunc":
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if isinstance(a, Const) and a.value == 0.0:
        return b
    if isinstance(b, Const) and b.value == 0.0:
        return a
    return Sum(a, b)


def tf_scale(c: float, f: "TimeFunc") -> "TimeFunc":
    if c == 0.0:
        return Const(0.0)
    if c == 1.0:
        return f
    if isinstance(f, Const):
        return Const(c * f.value)
    if isinstance(f, Scale):
        return tf_scale(c * f.c, f.f)
    return Scale(c, f)


def tf_mul(a: "TimeFunc", b: "TimeFunc") -> "TimeFunc":
    if isinstance(a, Const):
        return tf_scale(a.value, b)
    if isinstance(b, Const):
        return tf_scale(b.value, a)
    return Product(a, b)


class Const(TimeFunc):
    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, t):
        return self.value * np.ones_like(t, dtype=float)

    def diff(self):
        return Const(0.0)

    def _raw_antiderivative(self):
        return Poly([0.0, self.value])

    def __repr__(self):
        return f"Const({self.value})"


class Poly(TimeFunc):
    """Polynomial with ascending coefficients: c[0] + c[1] t + ..."""

    def __init__(self, coeffs: Sequence[float]):
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.coeffs.ndim != 1 or len(self.coeffs) == 0:
            raise ValueError("coeffs must be a non-empty 1D sequence")

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def diff(self):
        if len(self.coeffs) == 1:
            return Const(0.0)
        return Poly(np.polynomial.polynomial.polyder(self.coeffs))

    def _raw_antiderivative(self):
        return Poly(np.polynomial.polynomial.polyint(self.coeffs))

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"


#: The identity function t -> t.
T = Poly([0.0, 1.0])


class Power(TimeFunc):
    """amp * t**exponent on t > 0 (or t < 0 for integer exponents)."""

    def __init__(self, amp: float, exponent: float):
        self.amp = float(amp)
        self.exponent = float(exponent)

    def __call__(self, t):
        return self.amp * np.power(t, self.exponent)

    def diff(self):
        if self.exponent == 0.0 or self.amp == 0.0:
            return Const(0.0)
        return Power(self.amp * self.exponent, self.exponent - 1.0)

    def _raw_antiderivative(self):
        if self.exponent == -1.0:
            return None
        return Power(self.amp / (self.exponent + 1.0), self.exponent + 1.0)

    def __repr__(self):
        return f"Power({self.amp}, {self.exponent})"


class Sum(TimeFunc):
    def __init__(self, a: TimeFunc, b: TimeFunc):
        self.a, self.b = a, b

    def __call__(self, t):
        return self.a(t) + self.b(t)

    def diff(self):
        return tf_add(self.a.d, self.b.d)

    def _raw_antiderivative(self):
        fa = self.a._raw_antiderivative()
        fb = self.b._raw_antiderivative()
        if fa is None or fb is None:
            return None
        return Sum(fa, fb)


class Scale(TimeFunc):
    def __init__(self, c: float, f: TimeFunc):
        self.c, self.f = float(c), f

    def __call__(self, t):
        return self.c * self.f(t)

    def diff(self):
        return tf_scale(self.c, self.f.d)

    def _raw_antiderivative(self):
        ff = self.f._raw_antiderivative()
        return None if ff is None else Scale(self.c, ff)


class Product(TimeFunc):
    def __init__(self, a: TimeFunc, b: TimeFunc):
        self.a, self.b = a, b

    def __call__(self, t):
        return self.a(t) * self.b(t)

    def diff(self):
        return tf_add(tf_mul(self.a.d, self.b), tf_mul(self.a, self.b.d))


class Quotient(TimeFunc):
    def __init__(self, num: TimeFunc, den: TimeFunc):
        self.num, self.den = num, den

    def __call__(self, t):
        return self.num(t) / self.den(t)

    def diff(self):
        # (f/g)' = (f' - (f/g) g') / g
        return Quotient(tf_add(self.num.d, tf_scale(-1.0, tf_mul(self, self.den.d))), self.den)


class _Unary(TimeFunc):
    """g(u(t)) for an elementary g whose derivative is expressible as a tree."""

    def __init__(self, fn: Callable, child: TimeFunc, outer_diff: Callable[[TimeFunc], TimeFunc], label: str):
        self.fn = fn
        self.child = child
        self.outer_diff = outer_diff
        self.label = label

    def __call__(self, t):
        return self.fn(self.child(t))

    def diff(self):
        return tf_mul(self.outer_diff(self.child), self.child.d)

    def _raw_antiderivative(self):
        # Only sin/cos/exp over an affine argument have a closed form here.
        aff = _affine_coeffs(self.child)
        if aff is None:
            return None
        b, a = aff  # child = b + a t
        if a == 0.0:
            return Poly([0.0, float(self.fn(b))])
        if self.label == "sin":
            return Scale(-1.0 / a, cos_of(self.child))
        if self.label == "cos":
            return Scale(1.0 / a, sin_of(self.child))
        if self.label == "exp":
            return Scale(1.0 / a, exp_of(self.child))
        return None

    def __repr__(self):
        return f"{self.label}({self.child!r})"


def _affine_coeffs(f: TimeFunc):
    """(b, a) if f(t) = b + a t exactly, else None."""
    if isinstance(f, Const):
        return (f.value, 0.0)
    if isinstance(f, Poly) and len(f.coeffs) <= 2:
        c = list(f.coeffs) + [0.0]
        return (float(c[0]), float(c[1]))
    return None


def cos_of(u) -> TimeFunc:
    return _Unary(np.cos, as_timefunc(u), lambda v: Scale(-1.0, sin_of(v)), "cos")


def sin_of(u) -> TimeFunc:
    return _Unary(np.sin, as_timefunc(u), cos_of, "sin")


def exp_of(u) -> TimeFunc:
    return _Unary(np.exp, as_timefunc(u), exp_of, "exp")


def sqrt_of(u) -> TimeFunc:
    return _Unary(np.sqrt, as_timefunc(u), lambda v: Quotient(Const(0.5), sqrt_of(v)), "sqrt")


def cbrt_of(u) -> TimeFunc:
    # Real cube root; valid for negative arguments as well.
    return _Unary(
        np.cbrt,
        as_timefunc(u),
        lambda v: Quotient(Const(1.0 / 3.0), Product(cbrt_of(v), cbrt_of(v))),
        "cbrt",
    )


class CallableTimeFunc(TimeFunc):
    """Opaque leaf around a plain callable (dense ODE output, state slices).

    ``diff_node`` supplies the derivative as a tree when the caller knows it;
    otherwise differentiation falls back to central differences.
    """

    def __init__(self, fn: Callable, diff_node: Optional[TimeFunc] = None, label: str = "callable"):
        self.fn = fn
        self._diff_node = diff_node
        self.label = label

    def __call__(self, t):
        return self.fn(t)

    def diff(self):
        if self._diff_node is not None:
            return self._diff_node
        return _FiniteDiff(self)

    def __repr__(self):
        return f"CallableTimeFunc({self.label})"


class _FiniteDiff(TimeFunc):
    """Central-difference derivative; last resort for opaque leaves."""

    _H = 1e-5

    def __init__(self, f: TimeFunc):
        self.f = f

    def __call__(self, t):
        h = self._H * np.maximum(1.0, np.abs(t))
        return (self.f(t + h) - self.f(t - h)) / (2.0 * h)

    def diff(self):
        return _FiniteDiff(self)


# -- registry of named closed-form time functions ---------------------------

def _build_const(value=1.0):
    return Const(value)


def _build_poly(coeffs=(0.0, 1.0)):
    return Poly(list(coeffs))


def _build_sin(amp=1.0, omega=1.0, phase=0.0):
    return Scale(amp, sin_of(Poly([phase, omega])))


def _build_cos(amp=1.0, omega=1.0, phase=0.0):
    return Scale(amp, cos_of(Poly([phase, omega])))


def _build_exp(amp=1.0, rate=1.0):
    return Scale(amp, exp_of(Poly([0.0, rate])))


def _build_power(amp=1.0, exponent=1.0):
    return Power(amp, exponent)


def _build_affine_trig(const=0.0, slope=0.0, sin_amp=0.0, cos_amp=0.0, omega=1.0):
    """const + slope*t + sin_amp*sin(omega t) + cos_amp*cos(omega t)."""
    out: TimeFunc = Poly([const, slope])
    if sin_amp:
        out = out + _build_sin(sin_amp, omega)
    if cos_amp:
        out = out + _build_cos(cos_amp, omega)
    return out


_TIME_REGISTRY = {
    "const": _build_const,
    "poly": _build_poly,
    "sin": _build_sin,
    "cos": _build_cos,
    "exp": _build_exp,
    "power": _build_power,
    "affine_trig": _build_affine_trig,
}

TIME_FUNCTION_NAMES = tuple(sorted(_TIME_REGISTRY))


def time_function(spec) -> TimeFunc:
    """Build a registered time function from {"name": ..., **params}.

    Bare numbers are shorthand for constants.
    """
    if isinstance(spec, (int, float)):
        return Const(float(spec))
    if isinstance(spec, TimeFunc):
        return spec
    if not isinstance(spec, dict) or "name" not in spec:
        raise ValueError(f"bad time function spec: {spec!r}")
    kwargs = {k: v for k, v in spec.items() if k != "name"}
    name = spec["name"]
    try:
        builder = _TIME_REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown time function {name!r}; known: {TIME_FUNCTION_NAMES}") from None
    kwargs = {k: (tuple(v) if isinstance(v, list) else v) for k, v in kwargs.items()}
    return builder(**kwargs)


def nonvanishing_on(f: TimeFunc, t0: float, t1: float, n: int = 257) -> bool:
    """Sign-definite on a sampling of [t0, t1]."""
    ts = np.linspace(t0, t1, n)
    vals = np.asarray(f(ts), dtype=float)
    return bool(np.all(vals > 0) or np.all(vals < 0))


def sampled_min(f: TimeFunc, t0: float, t1: float, n: int = 257) -> float:
    ts = np.linspace(t0, t1, n)
    return float(np.min(np.asarray(f(ts), dtype=float)))


def _self_test():  # pragma: no cover - dev aid
    f = Scale(2.0, sin_of(Poly([0.3, 1.5]))) + Power(1.0, 2.0)
    t = 0.7
    h = 1e-6
    fd = (f(t + h) - f(t - h)) / (2 * h)
    assert abs(f.d1(t) - fd) < 1e-7
    print("timefuncs self-test ok", f.d1(t), fd)


if __name__ == "__main__":  # pragma: no cover
    _self_test()
