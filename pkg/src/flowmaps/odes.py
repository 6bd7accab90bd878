"""Initial-value integration with dense output, events, and antiderivatives.

All time-dependent coefficients that are not closed-form are backed either
by a dense ODE solution (adaptive RK45) or by a cached quadrature
accumulator. Blow-up is handled as a recorded event, never as a crash: a
solution stays queryable on the part of the window it actually covers.
"""

from __future__ import annotations

import bisect
import math
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import IntegrationWindowExceeded, NonFiniteIntegrand, StepCollapse
from .timefuncs import CallableTimeFunc, Product, Scale, TimeFunc, as_timefunc

__all__ = [
    "Event",
    "DenseSolution",
    "integrate_ivp",
    "solve_sl",
    "Antiderivative",
    "component_magnitude_event",
]


class Event:
    """Scalar event g(t, y) whose zero crossing stops or marks integration."""

    def __init__(self, kind: str, fn: Callable, direction: float = 0.0, terminal: bool = True):
        self.kind = kind
        self.fn = fn
        self.direction = direction
        self.terminal = terminal

    def _scipy_event(self):
        def g(t, y, _fn=self.fn):
            return _fn(t, y)

        g.terminal = self.terminal
        g.direction = self.direction
        return g


def component_magnitude_event(index: int, threshold: float, kind: Optional[str] = None) -> Event:
    """Fires when |y[index]| drops below ``threshold``."""
    return Event(
        kind or f"component{index}_below_{threshold:g}",
        lambda t, y: abs(y[index]) - threshold,
        direction=-1.0,
        terminal=True,
    )


class DenseSolution:
    """Dense-output trajectory on the window actually covered.

    Immutable after construction, hence safe for concurrent evaluation.
    """

    def __init__(self, sol, rhs, t0, t_end, t_target, events, status):
        self._sol = sol
        self.rhs = rhs
        self.t0 = float(t0)
        self.t_end = float(t_end)
        self.t_target = float(t_target)
        #: list of (time, kind) in the order they fired
        self.events = list(events)
        self.status = status
        self._pad = 1e-9 * max(1.0, abs(self.t_end - self.t0))

    @property
    def truncated(self) -> bool:
        return self.t_end != self.t_target

    @property
    def window(self):
        return (self.t0, self.t_end)

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = min(self.t0, self.t_end), max(self.t0, self.t_end)
        if np.any(t < lo - self._pad) or np.any(t > hi + self._pad):
            raise IntegrationWindowExceeded(
                f"t={t} outside integrated window [{lo}, {hi}]"
            )

    def __call__(self, t):
        """State at t; shape (nstates,) for scalar t, (nstates, k) for arrays."""
        self._check(t)
        return self._sol(t)

    def component(self, i: int, t):
        self._check(t)
        out = self._sol(t)
        return out[i]

    def deriv(self, t):
        """Right-hand side along the trajectory."""
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return np.asarray(self.rhs(float(t_arr), self(float(t_arr))), dtype=float)
        states = self(t_arr)
        return np.stack([np.asarray(self.rhs(tv, states[:, k]), dtype=float) for k, tv in enumerate(t_arr)], axis=-1)

    def state_node(self, i: int) -> CallableTimeFunc:
        """Component i as a TimeFunc; first derivative comes from the RHS."""
        value = CallableTimeFunc(lambda t: self.component(i, t), label=f"state{i}")
        value._diff_cache = CallableTimeFunc(
            lambda t: _component_of(self.deriv(t), i), label=f"state{i}'"
        )
        return value


def _component_of(arr, i):
    arr = np.asarray(arr)
    return arr[i] if arr.ndim else arr


def integrate_ivp(
    rhs: Callable,
    y0: Sequence[float],
    t_window,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    events: Sequence[Event] = (),
    max_step: float = np.inf,
) -> DenseSolution:
    """Adaptive RK45 with dense output; events halt and are recorded.

    Step collapse (scipy status -1) is reported as a 'step_collapse' event at
    the last reached time — a blow-up candidate, not an exception.
    """
    t0, t1 = float(t_window[0]), float(t_window[1])
    y0 = np.asarray(y0, dtype=float)
    scipy_events = [e._scipy_event() for e in events]
    res = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method="RK45",
        dense_output=True,
        rtol=rtol,
        atol=atol,
        events=scipy_events or None,
        max_step=max_step,
    )
    fired = []
    if scipy_events:
        for spec, times in zip(events, res.t_events):
            for te in np.atleast_1d(times):
                fired.append((float(te), spec.kind))
        fired.sort()
    t_end = float(res.t[-1])
    if res.status == -1:
        fired.append((t_end, "step_collapse"))
    elif res.status not in (0, 1):  # pragma: no cover - scipy contract
        raise StepCollapse(res.message)
    return DenseSolution(res.sol, rhs, t0, t_end, t1, fired, res.status)


def solve_sl(q, t_window, rtol: float = 1e-11, atol: float = 1e-13):
    """Two independent solutions of y'' + q(t) y = 0 with Wronskian 1.

    Initial data (y, y')(t0) = (1, 0) and (0, 1). Returns the pair of dense
    solutions; states are (y, y').
    """
    q = as_timefunc(q)

    def rhs(t, y):
        qt = float(q(t))
        return (y[1], -qt * y[0])

    sol1 = integrate_ivp(rhs, (1.0, 0.0), t_window, rtol=rtol, atol=atol)
    sol2 = integrate_ivp(rhs, (0.0, 1.0), t_window, rtol=rtol, atol=atol)
    return sol1, sol2


def sl_timefunc(sol: DenseSolution, q: TimeFunc) -> TimeFunc:
    """Wrap a solve_sl solution as a TimeFunc with analytic y'' = -q y."""
    y = CallableTimeFunc(lambda t: sol.component(0, t), label="sl")
    yp = CallableTimeFunc(lambda t: sol.component(1, t), label="sl'")
    yp._diff_cache = Scale(-1.0, Product(as_timefunc(q), y))
    y._diff_cache = yp
    return y


class Antiderivative(TimeFunc):
    """Cached accumulator for F(t) = gauge + integral of f from t0 to t.

    Panel values between previously visited times are cached, so repeated
    and nearby queries are cheap; the integrand is assumed piecewise smooth.
    """

    def __init__(self, integrand, t0: float = 0.0, gauge: float = 0.0, label: str = "accum"):
        self.integrand = as_timefunc(integrand) if isinstance(integrand, (TimeFunc, int, float)) else integrand
        if not isinstance(self.integrand, TimeFunc):
            self.integrand = CallableTimeFunc(self.integrand, label=label + "_integrand")
        self.t0 = float(t0)
        self.gauge = float(gauge)
        self.label = label
        self._ts = [self.t0]
        self._Fs = [self.gauge]

    def _scalar_fn(self):
        f = self.integrand
        return lambda s: float(f(s))

    def _extend(self, t: float) -> float:
        idx = bisect.bisect_left(self._ts, t)
        if idx < len(self._ts) and self._ts[idx] == t:
            return self._Fs[idx]
        # integrate from the nearest cached node
        cand = []
        if idx > 0:
            cand.append(idx - 1)
        if idx < len(self._ts):
            cand.append(idx)
        near = min(cand, key=lambda k: abs(self._ts[k] - t))
        base_t, base_F = self._ts[near], self._Fs[near]
        val, _err = quad(self._scalar_fn(), base_t, t, epsabs=1e-13, epsrel=1e-12, limit=200)
        if not math.isfinite(val):
            raise NonFiniteIntegrand(f"{self.label}: integral from {base_t} to {t} is not finite")
        F = base_F + val
        self._ts.insert(idx, t)
        self._Fs.insert(idx, F)
        return F

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if t_arr.ndim == 0:
            return self._extend(float(t_arr))
        flat = t_arr.ravel()
        order = np.argsort(flat, kind="stable")
        out = np.empty_like(flat)
        for k in order:
            out[k] = self._extend(float(flat[k]))
        return out.reshape(t_arr.shape)

    def diff(self):
        return self.integrand

    def __repr__(self):
        return f"Antiderivative({self.label}, t0={self.t0}, gauge={self.gauge})"


def antiderivative(f, t0: float = 0.0, gauge: float = 0.0, label: str = "accum") -> TimeFunc:
    """Antiderivative of f with value ``gauge`` at t0.

    Closed form when the integrand supports it, cached quadrature otherwise.
    """
    if isinstance(f, TimeFunc):
        closed = f.antiderivative(t0, gauge)
        if closed is not None:
            return closed
    return Antiderivative(f, t0, gauge, label=label)
