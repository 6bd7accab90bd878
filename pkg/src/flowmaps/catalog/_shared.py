"""Helpers shared by the family constructors."""

from __future__ import annotations

import numpy as np

from ..errors import Degenerate, FlowmapsError
from ..spatial import Box, Profile1D, spatial_function, acr_pair
from ..timefuncs import TimeFunc, time_function
from .params import FamilyParams

#: integration/evaluation pad beyond the requested window, so the
#: h-residual difference stencil never leaves the valid range
WINDOW_PAD = 0.05


def padded(window) -> tuple:
    t0, t1 = window
    return (t0, t1 + WINDOW_PAD)


def tf_param(params: FamilyParams, key: str, default) -> TimeFunc:
    """Named time-function slot with a registry-spec default."""
    return time_function(params.time_functions.get(key, default))


def sf_param(params: FamilyParams, key: str, default, axis: int = 0):
    """Named spatial-function slot."""
    return spatial_function(params.spatial_functions.get(key, default), axis=axis)


def profile_param(params: FamilyParams, key: str, default) -> TimeFunc:
    """1-variable profile used inside composite basis components."""
    spec = params.spatial_functions.get(key, default)
    if isinstance(spec, dict) and spec.get("name") == "linear":
        spec = {"name": "poly", "coeffs": [spec.get("intercept", 0.0), spec.get("slope", 1.0)]}
    return time_function(spec)


def pair_param(params: FamilyParams, key: str, default, ax_trig: int = 0, ax_exp: int = 1):
    return acr_pair(params.spatial_functions.get(key, default), ax_trig=ax_trig, ax_exp=ax_exp)


def domain_box(params: FamilyParams, default_lo, default_hi) -> Box:
    if params.domain:
        return Box(params.domain["lo"], params.domain["hi"])
    return Box(default_lo, default_hi)


def check_nonvanishing(tf: TimeFunc, window, name: str, exc=Degenerate, n: int = 257):
    ts = np.linspace(window[0], window[1], n)
    vals = np.asarray(tf(ts), dtype=float)
    if not (np.all(vals > 0.0) or np.all(vals < 0.0)):
        raise exc(f"{name} must be nonvanishing on the window, range [{vals.min():.3g}, {vals.max():.3g}]")
    return float(np.min(np.abs(vals)))


def check_positive(tf: TimeFunc, window, name: str, exc: type = FlowmapsError, n: int = 257):
    ts = np.linspace(window[0], window[1], n)
    vals = np.asarray(tf(ts), dtype=float)
    if not np.all(vals > 0.0):
        raise exc(f"{name} must stay positive on the window, min {vals.min():.3g}")
    return float(np.min(vals))


def sign_at(tf: TimeFunc, t: float) -> float:
    val = float(tf(t))
    if val == 0.0:
        raise Degenerate("sign undetermined: value is zero at window start")
    return 1.0 if val > 0.0 else -1.0
