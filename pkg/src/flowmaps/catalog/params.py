"""Family parameters: a serializable bag of constants and function specs.

Parameter files are TOML (hand-written presets) or JSON (machine output);
both map onto the same nested dict shape:

    family_id = "M4Case1Gerstner"
    [constants]
    c0 = -1.0
    [time_functions.theta]
    name = "poly"
    coeffs = [0.0, 1.0]
    [spatial_functions.f1]
    name = "sin"
    amp = 0.5
    [gauges]
    a12 = 0.0
    [domain]
    lo = [-1.0, -1.0]
    hi = [1.0, 1.0]

Free functions are referenced by registry name only; no user code is ever
loaded from a parameter file.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

__all__ = ["FamilyParams", "load_params_file", "deep_merge", "set_by_path"]


@dataclass
class FamilyParams:
    family_id: str
    constants: dict = field(default_factory=dict)
    time_functions: dict = field(default_factory=dict)
    spatial_functions: dict = field(default_factory=dict)
    initial_conditions: dict = field(default_factory=dict)
    gauges: dict = field(default_factory=dict)
    t_window: tuple = (0.0, 6.0)
    domain: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "family_id": self.family_id,
            "constants": copy.deepcopy(self.constants),
            "time_functions": copy.deepcopy(self.time_functions),
            "spatial_functions": copy.deepcopy(self.spatial_functions),
            "initial_conditions": copy.deepcopy(self.initial_conditions),
            "gauges": copy.deepcopy(self.gauges),
            "t_window": list(self.t_window),
        }
        if self.domain is not None:
            out["domain"] = copy.deepcopy(self.domain)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FamilyParams":
        data = copy.deepcopy(data)
        fid = data.pop("family_id")
        window = tuple(data.pop("t_window", (0.0, 6.0)))
        return cls(
            family_id=fid,
            constants=data.pop("constants", {}),
            time_functions=data.pop("time_functions", {}),
            spatial_functions=data.pop("spatial_functions", {}),
            initial_conditions=data.pop("initial_conditions", {}),
            gauges=data.pop("gauges", {}),
            t_window=window,
            domain=data.pop("domain", None),
        )

    def const(self, key: str, default=None) -> float:
        val = self.constants.get(key, default)
        if val is None:
            raise KeyError(f"{self.family_id}: missing constant {key!r}")
        return float(val)

    def ensure_constants(self, defaults: dict) -> None:
        """Fill missing constants so every consumer sees the same values."""
        for key, val in defaults.items():
            self.constants.setdefault(key, val)

    def gauge(self, key: str, default: float = 0.0) -> float:
        return float(self.gauges.get(key, default))


def deep_merge(base: dict, override: dict) -> dict:
    """Nested dict merge; override wins, sub-dicts merge recursively."""
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def set_by_path(data: dict, path: str, value) -> None:
    """Assign into a nested dict via 'constants.c0'-style dotted paths."""
    keys = path.split(".")
    node = data
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ValueError(f"path {path!r} crosses a non-dict value")
    node[keys[-1]] = value


def load_params_file(path) -> dict:
    """Read a TOML or JSON parameter file into a plain dict."""
    path = Path(path)
    text = path.read_bytes()
    if path.suffix.lower() == ".json":
        return json.loads(text.decode("utf-8"))
    if path.suffix.lower() in (".toml", ".tml"):
        return tomllib.loads(text.decode("utf-8"))
    # sniff: TOML first, JSON as fallback
    try:
        return tomllib.loads(text.decode("utf-8"))
    except Exception:
        return json.loads(text.decode("utf-8"))
