"""Configuration documents: JSON, ordinary frequencies in Hz.

A document looks like::

    {
      "schema_version": 1,
      "system":    {"omega_a": 1e10, ..., "temperature": 0.01},
      "effective": {"G_m": 7e5, "G_c": 2.7e6, "delta_m_eff": -2.015e7, "delta_c_eff": 2.011e7},
      "sweep":     {...},      # optional, see hybrident.sweep
      "spectrum":  {...}       # optional, see hybrident.sweep
    }

``effective`` may be replaced by a ``drive`` block (powers and bare
detunings), in which case effective couplings and detunings come from the
self-consistent steady state. Every frequency-like key (``omega_*``,
``gamma_*``, ``g_*``, ``G_*``, ``delta_*``, ``rabi_omega``) is nu = omega/2pi
in Hz and is multiplied by 2pi exactly once, here.
"""

from __future__ import annotations

import copy
import json
import math
from typing import Any, Optional

from .errors import ConfigError, DomainError
from .model import SystemParams
from .steady_state import DriveSpec, SteadyState, apply_steady_state, solve_self_consistent

SCHEMA_VERSION = 1
TWO_PI = 2 * math.pi

SYSTEM_KEYS = {
    "omega_a": "hz",
    "omega_m": "hz",
    "omega_b1": "hz",
    "omega_b2": "hz",
    "lambda_c": "m",
    "gamma_a": "hz",
    "gamma_m": "hz",
    "gamma_c": "hz",
    "gamma_b1": "hz",
    "gamma_b2": "hz",
    "g_ma": "hz",
    "g_b1b2": "hz",
    "g_mb1": "hz",
    "g_cb2": "hz",
    "delta_a": "hz",
    "temperature": "K",
}
EFFECTIVE_KEYS = {"G_m": "hz", "G_c": "hz", "delta_m_eff": "hz", "delta_c_eff": "hz"}
DRIVE_KEYS = {
    "P_0": "W",
    "rabi_omega": "hz",
    "radius": "m",
    "spin_count": "1",
    "P_L": "W",
    "omega_d2": "hz",
    "delta_m": "hz",
    "delta_c": "hz",
}
DRIVE_REQUIRED = ("P_L", "delta_m", "delta_c")
BLOCKS = {"system": SYSTEM_KEYS, "effective": EFFECTIVE_KEYS, "drive": DRIVE_KEYS}
TOP_LEVEL = {"schema_version", "system", "effective", "drive", "sweep", "spectrum", "name"}

# Parameter table shared by every preset; couplings at the fig2c optimum.
REFERENCE_SYSTEM = {
    "omega_a": 10e9,
    "omega_m": 10e9,
    "omega_b1": 20.15e6,
    "omega_b2": 20.11e6,
    "lambda_c": 1550e-9,
    "gamma_a": 1e6,
    "gamma_m": 1e6,
    "gamma_c": 1e6,
    "gamma_b1": 100.0,
    "gamma_b2": 100.0,
    "g_ma": 1.5e6,
    "g_b1b2": 2.4e6,
    "g_mb1": 0.1,
    "g_cb2": 100.0,
    "delta_a": -20.15e6,
    "temperature": 0.01,
}
REFERENCE_EFFECTIVE = {
    "G_m": 0.7e6,
    "G_c": 2.7e6,
    "delta_m_eff": -20.15e6,
    "delta_c_eff": 20.11e6,
}


def reference_config() -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "system": dict(REFERENCE_SYSTEM),
        "effective": dict(REFERENCE_EFFECTIVE),
    }


def reference_params(**overrides_hz) -> SystemParams:
    """Reference parameter set with overrides given in config units (Hz, K, m)."""
    doc = reference_config()
    for key, value in overrides_hz.items():
        block = "effective" if key in EFFECTIVE_KEYS else "system"
        if key not in BLOCKS[block]:
            raise ConfigError(f"unknown parameter {key!r}")
        doc[block][key] = value
    params, _ = params_from_config(doc)
    return params


def _to_angular(value: float, unit: str) -> float:
    return value * TWO_PI if unit == "hz" else value


def _check_number(path: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite")
    return float(value)


def validate_config(doc: Any) -> None:
    """Raise ConfigError unless `doc` is a structurally valid document."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(doc) - TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
    if "system" not in doc:
        raise ConfigError("missing 'system' block")
    has_eff, has_drive = "effective" in doc, "drive" in doc
    if has_eff and has_drive:
        raise ConfigError("supply either 'effective' or 'drive', not both")
    if not (has_eff or has_drive):
        raise ConfigError("one of 'effective' or 'drive' is required")
    for block in ("system", "effective", "drive"):
        if block not in doc:
            continue
        content = doc[block]
        if not isinstance(content, dict):
            raise ConfigError(f"'{block}' must be an object")
        allowed = BLOCKS[block]
        extra = set(content) - set(allowed)
        if extra:
            raise ConfigError(f"unknown keys in '{block}': {sorted(extra)}")
        for key, value in content.items():
            if block == "drive" and value is None:
                continue
            _check_number(f"{block}.{key}", value)
    missing = set(SYSTEM_KEYS) - set(doc["system"])
    if missing:
        raise ConfigError(f"missing keys in 'system': {sorted(missing)}")
    if has_eff:
        missing = set(EFFECTIVE_KEYS) - set(doc["effective"])
        if missing:
            raise ConfigError(f"missing keys in 'effective': {sorted(missing)}")
    else:
        drive = doc["drive"]
        missing = [k for k in DRIVE_REQUIRED if drive.get(k) is None]
        if missing:
            raise ConfigError(f"missing keys in 'drive': {missing}")
        if (drive.get("P_0") is None) == (drive.get("rabi_omega") is None):
            raise ConfigError("'drive' needs exactly one of P_0 or rabi_omega")
        if drive.get("P_0") is not None and (drive.get("radius") is None or drive.get("spin_count") is None):
            raise ConfigError("'drive.P_0' requires 'radius' and 'spin_count'")


def _drive_spec(drive: dict) -> DriveSpec:
    def get(key):
        v = drive.get(key)
        return None if v is None else _to_angular(float(v), DRIVE_KEYS[key])

    return DriveSpec(
        P_L=float(drive["P_L"]),
        rabi_omega=get("rabi_omega"),
        P_0=get("P_0"),
        radius=get("radius"),
        spin_count=get("spin_count"),
        omega_d2=get("omega_d2"),
    )


def params_from_config(doc: dict) -> tuple:
    """Build ``(SystemParams, SteadyState or None)`` from a config document.

    The steady state is only computed (and returned) for a ``drive`` block.
    """
    validate_config(doc)
    sysvals = {k: _to_angular(float(v), SYSTEM_KEYS[k]) for k, v in doc["system"].items()}
    try:
        if "effective" in doc:
            eff = {k: _to_angular(float(v), EFFECTIVE_KEYS[k]) for k, v in doc["effective"].items()}
            return SystemParams(**sysvals, **eff), None
        drive = doc["drive"]
        delta_m = _to_angular(float(drive["delta_m"]), "hz")
        delta_c = _to_angular(float(drive["delta_c"]), "hz")
        bare = SystemParams(**sysvals, G_m=0.0, G_c=0.0, delta_m_eff=delta_m, delta_c_eff=delta_c)
        steady = solve_self_consistent(bare, delta_m, delta_c, _drive_spec(drive))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return apply_steady_state(bare, steady), steady


def resolve_path(doc: dict, path: str) -> tuple:
    """Split ``block.key`` and check it names a numeric parameter of `doc`."""
    parts = path.split(".")
    if len(parts) != 2 or parts[0] not in BLOCKS:
        raise ConfigError(f"bad parameter path {path!r}; expected '<block>.<key>'")
    block, key = parts
    if key not in BLOCKS[block]:
        raise ConfigError(f"unknown parameter {path!r}")
    if block not in doc:
        raise ConfigError(f"parameter {path!r} refers to a block absent from the config")
    return block, key


def get_path(doc: dict, path: str) -> Optional[float]:
    block, key = resolve_path(doc, path)
    return doc[block].get(key)


def set_paths(doc: dict, paths, value: float) -> dict:
    """Copy of `doc` with every path in `paths` set to `value`."""
    out = copy.deepcopy(doc)
    for path in paths:
        block, key = resolve_path(out, path)
        out[block][key] = value
    return out


def dumps(doc: dict) -> str:
    """Canonical serialization; ``dumps(json.loads(dumps(d))) == dumps(d)``."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    validate_config(doc)
    return doc
