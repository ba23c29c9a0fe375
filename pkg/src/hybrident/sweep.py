"""Single-point reports, two-parameter sweeps, figure presets and writers."""

from __future__ import annotations

import copy
import csv
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .config import (
    REFERENCE_EFFECTIVE,
    REFERENCE_SYSTEM,
    SCHEMA_VERSION,
    params_from_config,
    resolve_path,
    set_paths,
    validate_config,
)
from .errors import ConfigError, StabilityError
from .lyapunov import is_marginal, is_stable, solve_lyapunov, uncertainty_floor
from .measures import (
    effective_occupation_flagged,
    extract_bipartite,
    log_negativity_flagged,
    mode_pairs,
)
from .model import MODE_INDEX, MODES, SystemParams, build_diffusion_matrix, build_drift_matrix
from .spectrum import SpectrumTrace, output_spectrum

TIE_TOL = 1e-12
_OBS_RE = re.compile(r"^\s*(E)\(\s*(\w+)\s*,\s*(\w+)\s*\)\s*$|^\s*(n)\(\s*(\w+)\s*\)\s*$|^\s*(margin)\s*$")


def parse_observable(text: str) -> tuple:
    """``'E(a,c)' -> ('E', ('a', 'c'))``, ``'n(b1)' -> ('n', ('b1',))``, ``'margin'``."""
    m = _OBS_RE.match(text)
    if not m:
        raise ConfigError(f"unknown observable {text!r}; use E(i,j), n(mode) or margin")
    if m.group(1):
        i, j = m.group(2), m.group(3)
        if i not in MODES or j not in MODES or i == j:
            raise ConfigError(f"bad mode pair in {text!r}")
        return ("E", (i, j))
    if m.group(4):
        if m.group(5) not in MODES:
            raise ConfigError(f"bad mode in {text!r}")
        return ("n", (m.group(5),))
    return ("margin", ())


def observable_label(obs: tuple) -> str:
    kind, modes = obs
    if kind == "margin":
        return "margin"
    return f"{kind}({','.join(modes)})"


@dataclass(frozen=True)
class PointResult:
    stable: bool
    max_real_eig: float
    marginal: bool
    clamped: bool = False
    values: dict = field(default_factory=dict)
    covariance: Optional[np.ndarray] = None


def evaluate(params: SystemParams, observables) -> PointResult:
    """Stability check, covariance and the requested observables at one point.

    Unstable points carry NaN for every observable except the margin.
    """
    A = build_drift_matrix(params)
    stable, max_re = is_stable(A)
    marginal = is_marginal(max_re)
    if not stable:
        vals = {o: (max_re if o[0] == "margin" else math.nan) for o in observables}
        return PointResult(False, max_re, marginal, False, vals)
    V = solve_lyapunov(A, build_diffusion_matrix(params), check_stable=False)
    clamped = False
    vals = {}
    for obs in observables:
        kind, modes = obs
        if kind == "E":
            # canonical mode order so E(a,c) and E(c,a) round identically
            pair = sorted(modes, key=MODE_INDEX.__getitem__)
            v, c = log_negativity_flagged(extract_bipartite(V, *pair))
        elif kind == "n":
            v, c = effective_occupation_flagged(V, modes[0])
        else:
            v, c = max_re, False
        clamped |= c
        vals[obs] = v
    return PointResult(True, max_re, marginal, clamped, vals, V)


def run_point(config) -> dict:
    """Full report for one parameter point: every pairwise E_N, n for b1/b2, margin.

    `config` is a config document or a SystemParams.
    """
    if isinstance(config, SystemParams):
        params = config
    else:
        params, _ = params_from_config(config)
    observables = [("E", pair) for pair in mode_pairs()] + [("n", ("b1",)), ("n", ("b2",))]
    res = evaluate(params, observables)
    report = {
        "stable": res.stable,
        "marginal": res.marginal,
        "max_real_eig": res.max_real_eig,
    }
    if not res.stable:
        return report
    report["clamped"] = res.clamped
    report["entanglement"] = {f"{i}-{j}": res.values[("E", (i, j))] for i, j in mode_pairs()}
    report["occupation"] = {m: res.values[("n", (m,))] for m in ("b1", "b2")}
    report["uncertainty_floor"] = uncertainty_floor(res.covariance)
    return report


@dataclass(frozen=True)
class Axis:
    """Grid axis over one or more tied parameter paths, in config units."""

    paths: tuple
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        # a single-point axis is only allowed when it is explicitly degenerate
        if self.count < 2 and not (self.count == 1 and self.min == self.max):
            raise ConfigError("axis count must be at least 2 (or 1 with min == max)")
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError("axis range must be finite")
        if self.scale not in ("linear", "log"):
            raise ConfigError("axis scale must be 'linear' or 'log'")
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise ConfigError("log axis needs a positive range")
        if not self.paths:
            raise ConfigError("axis needs at least one parameter path")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    @property
    def label(self) -> str:
        return "=".join(self.paths)

    @classmethod
    def from_dict(cls, d: dict) -> "Axis":
        if not isinstance(d, dict):
            raise ConfigError("axis must be an object")
        try:
            paths = d["path"]
            paths = (paths,) if isinstance(paths, str) else tuple(paths)
            return cls(paths, float(d["min"]), float(d["max"]), int(d["count"]), d.get("scale", "linear"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad axis specification {d!r}: {exc}") from exc

    def to_dict(self) -> dict:
        path = self.paths[0] if len(self.paths) == 1 else list(self.paths)
        return {"path": path, "min": self.min, "max": self.max, "count": self.count, "scale": self.scale}


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    observables: tuple
    base: dict

    @classmethod
    def from_config(cls, doc: dict) -> "SweepSpec":
        validate_config(doc)
        sw = doc.get("sweep")
        if not isinstance(sw, dict):
            raise ConfigError("config has no 'sweep' block")
        extra = set(sw) - {"axis1", "axis2", "observables"}
        if extra:
            raise ConfigError(f"unknown keys in 'sweep': {sorted(extra)}")
        obs = sw.get("observables", ["E(a,c)"])
        obs = [obs] if isinstance(obs, str) else list(obs)
        if not obs:
            raise ConfigError("sweep needs at least one observable")
        base = {k: v for k, v in doc.items() if k not in ("sweep", "spectrum")}
        spec = cls(Axis.from_dict(sw.get("axis1")), Axis.from_dict(sw.get("axis2")),
                   tuple(parse_observable(o) for o in obs), base)
        for path in spec.axis1.paths + spec.axis2.paths:
            resolve_path(base, path)
        return spec

    def to_config(self) -> dict:
        doc = copy.deepcopy(self.base)
        doc["sweep"] = {
            "axis1": self.axis1.to_dict(),
            "axis2": self.axis2.to_dict(),
            "observables": [observable_label(o) for o in self.observables],
        }
        return doc

    def point_config(self, x: float, y: float) -> dict:
        return set_paths(set_paths(self.base, self.axis1.paths, float(x)), self.axis2.paths, float(y))


@dataclass
class SweepResult:
    spec: SweepSpec
    x: np.ndarray
    y: np.ndarray
    values: dict  # label -> (len(x), len(y)) array, NaN where unstable
    stable: np.ndarray
    marginal: np.ndarray
    clamped: np.ndarray
    max_real_eig: np.ndarray
    provenance: dict

    def argmax(self, label: str) -> list:
        """All grid points within TIE_TOL of the maximum of `label`, as (x, y, value)."""
        z = self.values[label]
        if not np.any(np.isfinite(z)):
            return []
        best = np.nanmax(z)
        hits = np.argwhere(np.isfinite(z) & (z >= best - TIE_TOL))
        return [(float(self.x[i]), float(self.y[j]), float(z[i, j])) for i, j in hits]


def provenance(doc: dict, timestamp: Optional[str] = None) -> dict:
    prov = {"tool": "hybrident", "version": __version__, "config": doc}
    if timestamp:
        prov["timestamp"] = timestamp
    return prov


def reproducible_timestamp() -> Optional[str]:
    """UTC time from SOURCE_DATE_EPOCH, or None so that output stays byte-stable."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def run_sweep(spec: SweepSpec, threads: int = 1, timestamp: Optional[str] = None) -> SweepResult:
    """Evaluate every grid point; result independent of `threads` and order."""
    x, y = spec.axis1.values(), spec.axis2.values()
    points = [(i, j) for i in range(len(x)) for j in range(len(y))]

    def work(ij):
        i, j = ij
        params, _ = params_from_config(spec.point_config(x[i], y[j]))
        return evaluate(params, spec.observables)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, points))
    else:
        results = [work(p) for p in points]

    shape = (len(x), len(y))
    labels = [observable_label(o) for o in spec.observables]
    values = {lab: np.full(shape, np.nan) for lab in labels}
    stable = np.zeros(shape, bool)
    marginal = np.zeros(shape, bool)
    clamped = np.zeros(shape, bool)
    max_re = np.zeros(shape)
    for (i, j), res in zip(points, results):
        stable[i, j], marginal[i, j], clamped[i, j] = res.stable, res.marginal, res.clamped
        max_re[i, j] = res.max_real_eig
        for obs, lab in zip(spec.observables, labels):
            values[lab][i, j] = res.values[obs]
    return SweepResult(spec, x, y, values, stable, marginal, clamped, max_re,
                       provenance(spec.to_config(), timestamp))


def run_spectrum(doc: dict) -> SpectrumTrace:
    """Output spectrum for a config document; grid from its 'spectrum' block."""
    params, steady = params_from_config(doc)
    grid = spectrum_grid(doc, params)
    A = build_drift_matrix(params)
    stable, max_re = is_stable(A)
    if not stable:
        raise StabilityError(f"spectrum requested at an unstable point (max Re eig = {max_re:.6g})", max_re)
    return output_spectrum(params, steady, grid)


def spectrum_grid(doc: dict, params: SystemParams) -> np.ndarray:
    block = doc.get("spectrum") or {}
    if not isinstance(block, dict):
        raise ConfigError("'spectrum' must be an object")
    extra = set(block) - {"center", "half_span", "count"}
    if extra:
        raise ConfigError(f"unknown keys in 'spectrum': {sorted(extra)}")
    centre = block.get("center")
    centre = 0.5 * (params.omega_b1 + params.omega_b2) if centre is None else 2 * math.pi * float(centre)
    half = 2 * math.pi * float(block.get("half_span", 8e6))
    count = int(block.get("count", 4001))
    if count < 2 or not half > 0:
        raise ConfigError("spectrum grid needs count >= 2 and positive half_span")
    return np.linspace(centre - half, centre + half, count)


# ---------------------------------------------------------------- presets

def _base(**system) -> dict:
    sysblock = dict(REFERENCE_SYSTEM)
    sysblock.update(system)
    return {"schema_version": SCHEMA_VERSION, "system": sysblock, "effective": dict(REFERENCE_EFFECTIVE)}


def _fig2_detuning(g_ma: float) -> dict:
    doc = _base(g_ma=g_ma, g_b1b2=1.5e6)
    wb1, wb2 = REFERENCE_SYSTEM["omega_b1"], REFERENCE_SYSTEM["omega_b2"]
    doc["sweep"] = {
        "axis1": {"path": ["effective.delta_m_eff", "system.delta_a"], "min": -2 * wb1, "max": 0.0,
                  "count": 41, "scale": "linear"},
        "axis2": {"path": "effective.delta_c_eff", "min": 0.0, "max": 2 * wb2, "count": 41, "scale": "linear"},
        "observables": ["E(a,c)"],
    }
    return doc


def _fig2_couplings(obs: str) -> dict:
    doc = _base()
    doc["sweep"] = {
        "axis1": {"path": "system.g_ma", "min": 0.0, "max": 3e6, "count": 31, "scale": "linear"},
        "axis2": {"path": "system.g_b1b2", "min": 0.0, "max": 4e6, "count": 41, "scale": "linear"},
        "observables": [obs],
    }
    return doc


def _fig3(g_b1b2: float) -> dict:
    doc = _base(g_b1b2=g_b1b2)
    doc["spectrum"] = {"half_span": 8e6, "count": 4001}
    return doc


def _fig4() -> dict:
    doc = _base()
    doc["sweep"] = {
        "axis1": {"path": "effective.G_m", "min": 0.0, "max": 2e6, "count": 41, "scale": "linear"},
        "axis2": {"path": "effective.G_c", "min": 0.0, "max": 5e6, "count": 51, "scale": "linear"},
        "observables": ["E(a,c)"],
    }
    return doc


def _fig5a() -> dict:
    doc = _base()
    doc["sweep"] = {
        "axis1": {"path": "system.temperature", "min": 0.01, "max": 0.31, "count": 31, "scale": "linear"},
        "axis2": {"path": "system.gamma_c", "min": 0.5e6, "max": 15e6, "count": 30, "scale": "linear"},
        "observables": ["E(a,c)"],
    }
    return doc


def _fig5b() -> dict:
    doc = _base()
    doc["sweep"] = {
        "axis1": {"path": "system.gamma_b1", "min": 1e2, "max": 1e6, "count": 41, "scale": "log"},
        "axis2": {"path": "system.gamma_b2", "min": 1e2, "max": 1e6, "count": 41, "scale": "log"},
        "observables": ["E(a,c)"],
    }
    return doc


PRESETS = {
    "fig2a": lambda: _fig2_detuning(1e6),
    "fig2b": lambda: _fig2_detuning(2.5e6),
    "fig2c": lambda: _fig2_couplings("E(a,c)"),
    "fig2d": lambda: _fig2_couplings("E(m,c)"),
    "fig3a": lambda: _fig3(0.5e6),
    "fig3b": lambda: _fig3(1.0e6),
    "fig3c": lambda: _fig3(1.5e6),
    "fig3d": lambda: _fig3(2.0e6),
    "fig4": _fig4,
    "fig5a": _fig5a,
    "fig5b": _fig5b,
}


def figure_preset(name: str) -> dict:
    """Fully resolved config document (with 'sweep' or 'spectrum' block) for a figure."""
    try:
        doc = PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown figure {name!r}; presets: {', '.join(PRESETS)}") from None
    doc["name"] = name
    return doc


# ---------------------------------------------------------------- writers

def _fmt(v: float) -> str:
    return "" if not math.isfinite(v) else format(float(v), ".17g")


def write_csv(result: SweepResult, fh) -> None:
    """Long-format CSV; unstable observables are empty fields, see `stable` column."""
    prov = result.provenance
    fh.write(f"# tool: {prov['tool']} {prov['version']}\n")
    if "timestamp" in prov:
        fh.write(f"# timestamp: {prov['timestamp']}\n")
    fh.write(f"# config: {json.dumps(prov['config'], separators=(',', ':'))}\n")
    labels = list(result.values)
    spec = result.spec
    out = csv.writer(fh, lineterminator="\n")
    out.writerow([spec.axis1.label, spec.axis2.label, "stable", "marginal", "clamped", "max_real_eig"] + labels)
    for i, xv in enumerate(result.x):
        for j, yv in enumerate(result.y):
            row = [_fmt(xv), _fmt(yv), str(int(result.stable[i, j])), str(int(result.marginal[i, j])),
                   str(int(result.clamped[i, j])), _fmt(result.max_real_eig[i, j])]
            row += [_fmt(result.values[lab][i, j]) for lab in labels]
            out.writerow(row)


def _jsonable(a: np.ndarray) -> list:
    if a.dtype == bool:
        return a.astype(int).tolist()
    return [[float(v) if math.isfinite(v) else None for v in row] for row in a]


def write_json(result: SweepResult, fh) -> None:
    spec = result.spec
    payload = {
        "provenance": result.provenance,
        "axis1": {"path": list(spec.axis1.paths), "values": [float(v) for v in result.x]},
        "axis2": {"path": list(spec.axis2.paths), "values": [float(v) for v in result.y]},
        "observables": {lab: _jsonable(z) for lab, z in result.values.items()},
        "stable": _jsonable(result.stable),
        "marginal": _jsonable(result.marginal),
        "clamped": _jsonable(result.clamped),
        "max_real_eig": _jsonable(result.max_real_eig),
    }
    fh.write(json.dumps(payload, indent=1, allow_nan=False) + "\n")


def write_gnuplot_matrix(result: SweepResult, label: str, fh) -> None:
    """gnuplot ``nonuniform matrix`` text: first row axis2 values, then x and z row."""
    z = result.values[label]
    fh.write(f"# {label} rows={result.spec.axis1.label} cols={result.spec.axis2.label}\n")
    fh.write(" ".join([str(len(result.y))] + [format(float(v), ".17g") for v in result.y]) + "\n")
    for i, xv in enumerate(result.x):
        cells = [format(float(v), ".17g") if math.isfinite(v) else "NaN" for v in z[i]]
        fh.write(" ".join([format(float(xv), ".17g")] + cells) + "\n")
