"""Render sweep maps and spectra to image files next to the data output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .config import BLOCKS  # noqa: E402

plt.rcParams.update(
    {
        "font.size": 10,
        "axes.labelsize": 10,
        "xtick.direction": "in",
        "ytick.direction": "in",
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
    }
)


def _axis_scaling(axis):
    block, key = axis.paths[0].split(".")
    unit = BLOCKS[block][key]
    if unit == "hz" and axis.scale == "linear" and max(abs(axis.min), abs(axis.max)) >= 1e5:
        return 1e-6, f"{' = '.join(p.split('.')[1] for p in axis.paths)} / 2pi (MHz)"
    label = {"hz": "Hz", "K": "K", "m": "m", "W": "W", "1": ""}[unit]
    name = " = ".join(p.split(".")[1] for p in axis.paths)
    return 1.0, f"{name} / 2pi ({label})" if unit == "hz" else f"{name} ({label})"


def plot_sweep(result, label: str, path) -> None:
    """Heatmap of one observable; unstable points are left blank."""
    spec = result.spec
    sx, xlabel = _axis_scaling(spec.axis1)
    sy, ylabel = _axis_scaling(spec.axis2)
    z = np.ma.masked_invalid(result.values[label])
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    mesh = ax.pcolormesh(result.x * sx, result.y * sy, z.T, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=label)
    if spec.axis1.scale == "log":
        ax.set_xscale("log")
    if spec.axis2.scale == "log":
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.savefig(path)
    plt.close(fig)


def plot_spectrum(trace, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(4.2, 3.0))
    ax.plot(trace.freq_hz * 1e-6, trace.S, lw=1.0)
    ax.set_xlabel("omega / 2pi (MHz)")
    ax.set_ylabel("S_c^out")
    if title:
        ax.set_title(title)
    fig.savefig(path)
    plt.close(fig)
