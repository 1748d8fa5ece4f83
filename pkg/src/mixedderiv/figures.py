"""Matplotlib rendering for the report paths (file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

GOLDEN = (1.0 + 5.0 ** 0.5) / 2.0
FIG_WIDTH = 6.4

plt.rcParams.update({
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
})


def render_monitor_series(record, path: str | Path) -> Path:
    """Stacked time series of every monitor in the record."""
    path = Path(path)
    names = list(record.monitors) or ["constraint"]
    fig, axes = plt.subplots(len(names), 1, sharex=True,
                             figsize=(FIG_WIDTH, 1.6 * len(names) + 0.8),
                             squeeze=False)
    for ax, name in zip(axes[:, 0], names):
        values = record.monitors.get(name, np.array([]))
        ax.plot(record.times[:len(values)], values, lw=1.0)
        ax.set_ylabel(name)
    axes[-1, 0].set_xlabel("t")
    title = f"{record.equation.name}: {record.method}, dt={record.dt:g}"
    if not record.status.ok:
        title += f"  [{record.status.kind} at t={record.status.time:g}]"
    axes[0, 0].set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_state_evolution(record, path: str | Path) -> Path:
    """Space-time heat map of the recorded snapshots."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(FIG_WIDTH, FIG_WIDTH / GOLDEN))
    k = record.states.shape[1]
    x = np.arange(k) * (2.0 * np.pi / k)
    if record.states.shape[0] > 1:
        mesh = ax.pcolormesh(x, record.times, record.states, shading="nearest")
        fig.colorbar(mesh, ax=ax, label="u")
        ax.set_ylabel("t")
    else:
        ax.plot(x, record.states[0], lw=1.2)
        ax.set_ylabel("u")
    ax.set_xlabel("x")
    ax.set_title(f"{record.equation.name} (K={k})")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_error_curves(curve, path: str | Path) -> Path:
    """Relative-error curves over one aliasing period, clipped to [0, 6]."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(FIG_WIDTH, FIG_WIDTH / GOLDEN))
    for label, values in curve.errors.items():
        line, = ax.plot(curve.omega_tilde, values, ls="none", marker=".",
                        ms=3, label=label)
        closed = curve.closed_form.get(label)
        if closed is not None:
            ax.plot(curve.omega_tilde, closed, lw=0.8, alpha=0.6,
                    color=line.get_color())
    ax.set_xlim(0.0, 2.0 * np.pi)
    ax.set_ylim(0.0, 6.0)
    ax.set_xlabel(r"scaled wavenumber $\omega\,\Delta x$")
    ax.set_ylabel("relative band-integral error")
    ax.set_title(f"inverse-operator error curves (K={curve.grid_size})")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
