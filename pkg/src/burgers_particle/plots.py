"""Optional SVG figures for a run (matplotlib, imported lazily)."""

from __future__ import annotations

import os

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no timestamp so identical runs give identical files
    matplotlib.rcParams["svg.hashsalt"] = "burgers-particle"
    return plt


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def write_run_plots(out_dir, table, traj, constants) -> list:
    """Write energy.svg, position.svg and lyapunov.svg; return their paths."""
    plt = _pyplot()
    t = table.t
    paths = []

    fig, ax = plt.subplots(figsize=(6, 4))
    E = np.where(table.E > 0, table.E, np.nan)
    ax.semilogy(t, E, label="E(t)")
    ax.semilogy(t, constants.energy_envelope(t, table.E[0]), "--", label="envelope")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend()
    paths.append(os.path.join(out_dir, "energy.svg"))
    _save(fig, paths[-1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, traj.h, label="h(t)")
    ax.plot(t, -1.0 + table.kappa1, ":", color="k", label="corridor")
    ax.plot(t, 1.0 - table.kappa2, ":", color="k")
    ax.set_ylim(-1.05, 1.05)
    ax.set_xlabel("t")
    ax.set_ylabel("particle position")
    ax.legend()
    paths.append(os.path.join(out_dir, "position.svg"))
    _save(fig, paths[-1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, table.V_eps, label=f"V_eps, eps={table.eps:.3g}")
    ax.plot(t, table.E, "--", label="E")
    ax.set_xlabel("t")
    ax.legend()
    paths.append(os.path.join(out_dir, "lyapunov.svg"))
    _save(fig, paths[-1])
    plt.close(fig)
    return paths
