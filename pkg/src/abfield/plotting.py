"""Figure rendering for CLI reports.

Figures are side outputs written next to the delimited data (PNG via the
Agg backend, pinned metadata and dpi, no timestamps), so report runs stay
byte-reproducible with plotting enabled.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_SAVE = {"dpi": 150, "metadata": {"Software": "abfield"}}

plt.rcParams.update({
    "figure.figsize": (7.0, 4.5),
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.bbox": "tight",
})


def render_field_map(xs: np.ndarray, ys: np.ndarray, a_mag: np.ndarray,
                     b_mag: np.ndarray, path: Path) -> Path:
    """Two-panel heatmap of |A| and |B| over the sampled plane."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for ax, mag, label in ((axes[0], a_mag, "|A|  (T m)"),
                           (axes[1], b_mag, "|B|  (T)")):
        im = ax.pcolormesh(xs, ys, mag.T, shading="auto", cmap="viridis")
        fig.colorbar(im, ax=ax, label=label)
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        ax.set_aspect("equal")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_phase(circulation: float, phase: float, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.bar(["|circulation| (T m$^2$)", "|phase| (rad)"],
           [abs(circulation), abs(phase)], color=["#4477aa", "#cc6677"])
    ax.set_yscale("log")
    floor = 1e-30
    ax.set_ylim(bottom=floor)
    ax.set_title(f"circulation = {circulation:.6e} T m$^2$,  phase = {phase:.6e} rad")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_stokes(report_terms: dict[str, float], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    names = list(report_terms)
    vals = [report_terms[k] for k in names]
    ax.bar(names, vals, color="#4477aa")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_ylabel("T m$^2$")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_trajectory(times: np.ndarray, positions: np.ndarray,
                      drift: np.ndarray, coil_radius: float, path: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    axes[0].plot(positions[:, 0], positions[:, 1], lw=0.9)
    circle = plt.Circle((0.0, 0.0), coil_radius, fill=False, color="r", lw=1.0)
    axes[0].add_patch(circle)
    axes[0].set_xlabel("x (m)")
    axes[0].set_ylabel("y (m)")
    axes[0].set_aspect("equal")
    axes[0].set_title("trajectory (coil section in red)")
    axes[1].semilogy(times, np.maximum(drift, 1e-18))
    axes[1].set_xlabel("t (s)")
    axes[1].set_ylabel("|p - p0| / |p0|")
    axes[1].set_title("canonical-momentum drift")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_convergence(labels: list[str], errors: list[float], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.semilogy(range(len(errors)), errors, "o-")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("relative error vs closed form")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def render_screen_profile(rho: np.ndarray, a_phi: np.ndarray, lambda_p: float,
                          path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.semilogy(rho, a_phi, label="screened $A_\\phi$")
    ref = a_phi[0] * np.exp(-(rho - rho[0]) / lambda_p)
    ax.semilogy(rho, ref, "--", label="pure $e^{-\\rho/\\lambda_p}$ reference")
    ax.set_xlabel("rho (m)")
    ax.set_ylabel("$A_\\phi$ (T m)")
    ax.legend()
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path
