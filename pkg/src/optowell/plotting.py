"""Matplotlib figure rendering for the report path.

Figures are written next to the delimited output, one file per figure,
in whatever raster/vector formats the run requests (SVG by default).
CSV stays the canonical data output; these plots are for quick looks.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_potential_figure",
    "save_sweep_figures",
    "save_trajectory_figure",
    "save_histogram_figure",
    "save_zeno_figure",
]


def _save(fig, stem: Path, formats) -> list[Path]:
    paths = []
    for ext in formats:
        if ext in ("svg",):
            p = stem.with_suffix(f".{ext}")
            fig.savefig(p)
            paths.append(p)
    plt.close(fig)
    return paths


def save_potential_figure(stem: Path, x, u, energies, densities, formats=("svg",)) -> list[Path]:
    """Potential with doublet levels and, if given, localized densities."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(x, u, color="black", lw=1.2, label="U(x)")
    for i, e in enumerate(energies):
        ax.axhline(e, color=f"C{i}", lw=0.9, ls="--", label=f"E{i + 1}")
    if densities is not None:
        span = max(np.max(np.abs(u)), 1e-12)
        for label, dens in densities.items():
            scale = 0.4 * span / max(np.max(dens), 1e-300)
            ax.plot(x, dens * scale + np.min(u), lw=1.0, label=label)
    ax.set_xlabel("position x (zero-point units)")
    ax.set_ylabel("energy (mechanical quanta)")
    window = 1.5 * max(abs(x[np.argmin(u)]), 1.0)
    ax.set_xlim(-window, window)
    u_lo = float(np.min(u))
    ax.set_ylim(u_lo * 1.6 - 1e-12, -u_lo * 3 + 1e-12)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return _save(fig, stem, formats)


def save_sweep_figures(outdir: Path, rows, swept_field: str, formats=("svg",)) -> list[Path]:
    """Geometry panel (x_min and barrier/ground ratio) and log-scale splitting."""
    paths = []
    vals = [r.swept for r in rows]
    fig, ax1 = plt.subplots(figsize=(7, 4.5))
    ax1.plot(vals, [r.ratio if r.ratio is not None else np.nan for r in rows],
             color="C0", label="E_b / E_ground")
    ax1.set_xlabel(swept_field)
    ax1.set_ylabel("barrier height / ground energy", color="C0")
    ax2 = ax1.twinx()
    ax2.plot(vals, [r.x_min if r.x_min is not None else np.nan for r in rows],
             color="C1", ls=":", label="x_min")
    ax2.set_ylabel("half minimum separation x_min", color="C1")
    fig.tight_layout()
    paths += _save(fig, outdir / "geometry", formats)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = [r.swept for r in rows if r.J is not None]
    js = [r.J for r in rows if r.J is not None]
    if xs:
        ax.semilogy(xs, js, "o-", color="C0", ms=3)
    ax.set_xlabel(swept_field)
    ax.set_ylabel("doublet splitting J (units of the mechanical frequency)")
    fig.tight_layout()
    paths += _save(fig, outdir / "splitting", formats)
    return paths


def save_trajectory_figure(stem: Path, record, ref_times, ref_means, formats=("svg",)) -> list[Path]:
    """Pulse outcomes with the coherent (unmeasured) mean-position line."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if ref_times is not None and len(ref_times):
        ax.plot(ref_times, ref_means, color="black", lw=1.0, label="coherent <x>(t)")
    if len(record.times):
        ax.plot(record.times, record.outcomes, "o", color="C3", ms=4, label="pulse outcomes")
        ax.plot(record.times, record.means, "s--", color="C0", ms=3, lw=0.8,
                label="<x> after pulse")
    ax.set_xlabel("time (1/mechanical frequency)")
    ax.set_ylabel("position (zero-point units)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return _save(fig, stem, formats)


def save_histogram_figure(stem: Path, stats, formats=("svg",)) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6, 4))
    if stats.histogram_counts.size:
        widths = np.diff(stats.histogram_edges)
        ax.bar(stats.histogram_edges[:-1], stats.histogram_counts, width=widths,
               align="edge", color="C0", edgecolor="white")
    ax.set_xlabel("measurement outcome (zero-point units)")
    ax.set_ylabel(f"count of {stats.n_post_selected} post-selected trajectories")
    fig.tight_layout()
    return _save(fig, stem, formats)


def save_zeno_figure(stem: Path, rows, formats=("svg",)) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([r.multiplier for r in rows], [r.crossing_fraction for r in rows], "o-", color="C0")
    ax.set_xlabel("pulse frequency multiplier")
    ax.set_ylabel("well-crossing fraction")
    ax.set_xscale("log", base=2)
    ax.set_ylim(0, 1)
    fig.tight_layout()
    return _save(fig, stem, formats)
