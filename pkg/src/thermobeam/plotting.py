"""Figure rendering for study outputs (PNG files next to the CSV/JSONL)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_spectrum",
    "plot_resolvent",
    "plot_trajectory",
    "plot_sweep",
    "plot_combo",
    "plot_limit",
    "plot_equivalence",
]


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_spectrum(report, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    vals = report.eigenvalues
    ax.scatter(vals.real, vals.imag, s=8, alpha=0.7)
    ax.axvline(0.0, color="k", lw=0.6)
    ax.axvline(report.abscissa, color="crimson", lw=0.8, ls="--",
               label="abscissa %.3e" % report.abscissa)
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def plot_resolvent(scan, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(scan.lambdas, scan.norms, "-", lw=0.9)
    ax.axvline(scan.argmax_lambda, color="crimson", lw=0.8, ls="--",
               label=r"sup %.3e at $\lambda$=%.3g" % (scan.sup_norm, scan.argmax_lambda))
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$\|(\mathrm{i}\lambda - A)^{-1}\|$")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def plot_trajectory(report, path) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(6, 5.5), sharex=True)
    axes[0].semilogy(report.times, np.maximum(report.energies, 1e-300), lw=0.9)
    axes[0].set_ylabel("energy")
    if report.fitted_rate is not None:
        e0 = report.energies[0]
        axes[0].semilogy(report.times, e0 * np.exp(-2.0 * report.fitted_rate * report.times),
                         "--", lw=0.8, label=r"fit $\hat\omega$=%.4g" % report.fitted_rate)
        axes[0].legend(fontsize=8)
    axes[1].semilogy(report.times[1:], np.maximum(report.dissipations, 1e-300), lw=0.9)
    axes[1].set_ylabel("dissipation (midpoints)")
    axes[1].set_xlabel("t")
    _save(fig, path)


def plot_sweep(records, path) -> None:
    absc = [r["abscissa"] for r in records if "abscissa" in r]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(np.log10(np.abs(absc)), bins=24, color="steelblue", alpha=0.85)
    ax.set_xlabel(r"$\log_{10}|$abscissa$|$")
    ax.set_ylabel("draws")
    n_fail = sum(1 for r in records if r.get("status") == "failure")
    ax.set_title("%d cells, %d failures" % (len(absc), n_fail), fontsize=9)
    _save(fig, path)


def plot_combo(records, path) -> None:
    laws = ["gurtin_pipkin", "fourier", "cattaneo", "coleman_gurtin"]
    grid = np.full((4, 4), np.nan)
    for r in records:
        if "theta_law" in r:
            grid[laws.index(r["theta_law"]), laws.index(r["xi_law"])] = r["abscissa"]
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(np.log10(np.abs(grid)), cmap="viridis")
    short = ["GP", "F", "C", "CG"]
    ax.set_xticks(range(4), short)
    ax.set_yticks(range(4), short)
    ax.set_xlabel("bending-moment channel law")
    ax.set_ylabel("shear-force channel law")
    for i in range(4):
        for j in range(4):
            ax.text(j, i, "%.1e" % grid[i, j], ha="center", va="center", fontsize=7, color="w")
    fig.colorbar(im, ax=ax, label=r"$\log_{10}|$abscissa$|$")
    _save(fig, path)


def plot_limit(records, path) -> None:
    pts = [(r["eps"], r["distance"]) for r in records if "eps" in r]
    eps, dist = zip(*sorted(pts, reverse=True))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(eps, dist, "o-", lw=0.9)
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_ylabel("tracked-eigenvalue relative distance")
    ax.invert_xaxis()
    _save(fig, path)


def plot_equivalence(rep_hist, rep_flux, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.scatter(rep_hist.eigenvalues.real, rep_hist.eigenvalues.imag, s=22,
               facecolors="none", edgecolors="steelblue", label="history form")
    ax.scatter(rep_flux.eigenvalues.real, rep_flux.eigenvalues.imag, s=6,
               color="crimson", label="flux form")
    ax.set_xlabel(r"Re $\lambda$")
    ax.set_ylabel(r"Im $\lambda$")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)
