"""Figure rendering for the report path of the command-line tools.

Figures are written next to the delimited output; nothing here feeds back
into the computations, so the plotting layer stays import-light and every
figure is rendered off-screen.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .besselpoly import GammaParam
from .spectrum import CountingReport, SpectrumTable


def spectrum_figure(table: SpectrumTable, gp: GammaParam, path: Path) -> Path:
    """Eigenvalue ladder with localization centers and the gap profile."""
    ns = [m.n for m in table.modes]
    lams = [m.lambda_mid for m in table.modes]
    centers = [m.z_n for m in table.modes]
    gaps = [m.gap for m in table.modes]

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.plot(ns, lams, ".", ms=3, label="certified eigenvalue")
    ax1.plot(ns, centers, "-", lw=0.8, alpha=0.7, label="localization center")
    ax1.set_ylabel("lambda")
    ax1.set_title(f"negative eigenvalues, gamma = {gp.gamma}")
    ax1.legend(loc="upper right")
    ax2.plot(ns, gaps, ".", ms=3)
    ax2.set_xlabel("mode index n")
    ax2.set_ylabel("|lambda - center|")
    ax2.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def counting_figure(report: CountingReport, gp: GammaParam, path: Path) -> Path:
    """Counting function against the quadratic prediction, residual below."""
    r = list(report.r_grid)
    coeff = float(gp.weyl_coefficient)
    pred = [coeff * x * x for x in r]

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    ax1.plot(r, report.N_values, drawstyle="steps-post", lw=1.0, label="N(r)")
    ax1.plot(r, pred, "--", lw=1.0, label=f"{coeff:g} r^2")
    ax1.set_ylabel("count")
    ax1.set_title(f"counting function, gamma = {gp.gamma}")
    ax1.legend(loc="upper left")
    ax2.plot(r, [res / x for res, x in zip(report.residuals, r)], ".", ms=3)
    ax2.axhline(0.0, color="k", lw=0.5)
    ax2.set_xlabel("r")
    ax2.set_ylabel("residual / r")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def field_figure(radii: Sequence[float], e_mags: Sequence[float],
                 b_mags: Sequence[float], lam: float, path: Path) -> Path:
    """Radial decay of the field magnitudes on a log scale."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(radii, e_mags, ".-", label="|E|")
    ax.semilogy(radii, b_mags, ".-", label="|B|")
    ax.set_xlabel("r")
    ax.set_ylabel("field magnitude")
    ax.set_title(f"radial decay, lambda = {lam:.6f}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
