"""Vector figures for run reports.  Output is a convenience; the CSV files are the record."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

UNCOMP_STYLE = dict(color="tab:blue", marker="o", ms=4, ls="none", label="without compensation")
COMP_STYLE = dict(color="tab:red", marker="s", ms=4, ls="none", label="with compensation")

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "figure.figsize": (3.4, 2.6),
    "svg.hashsalt": "polqmem",
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_depth_sweep(report, out_dir) -> Path:
    t = report.tables["depth_sweep"]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(t.column("angle_deg"), t.column("depth_uncompensated"), **UNCOMP_STYLE)
        ax.plot(t.column("angle_deg"), t.column("depth_compensated"), **COMP_STYLE)
        ax.set_xlabel("polarization angle to $D_1$ (deg)")
        ax.set_ylabel("optical depth $d$")
        ax.legend(frameon=False)
        return _save(fig, Path(out_dir) / "depth_sweep.svg")


def plot_efficiency_sweep(report, out_dir) -> Path:
    t = report.tables["efficiency_sweep"]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        pct = lambda xs: [100 * x for x in xs]  # noqa: E731
        ax.plot(t.column("angle_deg"), pct(t.column("efficiency_uncompensated")), **UNCOMP_STYLE)
        ax.plot(t.column("angle_deg"), pct(t.column("efficiency_compensated")), **COMP_STYLE)
        ax.plot(t.column("angle_deg"), pct(t.column("efficiency_uncompensated_effective_depth")),
                color="tab:blue", lw=0.8, label="effective-depth law")
        ax.set_xlabel("polarization angle to $D_1$ (deg)")
        ax.set_ylabel("efficiency (%)")
        ax.legend(frameon=False)
        return _save(fig, Path(out_dir) / "efficiency_sweep.svg")


def plot_profile(report, out_dir) -> Path:
    t = report.tables["profile"]
    z_mm = [1e3 * z for z in t.column("z_m")]
    with plt.rc_context(_RC | {"figure.figsize": (3.4, 4.0)}):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
        ax1.plot(z_mm, t.column("intensity_d1"), label="$D_1$ component")
        ax1.plot(z_mm, t.column("intensity_d2"), ls="--", label="$D_2$ component")
        ax1.set_ylabel("intensity")
        ax1.legend(frameon=False)
        ax2.plot(z_mm, t.column("phase_d1_rad"))
        ax2.plot(z_mm, t.column("phase_d2_rad"), ls="--")
        ax2.set_xlabel("z (mm)")
        ax2.set_ylabel("accumulated phase (rad)")
        return _save(fig, Path(out_dir) / "profile.svg")


def plot_tomography(report, out_dir) -> Path:
    t = report.tables["tomography"]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        labels = t.column("state_label")
        x = range(len(labels))
        ax.errorbar(x, t.column("fidelity"), yerr=t.column("fidelity_sigma"), fmt="s",
                    color="tab:red", capsize=2)
        ax.axhline(2 / 3, color="k", lw=0.8, ls=":", label="classical limit")
        ax.set_xticks(list(x), labels)
        ax.set_ylim(0.6, 1.01)
        ax.set_ylabel("fidelity")
        ax.legend(frameon=False, loc="lower right")
        return _save(fig, Path(out_dir) / "tomography.svg")


def plot_stats(report, out_dir) -> Path:
    import numpy as np

    from . import photon_stats

    t = report.tables["stats_bounds"]
    m = np.logspace(-3, 1, 200)
    g2 = [photon_stats.cross_correlation(photon_stats.TmssSpec(x)) for x in m]
    g2c = [photon_stats.heralded_auto_correlation(photon_stats.TmssSpec(x)) for x in m]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(g2, g2c, color="k", lw=1)
        ax.plot(t.column("g2_si_measured"), t.column("g2_s_given_i_bound"), "o", color="tab:red")
        ax.set_xscale("log")
        ax.set_xlabel(r"$g^{(2)}_{si}$")
        ax.set_ylabel(r"$g^{(2)}_{s|i}$ bound")
        return _save(fig, Path(out_dir) / "stats.svg")


PLOTTERS = {
    "depth_sweep": plot_depth_sweep,
    "efficiency_sweep": plot_efficiency_sweep,
    "profile": plot_profile,
    "tomography": plot_tomography,
    "stats": plot_stats,
}
