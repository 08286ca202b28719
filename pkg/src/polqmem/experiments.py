"""Reproduction runs behind the CLI subcommands.

Each ``run_*`` function takes a validated :class:`ExperimentConfig` and
returns a :class:`RunReport` whose tables depend only on the config (the
master seed included).
"""

from __future__ import annotations

import math

import numpy as np

from . import afc, jones, medium, photon_stats, tomography
from .config import ExperimentConfig
from .report import RunReport, Table


def _report(name: str, cfg: ExperimentConfig) -> RunReport:
    return RunReport(name, cfg.config_hash(), cfg.run.seed, config_text=cfg.to_text())


def _peak_to_peak(values) -> float:
    v = np.asarray(values, dtype=float)
    return float((v.max() - v.min()) / v.mean())


def run_depth_sweep(cfg: ExperimentConfig) -> RunReport:
    """Optical depth versus linear-polarization angle, without and with compensation."""
    uncomp = cfg.arrangement_for("aligned_pair")
    comp = cfg.arrangement_for()
    table = Table(["angle_deg", "depth_uncompensated", "depth_compensated"])
    for deg in cfg.angles_deg():
        a = math.radians(deg)
        table.rows.append([deg, medium.transmitted_depth(uncomp, a),
                           medium.transmitted_depth(comp, a)])
    rep = _report("depth_sweep", cfg)
    rep.tables["depth_sweep"] = table
    du, dc = table.column("depth_uncompensated"), table.column("depth_compensated")
    rep.summary = {
        "uncompensated_min": min(du), "uncompensated_max": max(du),
        "compensated_min": min(dc), "compensated_max": max(dc),
        "compensated_peak_to_peak_over_mean": _peak_to_peak(dc),
    }
    return rep


def run_efficiency_sweep(cfg: ExperimentConfig) -> RunReport:
    """Memory efficiency versus linear-polarization angle.

    ``efficiency_uncompensated`` and ``efficiency_compensated`` propagate the
    Jones vector through the full echo matrix.  The extra column evaluates the
    scalar law at the angle's effective optical depth.
    """
    spec = cfg.afc_spec()
    uncomp = cfg.arrangement_for("aligned_pair")
    comp = cfg.arrangement_for()
    c = cfg.crystal()
    d1_total, d2_total = 2 * c.d1, 2 * c.d2
    table = Table(["angle_deg", "efficiency_uncompensated", "efficiency_compensated",
                   "efficiency_uncompensated_effective_depth"])
    for deg in cfg.angles_deg():
        a = math.radians(deg)
        v = medium.linear_input(a)
        d_eff = medium.effective_optical_depth(d1_total, d2_total, a)
        table.rows.append([
            deg,
            afc.store_and_retrieve(v, uncomp, spec).efficiency,
            afc.store_and_retrieve(v, comp, spec).efficiency,
            afc.forward_efficiency(afc.comb_depth(d_eff, spec), spec),
        ])
    rep = _report("efficiency_sweep", cfg)
    rep.tables["efficiency_sweep"] = table
    eu, ec = table.column("efficiency_uncompensated"), table.column("efficiency_compensated")
    rep.summary = {
        "uncompensated_min": min(eu), "uncompensated_max": max(eu),
        "uncompensated_ratio": max(eu) / min(eu),
        "compensated_min": min(ec), "compensated_max": max(ec),
    }
    return rep


def run_profile(cfg: ExperimentConfig) -> RunReport:
    """Component intensity and phase along the configured pair."""
    a = cfg.arrangement_for()
    v = jones.standard_state(cfg.profile.input_state)
    prof = medium.propagation_profile(a, v, cfg.profile.n_samples)
    table = Table(["z_m", "intensity_d1", "intensity_d2", "phase_d1_rad", "phase_d2_rad"])
    for r in prof:
        table.rows.append([float(r["z"]), float(r["intensity_d1"]), float(r["intensity_d2"]),
                           float(r["phase_d1"]), float(r["phase_d2"])])
    rep = _report("profile", cfg)
    rep.tables["profile"] = table
    end = prof[-1]
    rep.summary = {
        "output_intensity": float(end["intensity_d1"] + end["intensity_d2"]),
        "output_phase_difference": float(end["phase_d2"] - end["phase_d1"]),
    }
    return rep


def _state_seeds(master: int, n: int) -> list[tuple[int, int]]:
    children = np.random.SeedSequence(master).spawn(n)
    return [tuple(int(x) for x in ch.generate_state(2)) for ch in children]


def run_tomography_experiment(cfg: ExperimentConfig) -> RunReport:
    """Store each input state, simulate tomography counts, reconstruct, compare.

    The reference state is what the ideal arrangement would output, i.e. the
    input itself for ``rotated_pair`` and its D1/D2 swap for ``hwp_pair``.
    """
    a = cfg.arrangement_for()
    spec = cfg.afc_spec()
    t = cfg.tomography
    table = Table(["state_label", "fidelity", "fidelity_sigma", "g2_si",
                   "exceeds_classical_bound"])
    margins = {}
    for label, mean_n, (count_seed, mc_seed) in zip(
            t.states, cfg.mean_n_for_states(), _state_seeds(cfg.run.seed, len(t.states))):
        psi = jones.standard_state(label)
        result = afc.store_and_retrieve(psi, a, spec)
        target = jones.normalize(a.ideal_output_frame() @ psi)
        rho_out = tomography.density_matrix(result.output_state)
        counts = tomography.simulate_counts(rho_out, t.n_per_setting, count_seed)
        rho = tomography.mle_reconstruct(counts)
        f = tomography.fidelity(rho, target)
        mc = tomography.monte_carlo_uncertainty(counts, target, t.mc_trials, mc_seed)
        verdict = tomography.classical_bound_check(f, mc.std)
        g2 = photon_stats.cross_correlation(photon_stats.TmssSpec(mean_n))
        table.rows.append([label, f, mc.std, g2, verdict.exceeds])
        margins[label] = verdict.margin_sigma
    rep = _report("tomography", cfg)
    rep.tables["tomography"] = table
    fids = table.column("fidelity")
    rep.summary = {"mean_fidelity": float(np.mean(fids)), "margin_sigma": margins}
    return rep


def run_stats(cfg: ExperimentConfig) -> RunReport:
    """Photon statistics for the configured source and bounds from measured g2."""
    src = Table(["mean_n", "g2_si", "g2_s_given_i", "nonclassical"])
    for m in cfg.source.mean_n:
        s = photon_stats.TmssSpec(m)
        g2 = photon_stats.cross_correlation(s)
        src.rows.append([m, g2, photon_stats.heralded_auto_correlation(s),
                         photon_stats.nonclassicality_check(g2) == "nonclassical"])
    bounds = Table(["g2_si_measured", "mean_n", "g2_s_given_i_bound", "nonclassical"])
    for g in cfg.source.g2_si:
        nonclassical = photon_stats.nonclassicality_check(g) == "nonclassical"
        if nonclassical:
            m = photon_stats.mean_n_from_cross(g)
            bound = photon_stats.heralded_auto_correlation(photon_stats.TmssSpec(m))
        else:
            m, bound = float("nan"), float("nan")
        bounds.rows.append([g, m, bound, nonclassical])
    rep = _report("stats", cfg)
    rep.tables["stats_source"] = src
    rep.tables["stats_bounds"] = bounds
    finite = [b for b in bounds.column("g2_s_given_i_bound") if not math.isnan(b)]
    rep.summary = {"worst_case_g2_s_given_i": max(finite) if finite else None}
    return rep
