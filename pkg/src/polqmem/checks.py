"""Fast invariant suite behind ``polqmem selfcheck``.

Each check draws its random parameters from a generator seeded with the
master seed and reports the worst deviation it saw against a fixed tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from . import afc, jones, medium, photon_stats, tomography
from .config import ExperimentConfig
from .report import RunReport, Table


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float


def _random_pair(rng, kind="rotated_pair"):
    d1, d2 = rng.uniform(0, 5, 2)
    phase = rng.uniform(0, 2 * math.pi)
    c = medium.CrystalSpec.from_depths(d1, d2, phase)
    return medium.Arrangement(kind, c, c)


def _random_pure(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return jones.normalize(v)


def check_compensation(rng, trials=200) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        a = _random_pair(rng)
        c, resid = jones.scalar_part(medium.pair_transmission(a))
        target = math.exp(-(a.crystal_a.d1 + a.crystal_a.d2))
        worst = max(worst, resid, abs(abs(c) ** 2 - target))
    return CheckResult("compensation_identity", worst < 1e-12, worst, 1e-12)


def check_echo_identity(rng, trials=200) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        a = _random_pair(rng)
        spec = afc.AfcSpec(finesse=rng.uniform(1, 5))
        m = afc.memory_matrix_pair(a, spec)
        dsum = (a.crystal_a.d1 + a.crystal_a.d2) / spec.finesse
        c, resid = jones.scalar_part(m)
        worst = max(worst, resid, abs(abs(c) - dsum * math.exp(-dsum / 2)))
    return CheckResult("echo_identity", worst < 1e-12, worst, 1e-12)


def check_single_quadrature(rng, trials=20) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        d1, d2 = rng.uniform(0, 5, 2)
        phase = rng.uniform(0, 2 * math.pi)
        c = medium.CrystalSpec.from_depths(d1, d2, phase)
        closed = afc.memory_matrix_single(c, afc.AfcSpec())
        for k, alpha in enumerate((c.alpha1, c.alpha2)):
            length = c.length

            def integrand(z, part):
                ph = c.biref_phase if k == 1 else 0.0
                val = (math.exp(-alpha * (length - z) / 2) * alpha * math.exp(-alpha * z / 2)
                       * np.exp(1j * ph * (length - z) / length) * np.exp(1j * ph * z / length))
                return val.real if part == 0 else val.imag

            re = scipy.integrate.quad(integrand, 0, length, args=(0,), epsabs=1e-14)[0]
            im = scipy.integrate.quad(integrand, 0, length, args=(1,), epsabs=1e-14)[0]
            worst = max(worst, abs(closed[k, k] - (re + 1j * im)))
    return CheckResult("single_crystal_quadrature", worst < 1e-10, worst, 1e-10)


def check_polarization_independence(rng, trials=100) -> CheckResult:
    a = medium.Arrangement.pair("rotated_pair", 2.70, 0.99, biref_phase=1.3)
    spec = afc.AfcSpec(3.0, 0.6)
    effs, worst_dir = [], 0.0
    for _ in range(trials):
        v = _random_pure(rng)
        r = afc.store_and_retrieve(v, a, spec)
        effs.append(r.efficiency)
        d_in = jones.jones_to_stokes(v).direction()
        d_out = jones.jones_to_stokes(r.output_state).direction()
        worst_dir = max(worst_dir, float(np.max(np.abs(d_in - d_out))))
    worst = max(max(effs) - min(effs), worst_dir)
    return CheckResult("polarization_independent_storage", worst < 1e-10, worst, 1e-10)


def check_layered(rng, trials=10) -> CheckResult:
    worst = 0.0
    for _ in range(trials):
        a = _random_pair(rng, kind=rng.choice(medium.PAIR_KINDS))
        v = _random_pure(rng)
        exact = medium.pair_transmission(a) @ v
        worst = max(worst, float(np.max(np.abs(medium.layered_propagate(a, v, 500) - exact))))
    return CheckResult("layered_propagation", worst < 1e-9, worst, 1e-9)


def check_tomography_roundtrip(rng, trials=20) -> CheckResult:
    worst = 0.0
    for name in ("H", "V", "L", "+", "alpha"):
        psi = jones.standard_state(name)
        fit = tomography.mle_reconstruct(
            tomography.noise_free_counts(tomography.density_matrix(psi), 100_000))
        worst = max(worst, 1 - tomography.fidelity(fit, psi))
    return CheckResult("tomography_noise_free_roundtrip", worst < 1e-4, worst, 1e-4)


def check_photon_stats(rng) -> CheckResult:
    s = photon_stats.TmssSpec(0.25)
    worst = max(abs(photon_stats.cross_correlation(s) - 6.0),
                abs(photon_stats.bound_from_cross(6.0) - 11 / 18))
    return CheckResult("photon_statistics", worst < 1e-9, worst, 1e-9)


CHECKS = [check_compensation, check_echo_identity, check_single_quadrature,
          check_polarization_independence, check_layered, check_tomography_roundtrip,
          check_photon_stats]


def run_selfcheck(cfg: ExperimentConfig) -> RunReport:
    rng = np.random.default_rng(cfg.run.seed)
    table = Table(["check", "passed", "worst_deviation", "tolerance"])
    for check in CHECKS:
        r = check(rng)
        table.rows.append([r.name, r.passed, r.worst, r.tolerance])
    rep = RunReport("selfcheck", cfg.config_hash(), cfg.run.seed, config_text=cfg.to_text())
    rep.tables["selfcheck"] = table
    rep.summary = {"all_passed": all(table.column("passed"))}
    return rep
