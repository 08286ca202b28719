"""Atomic-frequency-comb echo amplitudes for one crystal and for crystal pairs.

The comb is reduced to its finesse ``F`` (comb depth ``d/F``) and a
multiplicative decoherence factor.  The decoherence factor multiplies the
echo *amplitude*, so efficiencies scale with its square.

Echo matrices are built as a coherent sum over storage positions: light
propagates to the storage point, is re-emitted, and propagates out.  For a
pair the two terms are "stored in A, transmitted through B" and "transmitted
through A, stored in B".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import jones
from .errors import InvalidInputError, UnsupportedConfigurationError
from .medium import Arrangement, CrystalSpec, arrangement_matrix, compose_pair, slab_matrix

FORWARD_LIMIT = 4 * math.exp(-2)
# below this the birefringent phase counts as negligible for backward readout
BACKWARD_PHASE_TOL = 1e-12


@dataclass(frozen=True)
class AfcSpec:
    finesse: float = 1.0
    decoherence_factor: float = 1.0
    readout: str = "forward"

    def __post_init__(self):
        if not (math.isfinite(self.finesse) and self.finesse >= 1):
            raise InvalidInputError("finesse must be >= 1")
        if not 0 <= self.decoherence_factor <= 1:
            raise InvalidInputError("decoherence_factor must lie in [0, 1]")
        if self.readout not in ("forward", "backward"):
            raise InvalidInputError("readout must be 'forward' or 'backward'")


@dataclass(frozen=True)
class MemoryResult:
    output_state: np.ndarray
    efficiency: float
    transmitted_leakage: float


def _check_depth(d):
    if not (math.isfinite(d) and d >= 0):
        raise InvalidInputError(f"optical depth must be finite and >= 0, got {d!r}")


def comb_depth(d: float, afc: AfcSpec) -> float:
    _check_depth(d)
    return d / afc.finesse


def forward_echo_amplitude(d: float) -> float:
    """Square root of the forward efficiency for comb depth ``d``: ``d*exp(-d/2)``."""
    _check_depth(d)
    return d * math.exp(-d / 2)


def forward_efficiency(d: float, afc: AfcSpec | None = None) -> float:
    c = 1.0 if afc is None else afc.decoherence_factor
    return (forward_echo_amplitude(d) * c) ** 2


def backward_efficiency(d: float) -> float:
    _check_depth(d)
    return (-math.expm1(-d)) ** 2


def _comb_crystal(c: CrystalSpec, afc: AfcSpec) -> CrystalSpec:
    return c.scaled_absorption(1 / afc.finesse)


def _forward_echo(c: CrystalSpec) -> np.ndarray:
    """Forward echo matrix of one crystal whose depths are already comb depths."""
    return np.diag([forward_echo_amplitude(c.d1),
                    np.exp(1j * c.biref_phase) * forward_echo_amplitude(c.d2)])


def _backward_echo(c: CrystalSpec) -> np.ndarray:
    if abs(c.biref_phase) > BACKWARD_PHASE_TOL:
        raise UnsupportedConfigurationError(
            "backward readout is modelled only for negligible birefringence (phase = 0)")
    return np.diag([-math.expm1(-c.d1), -math.expm1(-c.d2)]).astype(complex)


def memory_matrix_single(c: CrystalSpec, afc: AfcSpec) -> np.ndarray:
    """Echo Jones matrix of one crystal prepared as a comb."""
    cc = _comb_crystal(c, afc)
    if afc.readout == "forward":
        m = _forward_echo(cc)
    else:
        m = _backward_echo(cc)
    return afc.decoherence_factor * m


def memory_matrix_pair(a: Arrangement, afc: AfcSpec) -> np.ndarray:
    """Echo Jones matrix of a two-crystal arrangement, including imperfections."""
    if not a.is_pair:
        raise InvalidInputError("memory_matrix_pair needs a pair arrangement")
    ca, cb = _comb_crystal(a.crystal_a, afc), _comb_crystal(a.crystal_b, afc)
    ta, tb = slab_matrix(ca), slab_matrix(cb)
    if afc.readout == "forward":
        m = compose_pair(a, _forward_echo(ca), tb) + compose_pair(a, ta, _forward_echo(cb))
    else:
        m = _backward_pair(a, ca, cb, ta)
    return afc.decoherence_factor * m


def _backward_pair(a: Arrangement, ca, cb, ta) -> np.ndarray:
    # re-emission travels back out through the input facet; reciprocal
    # elements transpose on the return trip
    ea, eb = _backward_echo(ca), _backward_echo(cb)
    mid = a.middle_element()
    w = a.window()
    b = jones.rotated(eb, a.b_rotation())
    round_trip_b = ta.T @ mid.T @ b @ mid @ ta
    return w.T @ (ea + round_trip_b) @ w


def memory_matrix(a: Arrangement, afc: AfcSpec) -> np.ndarray:
    if a.is_pair:
        return memory_matrix_pair(a, afc)
    w = a.window()
    if afc.readout == "backward":
        return w.T @ memory_matrix_single(a.crystal_a, afc) @ w
    return w @ memory_matrix_single(a.crystal_a, afc) @ w


def comb_transmission(a: Arrangement, afc: AfcSpec) -> np.ndarray:
    """Jones matrix of light passing the comb-prepared memory without being stored."""
    return arrangement_matrix(a.with_absorption_scaled(1 / afc.finesse))


def store_and_retrieve(input: np.ndarray, a: Arrangement, afc: AfcSpec) -> MemoryResult:
    v = np.asarray(input, dtype=complex)
    n_in = jones.intensity(v)
    if abs(n_in - 1) > 1e-9:
        raise InvalidInputError("input state must be normalized")
    out = memory_matrix(a, afc) @ v
    eff = jones.intensity(out)
    leak = jones.intensity(comb_transmission(a, afc) @ v)
    state = out / math.sqrt(eff) if eff > 0 else np.zeros(2, dtype=complex)
    return MemoryResult(state, eff, leak)


def fit_comb_to_range(d1_total: float, d2_total: float, eta_min: float, eta_max: float):
    """Finesse and decoherence factor reproducing an uncompensated efficiency range.

    The extremes are taken at linear polarization along D1 (largest depth) and
    D2, with both comb depths below the forward optimum.  Returns
    ``(finesse, decoherence_factor)``.
    """
    if not (0 < eta_min < eta_max) or d1_total <= d2_total:
        raise InvalidInputError("need 0 < eta_min < eta_max and d1_total > d2_total")

    def log_ratio(f):
        return (math.log(forward_efficiency(d1_total / f) / forward_efficiency(d2_total / f))
                - math.log(eta_max / eta_min))

    # comb depths stay at or below 2 so the ratio is monotone in F
    f_lo = max(1.0, d1_total / 2)
    if log_ratio(f_lo) > 0:
        raise InvalidInputError("efficiency ratio too small for comb depths below 2")
    f_hi = f_lo
    while log_ratio(f_hi) < 0:
        f_hi *= 2
        if f_hi > 1e6:
            raise InvalidInputError("efficiency ratio exceeds (d1/d2)**2")
    finesse = scipy.optimize.brentq(log_ratio, f_lo, f_hi, xtol=1e-14)
    decoherence = math.sqrt(eta_max / forward_efficiency(d1_total / finesse))
    if decoherence > 1:
        raise InvalidInputError("eta_max is not reachable with these depths")
    return finesse, decoherence
