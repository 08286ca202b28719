"""Birefringent, anisotropically absorbing crystals and two-crystal arrangements.

Every crystal has its absorption and index axes aligned (D1, D2), so a slab
of any thickness is the diagonal product ``pdl_matrix @ pmd_matrix``.  Pair
arrangements place crystal B after crystal A with one of:

``rotated_pair``
    B rotated by 90 degrees about the propagation axis.  The pair is a
    scalar multiple of the identity.
``hwp_pair``
    B unrotated, a half-wave plate at 45 degrees between the crystals.  The
    pair equals a scalar times the D1/D2 swap.
``aligned_pair``
    B identical and unrotated; the uncompensated reference.

Imperfections are three scalar knobs (wave-plate retardance error, wave-plate
angle error, relative crystal rotation) plus an optional window retarder
applied before and after the pair.  All angles are radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import jones
from .errors import InvalidInputError

DEFAULT_WAVELENGTH = 883e-9
DEFAULT_LENGTH = 0.01
DEFAULT_BEAT_LENGTH = 100e-6
# one full retardation wave per beat length
DEFAULT_DELTA_N = DEFAULT_WAVELENGTH / DEFAULT_BEAT_LENGTH

PAIR_KINDS = ("rotated_pair", "hwp_pair", "aligned_pair")
KINDS = ("single",) + PAIR_KINDS

# Knob values that reproduce the residual polarization dependence seen with
# compensation (about 16 % peak-to-peak depth variation) and fidelities in
# the 95-99 % range.  Not fitted to data.
TYPICAL_IMPERFECTIONS = {
    "hwp_retardance_error": math.radians(5.0),
    "hwp_angle_error": math.radians(5.3),
    "misalignment": math.radians(1.0),
    "window_phase": math.radians(2.0),
    "window_angle": math.radians(30.0),
}


@dataclass(frozen=True)
class CrystalSpec:
    """One crystal: absorption coefficients (1/m), length (m), birefringence n2 - n1."""

    alpha1: float
    alpha2: float
    length: float = DEFAULT_LENGTH
    delta_n: float = DEFAULT_DELTA_N
    wavelength: float = DEFAULT_WAVELENGTH

    def __post_init__(self):
        for name in ("alpha1", "alpha2", "length", "delta_n", "wavelength"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise InvalidInputError("absorption coefficients must be >= 0")
        if self.length <= 0:
            raise InvalidInputError("length must be > 0")
        if self.wavelength <= 0:
            raise InvalidInputError("wavelength must be > 0")

    @classmethod
    def from_depths(cls, d1, d2, biref_phase=None, length=DEFAULT_LENGTH,
                    wavelength=DEFAULT_WAVELENGTH):
        """Build from optical depths; ``biref_phase`` (rad) overrides the default birefringence."""
        if d1 < 0 or d2 < 0:
            raise InvalidInputError("optical depths must be >= 0")
        if biref_phase is None:
            delta_n = DEFAULT_DELTA_N
        else:
            delta_n = biref_phase * wavelength / (2 * math.pi * length)
        return cls(d1 / length, d2 / length, length, delta_n, wavelength)

    @property
    def d1(self) -> float:
        return self.alpha1 * self.length

    @property
    def d2(self) -> float:
        return self.alpha2 * self.length

    @property
    def biref_phase(self) -> float:
        return 2 * math.pi / self.wavelength * self.delta_n * self.length

    def scaled_absorption(self, factor: float) -> "CrystalSpec":
        return replace(self, alpha1=self.alpha1 * factor, alpha2=self.alpha2 * factor)


@dataclass(frozen=True)
class Arrangement:
    kind: str
    crystal_a: CrystalSpec
    crystal_b: CrystalSpec | None = None
    hwp_retardance_error: float = 0.0
    hwp_angle_error: float = 0.0
    misalignment: float = 0.0
    window_phase: float = 0.0
    window_angle: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown arrangement kind {self.kind!r}")
        if self.kind != "single" and self.crystal_b is None:
            raise InvalidInputError(f"{self.kind} needs two crystals")
        for name in ("hwp_retardance_error", "hwp_angle_error", "misalignment",
                     "window_phase", "window_angle"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")

    @classmethod
    def pair(cls, kind, d1_total, d2_total, biref_phase=None, **knobs):
        """Two identical crystals sharing the total depths evenly."""
        c = CrystalSpec.from_depths(d1_total / 2, d2_total / 2, biref_phase)
        return cls(kind, c, c, **knobs)

    @property
    def is_pair(self) -> bool:
        return self.kind != "single"

    @property
    def is_ideal(self) -> bool:
        return (self.hwp_retardance_error == 0 and self.hwp_angle_error == 0
                and self.misalignment == 0 and self.window_phase == 0)

    def crystals(self):
        return (self.crystal_a,) if self.kind == "single" else (self.crystal_a, self.crystal_b)

    def with_absorption_scaled(self, factor: float) -> "Arrangement":
        b = None if self.crystal_b is None else self.crystal_b.scaled_absorption(factor)
        return replace(self, crystal_a=self.crystal_a.scaled_absorption(factor), crystal_b=b)

    def ideal(self) -> "Arrangement":
        return replace(self, hwp_retardance_error=0.0, hwp_angle_error=0.0,
                       misalignment=0.0, window_phase=0.0, window_angle=0.0)

    # Building blocks shared with the memory model.

    def b_rotation(self) -> float:
        base = math.pi / 2 if self.kind == "rotated_pair" else 0.0
        return base + self.misalignment

    def middle_element(self) -> np.ndarray:
        if self.kind == "hwp_pair":
            return jones.waveplate(math.pi + self.hwp_retardance_error,
                                   math.pi / 4 + self.hwp_angle_error)
        return jones.IDENTITY

    def window(self) -> np.ndarray:
        return jones.waveplate(self.window_phase, self.window_angle)

    def ideal_output_frame(self) -> np.ndarray:
        """Unitary the ideal arrangement applies to polarization (identity or swap)."""
        if self.kind == "hwp_pair":
            return jones.waveplate(math.pi, math.pi / 4)
        return jones.IDENTITY


def slab_matrix(c: CrystalSpec, fraction: float = 1.0) -> np.ndarray:
    """TU factor of a slab spanning ``fraction`` of the crystal length."""
    return jones.pdl_matrix(c.d1 * fraction, c.d2 * fraction) @ jones.pmd_matrix(
        c.biref_phase * fraction)


def transmission_matrix(c: CrystalSpec) -> np.ndarray:
    return slab_matrix(c)


def effective_optical_depth(d1: float, d2: float, pol_angle: float) -> float:
    """Optical depth seen by linear polarization at ``pol_angle`` from D1."""
    if d1 < 0 or d2 < 0:
        raise InvalidInputError("optical depths must be >= 0")
    c2 = math.cos(pol_angle) ** 2
    return -math.log(math.exp(-d1) * c2 + math.exp(-d2) * (1 - c2))


def _b_matrix(a: Arrangement, inner: np.ndarray) -> np.ndarray:
    return jones.rotated(inner, a.b_rotation())


def compose_pair(a: Arrangement, first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Full channel when crystal A acts as ``first`` and crystal B (own frame) as ``second``."""
    w = a.window()
    return w @ _b_matrix(a, second) @ a.middle_element() @ first @ w


def pair_transmission(a: Arrangement) -> np.ndarray:
    if not a.is_pair:
        raise InvalidInputError("pair_transmission needs a pair arrangement")
    return compose_pair(a, transmission_matrix(a.crystal_a), transmission_matrix(a.crystal_b))


def arrangement_matrix(a: Arrangement) -> np.ndarray:
    if a.is_pair:
        return pair_transmission(a)
    w = a.window()
    return w @ transmission_matrix(a.crystal_a) @ w


def layered_propagate(a: Arrangement, input: np.ndarray, n_layers: int) -> np.ndarray:
    """Propagate ``input`` slab by slab, ``n_layers`` slabs per crystal."""
    if n_layers < 1:
        raise InvalidInputError("n_layers must be >= 1")
    w = a.window()
    v = w @ np.asarray(input, dtype=complex)
    slab_a = slab_matrix(a.crystal_a, 1 / n_layers)
    for _ in range(n_layers):
        v = slab_a @ v
    if a.is_pair:
        v = a.middle_element() @ v
        slab_b = _b_matrix(a, slab_matrix(a.crystal_b, 1 / n_layers))
        for _ in range(n_layers):
            v = slab_b @ v
    return w @ v


def _state_at(a: Arrangement, v0: np.ndarray, z: float) -> np.ndarray:
    la = a.crystal_a.length
    if z <= la or not a.is_pair:
        return slab_matrix(a.crystal_a, min(z / la, 1.0)) @ v0
    v = a.middle_element() @ (slab_matrix(a.crystal_a) @ v0)
    frac = min((z - la) / a.crystal_b.length, 1.0)
    v = _b_matrix(a, slab_matrix(a.crystal_b, frac)) @ v
    # report in the frame the ideal middle element maps the input axes to
    return a.ideal_output_frame().conj().T @ v


def propagation_profile(a: Arrangement, input: np.ndarray, n_samples: int):
    """Component intensities and accumulated phases sampled along z.

    Returns a structured array with fields ``z``, ``intensity_d1``,
    ``intensity_d2``, ``phase_d1`` and ``phase_d2``.  Downstream of a
    half-wave plate the components are reported in the swapped frame so that
    each trace follows the light that entered along the same axis.  Phases
    are unwrapped along z, so ``n_samples`` must resolve the birefringent
    phase (step below pi per sample).
    """
    if n_samples < 2:
        raise InvalidInputError("n_samples must be >= 2")
    total = sum(c.length for c in a.crystals())
    v0 = a.window() @ np.asarray(input, dtype=complex)
    zs = np.linspace(0.0, total, n_samples)
    states = np.array([_state_at(a, v0, z) for z in zs])
    phases = np.unwrap(np.angle(states), axis=0)
    phases -= phases[0]
    out = np.zeros(n_samples, dtype=[("z", float), ("intensity_d1", float),
                                     ("intensity_d2", float), ("phase_d1", float),
                                     ("phase_d2", float)])
    out["z"] = zs
    out["intensity_d1"] = np.abs(states[:, 0]) ** 2
    out["intensity_d2"] = np.abs(states[:, 1]) ** 2
    out["phase_d1"] = phases[:, 0]
    out["phase_d2"] = phases[:, 1]
    return out


def linear_input(angle: float) -> np.ndarray:
    return jones.jones_vector(math.cos(angle), math.sin(angle))


def transmitted_depth(a: Arrangement, pol_angle: float) -> float:
    """Optical depth ``-ln(P_out/P_in)`` for linear input at ``pol_angle``."""
    out = arrangement_matrix(a) @ linear_input(pol_angle)
    return -math.log(jones.intensity(out))
