"""Jones calculus for polarization states and two-port linear channels.

Jones vectors are complex numpy arrays of shape ``(2,)`` and Jones matrices
are complex arrays of shape ``(2, 2)``.  Component 1 is the amplitude along
the crystal axis D1, which in the default arrangement coincides with the
laboratory horizontal (H).  Component 2 is along D2 (laboratory V).

Conventions fixed here and used by every other module:

* rotation by ``angle`` is ``[[cos, -sin], [sin, cos]]``;
* birefringent retardation is referenced to D1: ``diag(1, exp(i*phase))``;
* circular states follow ``L = (1, i)/sqrt(2)`` and ``R = (1, -i)/sqrt(2)``,
  so that ``L`` has Stokes ``s3 = +1``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DecompositionError, InvalidInputError

ALGEBRA_TOL = 1e-12
DECOMPOSITION_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)

_S2 = 1 / math.sqrt(2)
# amplitudes of the elliptical state prepared from H with a quarter-wave plate
ALPHA_QWP = (1 + 1j * math.sqrt(2)) / 2
BETA_QWP = 0.5

_STATES = {
    "H": (1, 0),
    "V": (0, 1),
    "D": (_S2, _S2),
    "+": (_S2, _S2),
    "A": (_S2, -_S2),
    "-": (_S2, -_S2),
    "L": (_S2, 1j * _S2),
    "R": (_S2, -1j * _S2),
    "alpha": (ALPHA_QWP, BETA_QWP),
}


class StokesVector(NamedTuple):
    s0: float
    s1: float
    s2: float
    s3: float

    def direction(self) -> np.ndarray:
        """Unit vector (s1, s2, s3)/|s| on the Poincare sphere."""
        v = np.array([self.s1, self.s2, self.s3])
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidInputError("unpolarized light has no Stokes direction")
        return v / norm


def _check_finite(name, value):
    if not np.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")


def jones_vector(a1, a2) -> np.ndarray:
    return np.array([a1, a2], dtype=complex)


def normalize(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InvalidInputError("cannot normalize the zero vector")
    return v / norm


def intensity(v: np.ndarray) -> float:
    return float(np.vdot(v, v).real)


def rotation_matrix(angle: float) -> np.ndarray:
    """Rotation of the transverse frame by ``angle`` radians."""
    _check_finite("angle", angle)
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def pdl_matrix(d1: float, d2: float) -> np.ndarray:
    """Amplitude attenuation ``diag(exp(-d1/2), exp(-d2/2))`` for optical depths d1, d2."""
    for name, d in (("d1", d1), ("d2", d2)):
        _check_finite(name, d)
        if d < 0:
            raise InvalidInputError(f"{name} must be >= 0, got {d!r}")
    return np.diag([math.exp(-d1 / 2), math.exp(-d2 / 2)]).astype(complex)


def pmd_matrix(phase: float) -> np.ndarray:
    """Retardation of the D2 component by ``phase`` relative to D1."""
    _check_finite("phase", phase)
    return np.diag([1, np.exp(1j * phase)]).astype(complex)


def rotated(m: np.ndarray, angle: float) -> np.ndarray:
    """Jones matrix of element ``m`` physically rotated by ``angle`` about z."""
    return rotation_matrix(-angle) @ m @ rotation_matrix(angle)


def waveplate(retardance: float, angle: float = 0.0) -> np.ndarray:
    """Linear retarder with its slow axis at ``angle`` from D1."""
    return rotated(pmd_matrix(retardance), angle)


def tu_decompose(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``m = t @ u`` with ``t`` Hermitian positive (PDL) and ``u`` unitary (PMD).

    This is the left polar decomposition; it is unique for nonsingular ``m``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise DecompositionError("expected a finite 2x2 matrix")
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= DECOMPOSITION_TOL * max(sv[0], 1.0):
        raise DecompositionError("matrix is singular; no unique PDL/PMD split")
    u, t = scipy.linalg.polar(m, side="left")
    t = (t + t.conj().T) / 2
    return t, u


def apply(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    return m @ v


def jones_to_stokes(v: np.ndarray) -> StokesVector:
    a1, a2 = v
    p1, p2 = abs(a1) ** 2, abs(a2) ** 2
    cross = np.conj(a1) * a2
    return StokesVector(p1 + p2, p1 - p2, 2 * cross.real, 2 * cross.imag)


def standard_state(name: str) -> np.ndarray:
    """Named polarization state: H, V, D (or +), A (or -), L, R, or ``alpha``.

    ``alpha`` is the elliptical state ``alpha|H> + beta|V>`` with
    ``alpha = (1 + i*sqrt(2))/2`` and ``beta = 1/2``.
    """
    try:
        return jones_vector(*_STATES[name])
    except KeyError:
        raise InvalidInputError(
            f"unknown state {name!r}; expected one of {sorted(_STATES)}"
        ) from None


def is_unitary(m: np.ndarray, tol: float = ALGEBRA_TOL) -> bool:
    return bool(np.allclose(m.conj().T @ m, IDENTITY, rtol=0, atol=tol))


def is_pdl(m: np.ndarray, tol: float = ALGEBRA_TOL) -> bool:
    """Hermitian positive with real entries in (0, 1]."""
    if not np.allclose(m, m.conj().T, rtol=0, atol=tol):
        return False
    if np.any(np.abs(m.imag) > tol):
        return False
    eig = np.linalg.eigvalsh(m)
    return bool(np.all(eig > 0) and np.all(eig <= 1 + tol))


def scalar_part(m: np.ndarray) -> tuple[complex, float]:
    """Best scalar ``c`` with ``m ~ c*I`` and the Frobenius residual ``|m - c*I|``."""
    c = np.trace(m) / 2
    return complex(c), float(np.linalg.norm(m - c * IDENTITY))
