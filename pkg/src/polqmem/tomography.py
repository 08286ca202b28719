"""Single-qubit polarization tomography: simulated counts, maximum likelihood, fidelity.

Measurements are projections along the three Poincare axes, each recorded
by a two-detector analyzer:

=======  ==========  ==========
setting  detector +  detector -
=======  ==========  ==========
Z        H           V
X        D           A
Y        L           R
=======  ==========  ==========

Counts in each of the six cells are modelled as independent Poisson
variables.  Reconstruction maximizes that likelihood over physical density
matrices written as ``rho = G^dagger G / tr(G^dagger G)`` with ``G`` lower
triangular.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.optimize

from . import jones
from .errors import ConvergenceError, DegenerateDataError, InvalidInputError

SETTINGS = ("Z", "X", "Y")
DETECTORS = (("H", "V"), ("D", "A"), ("L", "R"))
CLASSICAL_FIDELITY_LIMIT = 2 / 3

MAX_ITER = 100_000
FTOL = 1e-12
DENSITY_TOL = 1e-10

# rows ordered (Z+, Z-, X+, X-, Y+, Y-)
PROJECTORS = np.array([jones.standard_state(name) for pair in DETECTORS for name in pair])


@dataclass
class CountRecord:
    """Coincidence counts per (setting, detector) cell, shape ``(3, 2)``."""

    counts: np.ndarray
    n_per_setting: int | None = None
    seed: int | None = None

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.shape != (3, 2):
            raise InvalidInputError("counts must have shape (3, 2)")
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise InvalidInputError("counts must be finite and nonnegative")
        if np.any(c != np.round(c)):
            raise InvalidInputError("counts must be integers")
        self.counts = c.astype(np.int64)

    def cell(self, setting: str, detector: str) -> int:
        i = SETTINGS.index(setting)
        return int(self.counts[i, DETECTORS[i].index(detector)])

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write("setting,detector,count\n")
        for i, s in enumerate(SETTINGS):
            for j, d in enumerate(DETECTORS[i]):
                buf.write(f"{s},{d},{self.counts[i, j]}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "CountRecord":
        counts = np.full((3, 2), -1, dtype=np.int64)
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if lines and lines[0].lower().startswith("setting"):
            lines = lines[1:]
        for ln in lines:
            try:
                s, d, n = (x.strip() for x in ln.split(","))
                i = SETTINGS.index(s)
                j = DETECTORS[i].index(d)
                counts[i, j] = int(n)
            except ValueError as exc:
                raise InvalidInputError(f"bad count row {ln!r}") from exc
        if np.any(counts < 0):
            raise InvalidInputError("count table must list all six cells with counts >= 0")
        return cls(counts)


class McResult(NamedTuple):
    mean: float
    std: float
    failures: int


@dataclass(frozen=True)
class BoundVerdict:
    exceeds: bool
    margin_sigma: float | None = None

    @property
    def label(self) -> str:
        return "exceeds" if self.exceeds else "not_exceeds"


@dataclass
class MleFit:
    rho: np.ndarray
    objective_history: list = field(default_factory=list)
    n_iter: int = 0
    message: str = ""


def density_matrix(psi) -> np.ndarray:
    psi = jones.normalize(np.asarray(psi, dtype=complex))
    return np.outer(psi, psi.conj())


def validate_density_matrix(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or not np.all(np.isfinite(rho)):
        raise InvalidInputError("density matrix must be a finite 2x2 array")
    if not np.allclose(rho, rho.conj().T, rtol=0, atol=tol):
        raise InvalidInputError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise InvalidInputError("density matrix trace is not 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise InvalidInputError("density matrix has a negative eigenvalue")
    return rho


def _efficiency_array(detector_efficiency):
    if detector_efficiency is None:
        return np.ones((3, 2))
    eff = np.asarray(detector_efficiency, dtype=float)
    if eff.shape != (3, 2) or np.any(eff <= 0):
        raise InvalidInputError("detector_efficiency must be a positive (3, 2) array")
    return eff


def projection_probabilities(rho) -> np.ndarray:
    """``<p|rho|p>`` for the six projectors, shape ``(3, 2)``."""
    p = np.einsum("ki,ij,kj->k", PROJECTORS.conj(), rho, PROJECTORS).real
    return p.reshape(3, 2)


def expected_counts(rho, n_per_setting: int, detector_efficiency=None) -> np.ndarray:
    rho = validate_density_matrix(rho)
    return n_per_setting * _efficiency_array(detector_efficiency) * projection_probabilities(rho)


def simulate_counts(rho, n_per_setting: int, seed: int, detector_efficiency=None) -> CountRecord:
    """Draw Poisson counts with means ``n_per_setting * <p|rho|p>``."""
    if n_per_setting < 1:
        raise InvalidInputError("n_per_setting must be >= 1")
    means = np.clip(expected_counts(rho, n_per_setting, detector_efficiency), 0, None)
    rng = np.random.default_rng(seed)
    return CountRecord(rng.poisson(means), n_per_setting=n_per_setting, seed=seed)


def noise_free_counts(rho, n_per_setting: int) -> CountRecord:
    """Expected counts rounded to integers."""
    return CountRecord(np.rint(expected_counts(rho, n_per_setting)), n_per_setting=n_per_setting)


def linear_inversion(counts: CountRecord) -> np.ndarray:
    """Unconstrained estimate from the three Stokes contrasts (may be unphysical)."""
    c = counts.counts.astype(float)
    tot = c.sum(axis=1)
    s = np.divide(c[:, 0] - c[:, 1], tot, out=np.zeros(3), where=tot > 0)
    sz, sx, sy = s
    return 0.5 * np.array([[1 + sz, sx - 1j * sy], [sx + 1j * sy, 1 - sz]])


def _initial_params(counts: CountRecord) -> np.ndarray:
    rho = linear_inversion(counts)
    # pull into the interior of the Bloch ball
    s = np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])
    r = np.linalg.norm(s)
    if r > 0.99:
        s *= 0.99 / r
    rho = 0.5 * np.array([[1 + s[2], s[0] - 1j * s[1]], [s[0] + 1j * s[1], 1 - s[2]]])
    # rho = G^dagger G with G lower: Cholesky of the index-reversed matrix
    j = np.array([[0, 1], [1, 0]])
    low = np.linalg.cholesky(j @ rho @ j)
    g = (j @ low @ j).conj().T
    return np.array([g[0, 0].real, g[1, 1].real, g[1, 0].real, g[1, 0].imag])


def _g_matrix(x) -> np.ndarray:
    return np.array([[x[0], 0], [x[2] + 1j * x[3], x[1]]])


def _rho_from_params(x) -> np.ndarray:
    g = _g_matrix(x)
    m = g.conj().T @ g
    return m / np.trace(m).real


class _PoissonObjective:
    """Per-count Poisson deviance and its gradient in the G parameters."""

    def __init__(self, counts: CountRecord, detector_efficiency=None):
        n = counts.counts.astype(float).ravel()
        self.n = n
        self.total = n.sum()
        self.scale = (self.total / 3) * _efficiency_array(detector_efficiency).ravel()
        self.p = PROJECTORS
        self._nlogn = np.where(n > 0, n * np.log(np.where(n > 0, n, 1)), 0.0)

    def __call__(self, x):
        g = _g_matrix(x)
        w = self.p @ g.T
        lam = self.scale * (np.abs(w) ** 2).sum(axis=1)
        if np.any((lam <= 0) & (self.n > 0)):
            return np.inf, np.zeros(4)
        with np.errstate(divide="ignore"):
            log_lam = np.log(np.where(lam > 0, lam, 1.0))
        f = np.sum(lam - self.n - self.n * log_lam + self._nlogn) / self.total
        coef = np.divide(self.n, lam, out=np.zeros_like(lam), where=lam > 0)
        c = 2 * self.scale * (1 - coef) / self.total
        p0, p1 = self.p[:, 0], self.p[:, 1]
        w0c, w1c = w[:, 0].conj(), w[:, 1].conj()
        grad = np.array([
            np.sum(c * (w0c * p0).real),
            np.sum(c * (w1c * p1).real),
            np.sum(c * (w1c * p0).real),
            -np.sum(c * (w1c * p0).imag),
        ])
        return f, grad


def mle_fit(counts: CountRecord, detector_efficiency=None) -> MleFit:
    """Maximum-likelihood density matrix plus the optimizer trace."""
    c = counts.counts
    if c.sum() == 0:
        raise DegenerateDataError("all counts are zero")
    if np.any(c.sum(axis=1) == 0):
        raise DegenerateDataError("a measurement setting has no counts")
    obj = _PoissonObjective(counts, detector_efficiency)
    x0 = _initial_params(counts)
    history = [obj(x0)[0]]

    def record(intermediate_result):
        history.append(float(intermediate_result.fun))

    res = scipy.optimize.minimize(
        obj, x0, jac=True, method="L-BFGS-B", callback=record,
        options={"maxiter": MAX_ITER, "ftol": FTOL, "gtol": 1e-12, "maxls": 50},
    )
    rho = _rho_from_params(res.x)
    rho = (rho + rho.conj().T) / 2
    fit = MleFit(rho, history, int(res.nit), str(res.message))
    if res.status == 1:
        raise ConvergenceError(f"maximum likelihood did not converge: {res.message}", best=fit)
    return fit


def mle_reconstruct(counts: CountRecord, detector_efficiency=None) -> np.ndarray:
    return mle_fit(counts, detector_efficiency).rho


def fidelity(rho, psi) -> float:
    """Overlap ``<psi|rho|psi>`` with a normalized pure state."""
    psi = np.asarray(psi, dtype=complex)
    if abs(jones.intensity(psi) - 1) > 1e-9:
        raise InvalidInputError("psi must be normalized")
    f = np.vdot(psi, np.asarray(rho) @ psi).real
    return float(min(max(f, 0.0), 1.0))


def monte_carlo_uncertainty(counts: CountRecord, psi, trials: int, seed: int,
                            detector_efficiency=None) -> McResult:
    """Fidelity mean and standard deviation over Poisson-resampled count tables.

    Each trial redraws every cell from a Poisson law whose mean is the
    observed count.  Trials whose reconstruction fails are dropped and
    counted in ``failures``.
    """
    if trials < 2:
        raise InvalidInputError("trials must be >= 2")
    rng = np.random.default_rng(seed)
    samples = rng.poisson(counts.counts.astype(float), size=(trials, 3, 2))
    fids = []
    failures = 0
    for s in samples:
        try:
            rho = mle_reconstruct(CountRecord(s), detector_efficiency)
        except (DegenerateDataError, ConvergenceError):
            failures += 1
            continue
        fids.append(fidelity(rho, psi))
    if len(fids) < 2:
        raise DegenerateDataError(f"only {len(fids)} of {trials} Monte-Carlo trials succeeded")
    return McResult(float(np.mean(fids)), float(np.std(fids, ddof=1)), failures)


def classical_bound_check(f: float, sigma: float | None = None) -> BoundVerdict:
    """Compare a fidelity with the 2/3 measure-and-prepare limit (strict)."""
    if not 0 <= f <= 1:
        raise InvalidInputError("fidelity must lie in [0, 1]")
    margin = None
    if sigma is not None and sigma > 0:
        margin = (f - CLASSICAL_FIDELITY_LIMIT) / sigma
    elif sigma == 0:
        margin = math.inf if f > CLASSICAL_FIDELITY_LIMIT else -math.inf
    return BoundVerdict(f > CLASSICAL_FIDELITY_LIMIT, margin)
