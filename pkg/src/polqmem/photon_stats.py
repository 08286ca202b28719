"""Photon-number statistics of a two-mode squeezed vacuum source.

Each mode has a thermal marginal ``P(n) = m**n / (1 + m)**(n + 1)`` and the
two modes carry identical photon numbers.  Correlation functions are
computed by direct summation over the truncated joint distribution; closed
forms appear only in tests.

The heralded auto-correlation assumes a low-efficiency herald: the
probability that an idler detection fires is proportional to the idler
photon number, so the heralded signal distribution is ``P'(n) ~ n P(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import CutoffTooSmallError, InvalidInputError, OutOfModelError

TAIL_TOL = 1e-12
# third moments converge slower than the probability mass
MOMENT_TOL = 1e-16
MAX_CUTOFF = 100_000
CLASSICAL_CROSS_LIMIT = 2.0


def tail_mass(mean_n: float, cutoff: int) -> float:
    """Probability of more than ``cutoff`` photons in one thermal mode."""
    return (mean_n / (1 + mean_n)) ** (cutoff + 1)


def default_cutoff(mean_n: float) -> int:
    """Smallest truncation whose tail mass, weighted by ``(N+1)**3``, is below ``MOMENT_TOL``."""
    ratio = mean_n / (1 + mean_n)
    if ratio == 0:
        return 1
    n = max(1, math.ceil(math.log(MOMENT_TOL) / math.log(ratio)) - 1)
    while tail_mass(mean_n, n) * (n + 1) ** 3 >= MOMENT_TOL:
        n += 1
    if n > MAX_CUTOFF:
        raise CutoffTooSmallError(f"mean_n={mean_n} needs a cutoff above {MAX_CUTOFF}")
    return n


@dataclass(frozen=True)
class TmssSpec:
    mean_n: float
    cutoff: int | None = None

    def __post_init__(self):
        if not (math.isfinite(self.mean_n) and self.mean_n > 0):
            raise InvalidInputError("mean_n must be finite and > 0")
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", default_cutoff(self.mean_n))
        elif self.cutoff < 1:
            raise InvalidInputError("cutoff must be >= 1")
        elif tail_mass(self.mean_n, self.cutoff) >= TAIL_TOL:
            raise CutoffTooSmallError(
                f"cutoff {self.cutoff} leaves tail mass "
                f"{tail_mass(self.mean_n, self.cutoff):.3g} for mean_n={self.mean_n}")


def photon_number_dist(spec: TmssSpec) -> np.ndarray:
    n = np.arange(spec.cutoff + 1)
    m = spec.mean_n
    log_p = n * math.log(m) - (n + 1) * math.log1p(m)
    p = np.exp(log_p)
    return p / p.sum()


def joint_distribution(spec: TmssSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Support of ``P(n_s, n_i)`` as ``(n_s, n_i, prob)`` arrays.

    The state has perfect number correlation, so only ``n_s == n_i`` cells
    carry weight; those are the only ones listed.
    """
    n = np.arange(spec.cutoff + 1)
    return n, n.copy(), photon_number_dist(spec)


def cross_correlation(spec: TmssSpec) -> float:
    """Zero-delay signal-idler correlation ``<n_s n_i> / (<n_s><n_i>)``."""
    ns, ni, p = joint_distribution(spec)
    return float(np.sum(ns * ni * p) / (np.sum(ns * p) * np.sum(ni * p)))


def heralded_auto_correlation(spec: TmssSpec) -> float:
    """``g2`` of the signal conditioned on an idler detection."""
    p = photon_number_dist(spec)
    n = np.arange(spec.cutoff + 1)
    heralded = n * p
    heralded /= heralded.sum()
    mean = heralded @ n
    return float((heralded @ (n * (n - 1))) / mean**2)


def mean_n_from_cross(g2_si: float) -> float:
    """Mean photon number whose TMSS cross-correlation equals ``g2_si``."""
    if not g2_si > CLASSICAL_CROSS_LIMIT:
        raise OutOfModelError(f"g2_si={g2_si} <= 2: no two-mode squeezed state matches")
    if not math.isfinite(g2_si):
        raise OutOfModelError("g2_si must be finite")
    lo, hi = 1e-12, 1.0
    while cross_correlation(TmssSpec(lo)) < g2_si:
        lo /= 1e3
        if lo < 1e-300:
            raise OutOfModelError(f"g2_si={g2_si} is too large to invert")
    while cross_correlation(TmssSpec(hi)) > g2_si:
        hi *= 2
        if hi > 1e4:
            raise OutOfModelError(f"g2_si={g2_si} is too close to 2 to invert")
    return scipy.optimize.brentq(
        lambda m: cross_correlation(TmssSpec(m)) - g2_si, lo, hi, xtol=1e-15, rtol=1e-14)


def bound_from_cross(g2_si: float) -> float:
    """Upper bound on the heralded auto-correlation implied by a measured ``g2_si``."""
    return heralded_auto_correlation(TmssSpec(mean_n_from_cross(g2_si)))


def nonclassicality_check(g2_si: float) -> str:
    if g2_si < 0:
        raise InvalidInputError("g2_si must be >= 0")
    return "nonclassical" if g2_si > CLASSICAL_CROSS_LIMIT else "classical-compatible"
