"""Polarization-qubit storage in birefringent, anisotropically absorbing quantum memories."""

__version__ = "0.1.0"

from .afc import AfcSpec, MemoryResult, store_and_retrieve  # noqa: E402
from .medium import Arrangement, CrystalSpec  # noqa: E402
from .photon_stats import TmssSpec  # noqa: E402
from .tomography import CountRecord  # noqa: E402

__all__ = [
    "AfcSpec",
    "Arrangement",
    "CountRecord",
    "CrystalSpec",
    "MemoryResult",
    "TmssSpec",
    "store_and_retrieve",
]
