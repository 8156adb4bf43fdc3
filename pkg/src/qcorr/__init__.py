"""Quantum correlation measures for small finite-dimensional systems.

Submodules: matcore, states, entropy, entanglement, discord, uncertainty,
coherence, metrology, dynamics, verify, cli.
"""

from . import coherence, discord, dynamics, entanglement, entropy, matcore, metrology, states, uncertainty
from .errors import QCorrError
from .states import DensityMatrix, PureState, XStateParams, BellDiagonalParams, preset

__version__ = "0.1.0"

__all__ = [
    "coherence",
    "discord",
    "dynamics",
    "entanglement",
    "entropy",
    "matcore",
    "metrology",
    "states",
    "uncertainty",
    "QCorrError",
    "DensityMatrix",
    "PureState",
    "XStateParams",
    "BellDiagonalParams",
    "preset",
    "__version__",
]
