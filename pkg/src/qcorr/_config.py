"""Shared numerical tolerances."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-10
    psd: float = 1e-10  # eigenvalues down to -psd are treated as zero
    trace: float = 1e-10
    rank: float = 1e-12  # numerical-rank threshold for purification / SLD kernel
    prob_floor: float = 1e-14


TOL = Tolerances()
