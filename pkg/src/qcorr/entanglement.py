"""Entanglement detection and quantification for small systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matcore as mc
from .entropy import binary_h
from .errors import DimMismatch
from .states import PureState, XStateParams, as_state, require_dims, schmidt

_SYSY = mc.kron(mc.PAULI_Y, mc.PAULI_Y)


@dataclass
class EntanglementReport:
    measure: str
    value: float
    witnesses: list = field(default_factory=list)


def concurrence_2q(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = as_state(rho)
    require_dims(rho, (2, 2), "concurrence_2q")
    s = mc.sqrtm_psd(rho.mat)
    # singular values of sqrt(rho) sqrt(rho~) are the square roots of the
    # eigenvalues of rho rho~; this avoids a sqrt of near-zero eigenvalues
    lam = np.linalg.svd(s @ (_SYSY @ s.conj() @ _SYSY), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_x(x: XStateParams) -> float:
    """Closed-form concurrence of a two-qubit X state."""
    if not isinstance(x, XStateParams):
        x = XStateParams.from_matrix(x)
    x.check()
    c1 = abs(x.a14) - np.sqrt(max(x.d2 * x.d3, 0.0))
    c2 = abs(x.a23) - np.sqrt(max(x.d1 * x.d4, 0.0))
    return float(2.0 * max(0.0, c1, c2))


def _purity(m: np.ndarray) -> float:
    return float(np.real(np.vdot(m, m)))


def concurrence_pure(psi: PureState, cut=1) -> float:
    """sqrt(2 (1 - Tr rho_A^2)) across ``cut`` (see :func:`qcorr.states.schmidt`)."""
    w, _, _ = schmidt(psi, cut)
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - np.sum(w**2)))))


def eof_2q(rho) -> float:
    """Entanglement of formation of a two-qubit state in ebits."""
    c = concurrence_2q(rho)
    return binary_h(0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - c * c))))


def entanglement_entropy(psi: PureState, cut=1) -> float:
    w, _, _ = schmidt(psi, cut)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def _pt_spectrum(rho, subsystem) -> np.ndarray:
    rho = as_state(rho)
    return np.linalg.eigvalsh(mc.hermitize(mc.partial_transpose(rho, subsystem)))


def negativity(rho, dims: Sequence[int] | None = None, subsystem=0) -> float:
    """(||rho^T||_1 - 1)/2 for the partial transpose on ``subsystem``."""
    rho = as_state(rho, dims)
    if len(rho.dims) < 2:
        raise DimMismatch("negativity needs at least two factors")
    w = _pt_spectrum(rho, subsystem)
    return float(max(0.0, (np.sum(np.abs(w)) - 1.0) / 2.0))


def log_negativity(rho, dims: Sequence[int] | None = None, subsystem=0) -> float:
    return float(np.log2(2.0 * negativity(rho, dims, subsystem) + 1.0))


def tripartite_negativity(rho) -> float:
    """Geometric mean of the three one-versus-rest negativities."""
    rho = as_state(rho)
    require_dims(rho, (2, 2, 2), "tripartite_negativity")
    ns = [negativity(rho, subsystem=k) for k in range(3)]
    return float(np.cbrt(ns[0] * ns[1] * ns[2]))


@dataclass
class TangleResult:
    value: float
    labelings: dict  # pivot index -> C^2_{i|jk} - C^2_{i|j} - C^2_{i|k}


def tangle_3q(psi: PureState) -> TangleResult:
    """Three-qubit tangle: maximum over the three pivot choices, each reported."""
    if tuple(psi.dims) != (2, 2, 2):
        raise DimMismatch(f"tangle_3q needs dims (2,2,2), got {psi.dims}")
    rho = psi.density()
    out = {}
    for i in range(3):
        j, k = [q for q in range(3) if q != i]
        c_one_rest = concurrence_pure(psi, [i]) ** 2
        c_ij = concurrence_2q(mc.partial_trace(rho, [i, j])) ** 2
        c_ik = concurrence_2q(mc.partial_trace(rho, [i, k])) ** 2
        out[i] = c_one_rest - c_ij - c_ik
    return TangleResult(float(max(out.values())), out)


def is_ppt(rho, dims: Sequence[int] | None = None, subsystem=0, tol: float = 1e-12):
    """Return (is PPT, minimum eigenvalue of the partial transpose)."""
    rho = as_state(rho, dims)
    if len(rho.dims) < 2:
        raise DimMismatch("PPT test needs at least two factors")
    wmin = float(_pt_spectrum(rho, subsystem).min())
    return wmin >= -tol, wmin


def one_vs_rest_concurrence(rho, pivot: int) -> float:
    """sqrt(2(1 - Tr rho_pivot^2)); meaningful for pure global states."""
    rho = as_state(rho)
    red = mc.partial_trace(rho, pivot)
    return float(np.sqrt(max(0.0, 2.0 * (1.0 - _purity(red.mat)))))


__all__ = [
    "EntanglementReport",
    "TangleResult",
    "concurrence_2q",
    "concurrence_x",
    "concurrence_pure",
    "eof_2q",
    "entanglement_entropy",
    "negativity",
    "log_negativity",
    "tripartite_negativity",
    "tangle_3q",
    "is_ppt",
    "one_vs_rest_concurrence",
]
