"""Classical and quantum entropies, all in bits."""

from __future__ import annotations

import numpy as np

from . import matcore as mc
from .errors import DimMismatch, DomainError
from .states import as_state

INF = float("inf")


def _xlogx(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    nz = p > 0
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def shannon(p) -> float:
    """Shannon entropy of a probability vector (0 log 0 = 0)."""
    p = np.asarray(p, dtype=float)
    if p.size and p.min() < -1e-12:
        raise DomainError(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1.0) > 1e-10:
        raise DomainError(f"probabilities sum to {p.sum():.12g}")
    return float(-np.sum(_xlogx(np.clip(p, 0.0, None))))


def binary_h(x) -> float:
    """Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x)."""
    x = float(x)
    if x < -1e-12 or x > 1 + 1e-12:
        raise DomainError(f"h(x) needs x in [0,1], got {x}")
    x = min(max(x, 0.0), 1.0)
    return float(-np.sum(_xlogx(np.array([x, 1.0 - x]))))


def spectrum(rho) -> np.ndarray:
    """Clamped eigenvalues of a density operator."""
    return mc.clamp_spectrum(mc.eigvalsh(mc.as_matrix(rho)))


def entropy_of_spectrum(w) -> float:
    return float(-np.sum(_xlogx(np.asarray(w))))


def von_neumann(rho) -> float:
    return entropy_of_spectrum(spectrum(rho))


def linear_entropy(rho) -> float:
    """S2 = 2 (1 - Tr rho^2)."""
    m = mc.as_matrix(rho)
    return float(2.0 * (1.0 - np.real(np.vdot(m, m))))


def normalized_mixedness(rho) -> float:
    """M_l = d/(d-1) (1 - Tr rho^2), in [0, 1]."""
    m = mc.as_matrix(rho)
    d = m.shape[0]
    return float(d / (d - 1) * (1.0 - np.real(np.vdot(m, m))))


def renyi(rho, alpha: float) -> float:
    if alpha <= 0 or alpha == 1:
        raise DomainError("Renyi order must be positive and different from 1")
    w = spectrum(rho)
    w = w[w > 0]
    return float(np.log2(np.sum(w**alpha)) / (1.0 - alpha))


def relative_entropy(rho, sigma, tol: float = 1e-12) -> float:
    """S(rho || sigma) in bits; returns +inf when supp(rho) is not inside supp(sigma)."""
    a = mc.as_matrix(rho)
    b = mc.as_matrix(sigma)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    wa, va = mc.eigh(a)
    wb, vb = mc.eigh(b)
    wa = mc.clamp_spectrum(wa)
    wb = mc.clamp_spectrum(wb)
    # overlap[i, j] = |<a_i|b_j>|^2
    overlap = np.abs(va.conj().T @ vb) ** 2
    ker = wb <= tol
    if np.any(wa[:, None] * overlap[:, ker] > tol):
        return INF
    logb = np.zeros_like(wb)
    logb[~ker] = np.log2(wb[~ker])
    cross = float(np.sum(wa[:, None] * overlap * logb[None, :]))
    return float(np.sum(_xlogx(wa)) - cross)


def mutual_information(rho, dims=None) -> float:
    """I(A:B) = S(A) + S(B) - S(AB) for a bipartite state."""
    rho = as_state(rho, dims)
    if len(rho.dims) != 2:
        raise DimMismatch(f"mutual information needs two factors, got dims {rho.dims}")
    sa = von_neumann(mc.partial_trace(rho, 0).mat)
    sb = von_neumann(mc.partial_trace(rho, 1).mat)
    return sa + sb - von_neumann(rho.mat)


def conditional_entropy(rho, conditioned_on: int = 1, dims=None) -> float:
    """S(X|Y) = S(XY) - S(Y) with Y the factor ``conditioned_on``."""
    rho = as_state(rho, dims)
    if len(rho.dims) != 2:
        raise DimMismatch(f"conditional entropy needs two factors, got dims {rho.dims}")
    return von_neumann(rho.mat) - von_neumann(mc.partial_trace(rho, conditioned_on).mat)
