"""Coherence quantifiers relative to an explicit reference basis.

The reference basis is a unitary whose columns are the basis vectors; None
means the computational basis.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import matcore as mc
from .discord import conditional_entropy_fixed, discord_numeric
from .entropy import mutual_information, normalized_mixedness, von_neumann
from .errors import DegenerateObservable, DimMismatch, InvalidParams
from .states import DensityMatrix, PureState, as_state, su_generators


def _in_basis(rho, basis=None) -> np.ndarray:
    m = mc.as_matrix(rho)
    if basis is None:
        return m
    U = np.asarray(basis, dtype=complex)
    if U.shape != m.shape:
        raise DimMismatch(f"basis shape {U.shape} does not match state shape {m.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > 1e-10:
        raise InvalidParams("reference basis is not unitary within 1e-10")
    return U.conj().T @ m @ U


def dephase(rho, basis=None) -> np.ndarray:
    """Full dephasing in the reference basis (returned in that basis)."""
    m = _in_basis(rho, basis)
    return np.diag(np.diag(m))


def c_rel_entropy(rho, basis=None) -> float:
    """C_r = S(rho_diag) - S(rho)."""
    m = _in_basis(rho, basis)
    p = np.clip(np.real(np.diag(m)), 0.0, None)
    p = p[p > 0]
    s_diag = float(-np.sum(p * np.log2(p)))
    return max(s_diag - von_neumann(m), 0.0)


def c_l1(rho, basis=None) -> float:
    """Sum of the moduli of the off-diagonal elements."""
    m = _in_basis(rho, basis)
    a = np.abs(m)
    return float(a.sum() - np.trace(a))


def schmidt_reference_basis(psi: PureState) -> np.ndarray:
    """Product unitary U_A (x) U_B whose columns are the Schmidt basis of a bipartite pure state.

    In this basis C_l1(|psi><psi|) equals twice the negativity.
    """
    if len(psi.dims) != 2:
        raise DimMismatch(f"schmidt_reference_basis needs a bipartite state, got dims {psi.dims}")
    dA, dB = psi.dims
    u, _, vh = np.linalg.svd(np.asarray(psi.amplitudes).reshape(dA, dB), full_matrices=True)
    # psi_ab = sum_k u_ak s_k vh_kb, so the right Schmidt vectors are the rows of vh
    return mc.kron(u, vh.T)


def complementarity_check(rho, tol: float = 1e-9):
    """(C_l1^2/(d-1)^2 + M_l, holds) with M_l the normalised linear mixedness."""
    m = mc.as_matrix(rho)
    d = m.shape[0]
    lhs = c_l1(m) ** 2 / (d - 1) ** 2 + normalized_mixedness(m)
    return float(lhs), bool(lhs <= 1.0 + tol)


def c_geometric_qubit(rho) -> float:
    """1 - (sqrt2/2) sqrt(1 + sqrt(1 - r_x^2 - r_y^2))."""
    m = mc.as_matrix(rho)
    if m.shape != (2, 2):
        raise DimMismatch("c_geometric_qubit needs a single qubit")
    rx = 2 * np.real(m[0, 1])
    ry = -2 * np.imag(m[0, 1])
    inner = max(1.0 - rx * rx - ry * ry, 0.0)
    return float(1.0 - np.sqrt(2) / 2 * np.sqrt(1.0 + np.sqrt(inner)))


def _root_fidelity_diag(m: np.ndarray, P: np.ndarray) -> np.ndarray:
    """||sqrt(rho) sqrt(delta)||_1 for a batch of diagonal delta = diag(P[k])."""
    sp = np.sqrt(np.clip(P, 0.0, None))
    M = m[None, :, :] * sp[:, :, None] * sp[:, None, :]
    w = np.clip(np.linalg.eigvalsh(M), 0.0, None)
    return np.sqrt(w).sum(axis=1)


def _simplex_grid(d: int, n: int) -> np.ndarray:
    pts = [c for c in itertools.product(range(n + 1), repeat=d - 1) if sum(c) <= n]
    pts = np.array([list(c) + [n - sum(c)] for c in pts], dtype=float)
    return pts / n


def c_geometric_numeric(rho, basis=None, grid: int = 200, seed=0) -> float:
    """1 - max over incoherent delta of ||sqrt(rho) sqrt(delta)||_1.

    The probability simplex is scanned on a regular grid for d <= 3 (random
    Dirichlet samples otherwise) and the best point is polished with
    Nelder-Mead on softmax coordinates.
    """
    from scipy.optimize import minimize

    m = _in_basis(rho, basis)
    d = m.shape[0]
    if d <= 3:
        P = _simplex_grid(d, grid)
    else:
        P = np.random.default_rng(seed).dirichlet(np.ones(d), size=grid * grid)
    vals = _root_fidelity_diag(m, P)
    p0 = np.clip(P[int(np.argmax(vals))], 1e-12, None)
    z0 = np.log(p0)

    def neg(z):
        e = np.exp(z - z.max())
        return -_root_fidelity_diag(m, (e / e.sum())[None])[0]

    res = minimize(neg, z0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000})
    best = max(float(vals.max()), -float(res.fun))
    return float(1.0 - min(best, 1.0))


def c_trace_uniform(d: int, alpha) -> float:
    """Trace-norm coherence 2(d-1)|alpha| of the state with diagonal 1/d and all off-diagonals alpha.

    For d >= 3 equal off-diagonals force alpha real; a complex alpha at d = 2
    is a diagonal-unitary rotation of |alpha| and is accepted.
    """
    if d >= 3 and abs(np.imag(alpha)) > 1e-12:
        raise InvalidParams(f"all off-diagonals equal to {alpha} is not Hermitian for d={d}; alpha must be real")
    uniform_coherence_state(d, alpha)  # validates positivity
    return float(2 * (d - 1) * abs(alpha))


def uniform_coherence_state(d: int, alpha) -> np.ndarray:
    """Diagonal 1/d, upper off-diagonals alpha, lower conj(alpha); InvalidParams if not PSD."""
    if d < 2:
        raise InvalidParams("dimension must be at least 2")
    m = np.full((d, d), alpha, dtype=complex)
    m[np.tril_indices(d, -1)] = np.conj(alpha)
    np.fill_diagonal(m, 1.0 / d)
    if np.linalg.eigvalsh(m).min() < -1e-10:
        raise InvalidParams(f"off-diagonal {alpha} gives a non-positive state for d={d}")
    return m


def c_trace_numeric(rho, basis=None) -> float:
    """min over incoherent delta of ||rho - delta||_1, by Nelder-Mead on the simplex."""
    from scipy.optimize import minimize

    m = _in_basis(rho, basis)
    p0 = np.clip(np.real(np.diag(m)), 1e-12, None)

    def obj(z):
        e = np.exp(z - z.max())
        return mc.trace_norm(m - np.diag(e / e.sum()))

    res = minimize(obj, np.log(p0), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000})
    return float(min(res.fun, mc.trace_norm(m - np.diag(np.diag(m)))))


def coherence_concurrence_pure(psi: PureState, basis=None) -> float:
    """sum_{j<k} |<psi| U_jk |psi*>| with U_jk the symmetric generators."""
    v = np.asarray(psi.amplitudes, dtype=complex).ravel()
    if basis is not None:
        v = np.asarray(basis, dtype=complex).conj().T @ v
    d = v.size
    gens = su_generators(d)[: d * (d - 1) // 2]  # U_jk come first
    return float(sum(abs(v.conj() @ g @ v.conj()) for g in gens))


def correlated_coherence(rho_ab, basis=None) -> float:
    """C_r(rho_AB) - C_r(rho_A) - C_r(rho_B) in a product reference basis.

    ``basis`` is None or a pair (U_A, U_B).
    """
    rho = as_state(rho_ab)
    if len(rho.dims) != 2:
        raise DimMismatch(f"correlated_coherence needs a bipartite state, got dims {rho.dims}")
    ua, ub = (None, None) if basis is None else basis
    if ua is None:
        ua = np.eye(rho.dims[0])
    if ub is None:
        ub = np.eye(rho.dims[1])
    U = mc.kron(ua, ub)
    ra = mc.partial_trace(rho, 0).mat
    rb = mc.partial_trace(rho, 1).mat
    return float(c_rel_entropy(rho.mat, U) - c_rel_entropy(ra, ua) - c_rel_entropy(rb, ub))


def discord_consumption(rho_ab):
    """(lhs, rhs) of the correlated-coherence consumption identity, measuring B.

    lhs = C_cc(rho) - C_cc(Pi_B(rho)) with Pi_B computational dephasing of B;
    rhs = I(rho) - J_z, the discord for the fixed computational-basis
    measurement on B.
    """
    rho = as_state(rho_ab)
    if tuple(rho.dims) != (2, 2):
        raise DimMismatch(f"discord_consumption needs two qubits, got dims {rho.dims}")
    P = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    deph = sum(mc.kron(np.eye(2), p) @ rho.mat @ mc.kron(np.eye(2), p) for p in P)
    lhs = correlated_coherence(rho) - correlated_coherence(DensityMatrix((2, 2), deph))
    s_a = von_neumann(mc.partial_trace(rho, 0).mat)
    j_z = s_a - conditional_entropy_fixed(rho, "B", (0.0, 0.0, 1.0))
    rhs = mutual_information(rho) - j_z
    return float(lhs), float(rhs)


def _eigenbasis(op, what: str) -> np.ndarray:
    w, v = mc.eigh(op)
    if w.size > 1 and np.min(np.diff(w)) < 1e-9:
        raise DegenerateObservable(f"observable {what} has a degenerate spectrum")
    return v


def entropic_uncertainty_gap(rho_ab, P, Q, grid_n: int = 64, refine_iters: int = 20):
    """(U, L, gap) for the memory-assisted entropic uncertainty relation.

    U = S(P|B) + S(Q|B) and L = log2(1/c) + S(A|B) + max{0, Q_A - J_A} with
    c = max |<p_i|q_j>|^2. Q_A and J_A are the discord and classical
    correlation measuring A.
    """
    rho = as_state(rho_ab)
    if len(rho.dims) != 2:
        raise DimMismatch(f"entropic_uncertainty_gap needs a bipartite state, got dims {rho.dims}")
    dA, dB = rho.dims
    vp = _eigenbasis(P, "P")
    vq = _eigenbasis(Q, "Q")
    if vp.shape[0] != dA:
        raise DimMismatch("observables must act on A")
    s_b = von_neumann(mc.partial_trace(rho, 1).mat)

    def s_cond(v):
        out = np.zeros_like(rho.mat)
        for i in range(dA):
            proj = mc.kron(np.outer(v[:, i], v[:, i].conj()), np.eye(dB))
            out += proj @ rho.mat @ proj
        return von_neumann(out) - s_b

    U = s_cond(vp) + s_cond(vq)
    c = float(np.max(np.abs(vp.conj().T @ vq) ** 2))
    s_ab = von_neumann(rho.mat) - s_b
    dr = discord_numeric(rho, "A", grid_n, refine_iters)
    L = -np.log2(c) + s_ab + max(0.0, dr.quantum - dr.classical)
    return float(U), float(L), float(U - L)


__all__ = [
    "dephase",
    "c_rel_entropy",
    "c_l1",
    "schmidt_reference_basis",
    "complementarity_check",
    "c_geometric_qubit",
    "c_geometric_numeric",
    "c_trace_uniform",
    "uniform_coherence_state",
    "c_trace_numeric",
    "coherence_concurrence_pure",
    "correlated_coherence",
    "discord_consumption",
    "entropic_uncertainty_gap",
]
