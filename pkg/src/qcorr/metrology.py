"""Quantum Fisher information: SLD, QFI, QFIM routes, classical Fisher information, Cramer-Rao."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import matcore as mc
from .errors import BlochOutOfBall, InvalidParams, InvalidPOVM, NonpositiveFisher, StepTooLarge
from .states import DensityMatrix, PureState, XStateParams, as_state

KERNEL_CUTOFF = 1e-12


@dataclass
class ParametricFamily:
    """A parameterised state rho(theta).

    ``mode="unitary"``: rho(theta) = U rho0 U^dagger with
    U = exp(-i sum_k theta_k H_k); the generators must commute.
    ``mode="evaluator"``: rho(theta) = evaluator(theta), differentiated by
    central finite differences with step ``h``.
    """

    mode: str
    theta0: np.ndarray
    rho0: DensityMatrix | None = None
    generators: Sequence[np.ndarray] = ()
    evaluator: Callable | None = None
    h: float = 1e-4
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.theta0 = np.atleast_1d(np.asarray(self.theta0, dtype=float))
        if self.mode == "unitary":
            if self.rho0 is None or len(self.generators) != self.theta0.size:
                raise InvalidParams("unitary mode needs rho0 and one generator per parameter")
            gens = [np.asarray(g, dtype=complex) for g in self.generators]
            for i in range(len(gens)):
                if not mc.is_hermitian(gens[i]):
                    raise InvalidParams(f"generator {i} is not Hermitian")
                for j in range(i):
                    if np.max(np.abs(mc.commutator(gens[i], gens[j]))) > 1e-10:
                        raise InvalidParams("unitary-mode generators must commute")
            self.generators = gens
        elif self.mode == "evaluator":
            if self.evaluator is None:
                raise InvalidParams("evaluator mode needs an evaluator callable")
        else:
            raise InvalidParams(f"unknown family mode {self.mode!r}")

    @property
    def n_params(self) -> int:
        return int(self.theta0.size)

    def state(self, theta=None) -> DensityMatrix:
        theta = self.theta0 if theta is None else np.atleast_1d(np.asarray(theta, dtype=float))
        if self.mode == "evaluator":
            return as_state(self.evaluator(theta))
        rho0 = as_state(self.rho0)
        Hsum = sum(t * g for t, g in zip(theta, self.generators))
        U = mc.expm(-1j * Hsum)
        return DensityMatrix(rho0.dims, U @ rho0.mat @ U.conj().T)


def unitary_family(rho0, generators, theta0=None) -> ParametricFamily:
    gens = [generators] if np.ndim(generators) == 2 else list(generators)
    theta0 = np.zeros(len(gens)) if theta0 is None else theta0
    return ParametricFamily("unitary", theta0, rho0=as_state(rho0), generators=gens)


def evaluator_family(evaluator, theta0, h: float = 1e-4) -> ParametricFamily:
    return ParametricFamily("evaluator", theta0, evaluator=evaluator, h=h)


def _central(family: ParametricFamily, k: int, h: float) -> np.ndarray:
    e = np.zeros(family.n_params)
    e[k] = h
    plus = family.state(family.theta0 + e).mat
    minus = family.state(family.theta0 - e).mat
    return (plus - minus) / (2 * h)


def d_rho(family: ParametricFamily, param_index: int = 0, richardson_tol: float = 1e-5) -> np.ndarray:
    """Derivative of rho(theta) at theta0 along one parameter.

    Unitary mode is exact: -i[H_k, rho]. Evaluator mode takes central
    differences at h and h/2, raises StepTooLarge if they disagree by more
    than ``richardson_tol`` and returns their Richardson combination.
    """
    if not 0 <= param_index < family.n_params:
        raise InvalidParams(f"parameter index {param_index} out of range")
    if family.mode == "unitary":
        rho = family.state().mat
        return mc.hermitize(-1j * mc.commutator(family.generators[param_index], rho))
    d1 = _central(family, param_index, family.h)
    d2 = _central(family, param_index, family.h / 2)
    gap = float(np.max(np.abs(d1 - d2)))
    if gap > richardson_tol:
        raise StepTooLarge(f"finite differences at h and h/2 differ by {gap:.3e}")
    return mc.hermitize((4 * d2 - d1) / 3)


@dataclass
class SLD:
    L: np.ndarray


def sld(rho, drho, cutoff: float = KERNEL_CUTOFF) -> SLD:
    """Symmetric logarithmic derivative in the eigenbasis of rho.

    L_ij = 2 <i|drho|j>/(l_i + l_j); pairs with l_i + l_j <= cutoff are zero.
    """
    w, v = mc.eigh(mc.as_matrix(rho))
    w = mc.clamp_spectrum(w)
    D = v.conj().T @ np.asarray(drho, dtype=complex) @ v
    s = w[:, None] + w[None, :]
    Le = np.where(s > cutoff, 2 * D / np.where(s > cutoff, s, 1.0), 0.0)
    return SLD(mc.hermitize(v @ Le @ v.conj().T))


def sld_lyapunov(rho, drho) -> np.ndarray:
    """SLD from rho L + L rho = 2 drho via a Sylvester solve (full-rank rho only)."""
    from scipy.linalg import solve_sylvester

    m = mc.as_matrix(rho)
    return mc.hermitize(solve_sylvester(m, m, 2 * np.asarray(drho, dtype=complex)))


def lyapunov_residual(rho, drho, L) -> float:
    m = mc.as_matrix(rho)
    r = 0.5 * (L @ m + m @ L) - drho
    return float(np.linalg.norm(r))


def _spectral(rho, drho_list, cutoff: float = KERNEL_CUTOFF) -> np.ndarray:
    w, v = mc.eigh(mc.as_matrix(rho))
    w = mc.clamp_spectrum(w)
    Ds = [v.conj().T @ np.asarray(d, dtype=complex) @ v for d in drho_list]
    s = w[:, None] + w[None, :]
    inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    n = len(Ds)
    F = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            F[a, b] = F[b, a] = 2 * np.real(np.sum(inv * Ds[a] * Ds[b].T))
    return F


def qfi(rho, drho, route: str = "spectral") -> float:
    """QFI from 2 sum |<i|drho|j>|^2/(l_i+l_j) (``spectral``) or Tr(L^2 rho) (``sld``)."""
    if route == "spectral":
        return float(max(_spectral(rho, [drho])[0, 0], 0.0))
    if route == "sld":
        L = sld(rho, drho).L
        return float(max(np.real(np.trace(L @ L @ mc.as_matrix(rho))), 0.0))
    raise InvalidParams(f"unknown QFI route {route!r}")


def qfi_pure_unitary(psi, H) -> float:
    """4 Var(H) on a pure state."""
    v = np.asarray(psi.amplitudes if isinstance(psi, PureState) else psi, dtype=complex).ravel()
    H = np.asarray(H, dtype=complex)
    hv = H @ v
    mean = np.real(np.vdot(v, hv))
    return float(4 * (np.real(np.vdot(hv, hv)) - mean * mean))


def qfim(family: ParametricFamily) -> np.ndarray:
    """F_mn = (1/2) Tr(rho {L_m, L_n}) via the SLDs."""
    rho = family.state().mat
    Ls = [sld(rho, d_rho(family, k)).L for k in range(family.n_params)]
    n = len(Ls)
    F = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            F[a, b] = F[b, a] = 0.5 * np.real(np.trace(rho @ mc.anticommutator(Ls[a], Ls[b])))
    return F


def qfim_vectorized(rho, drho_list, cutoff: float = KERNEL_CUTOFF) -> np.ndarray:
    """F_mn = 2 vec(d_m rho)^dagger (rho (x) 1 + 1 (x) rho*)^+ vec(d_n rho).

    vec stacks rows (numpy C order), for which rho X + X rho maps to
    (rho (x) 1 + 1 (x) rho*) vec(X). The pseudo-inverse drops eigenvalues
    at or below ``cutoff``.
    """
    m = mc.as_matrix(rho)
    d = m.shape[0]
    S = np.kron(m, np.eye(d)) + np.kron(np.eye(d), m.conj())
    w, v = np.linalg.eigh(mc.hermitize(S))
    winv = np.where(w > cutoff, 1.0 / np.where(w > cutoff, w, 1.0), 0.0)
    Sp = (v * winv) @ v.conj().T
    vecs = [np.asarray(dr, dtype=complex).ravel() for dr in drho_list]
    n = len(vecs)
    F = np.empty((n, n))
    for a in range(n):
        for b in range(a, n):
            F[a, b] = F[b, a] = 2 * np.real(vecs[a].conj() @ Sp @ vecs[b])
    return F


def qfim_bloch_qubit(r, dr_list, pure_tol: float = 1e-12) -> np.ndarray:
    """Qubit QFIM from the Bloch vector and its derivatives.

    F_mn = dr_m . dr_n + (r . dr_m)(r . dr_n)/(1 - |r|^2), with the second
    term dropped for pure states.
    """
    r = np.asarray(r, dtype=float)
    drs = [np.asarray(x, dtype=float) for x in dr_list]
    rr = float(r @ r)
    if rr > 1 + 1e-10:
        raise BlochOutOfBall(f"|r|^2 = {rr:.12g} > 1")
    n = len(drs)
    F = np.empty((n, n))
    pure = rr >= 1 - pure_tol
    for a in range(n):
        for b in range(a, n):
            v = drs[a] @ drs[b]
            if not pure:
                v += (r @ drs[a]) * (r @ drs[b]) / (1 - rr)
            F[a, b] = F[b, a] = v
    return F


def _block_bloch(B: np.ndarray):
    t = float(np.real(np.trace(B)))
    r = np.array([np.real(np.trace(B @ s)) for s in mc.PAULIS]) / t if t > 0 else np.zeros(3)
    return t, r


_X_BLOCKS = ((0, 3), (1, 2))


def qfim_xstate_block(rho, drho_list, cutoff: float = KERNEL_CUTOFF) -> np.ndarray:
    """X-state QFIM as the sum of the QFIMs of its two unnormalised 2x2 blocks.

    A block B = t (1 + r.sigma)/2 contributes dt_m dt_n / t + t F_Bloch(r).
    """
    m = mc.as_matrix(rho)
    if m.shape != (4, 4):
        raise InvalidParams("qfim_xstate_block needs a two-qubit X state")
    n = len(drho_list)
    F = np.zeros((n, n))
    for idx in _X_BLOCKS:
        sel = np.ix_(idx, idx)
        t, r = _block_bloch(m[sel])
        if t <= cutoff:
            continue
        dts, drs = [], []
        for dr in drho_list:
            dB = np.asarray(dr, dtype=complex)[sel]
            dt = float(np.real(np.trace(dB)))
            dsig = np.array([np.real(np.trace(dB @ s)) for s in mc.PAULIS])
            dts.append(dt)
            drs.append((dsig - dt * r) / t)
        F += np.outer(dts, dts) / t + t * qfim_bloch_qubit(r, drs)
    return F


def x_family(evaluator: Callable[[np.ndarray], XStateParams], theta0, h: float = 1e-4) -> ParametricFamily:
    """Evaluator family whose values are X states given by their parameters."""
    return evaluator_family(lambda th: evaluator(th).density(), theta0, h)


def check_povm(povm, tol: float = 1e-10) -> list:
    effects = [np.asarray(E, dtype=complex) for E in povm]
    if not effects:
        raise InvalidPOVM("empty POVM")
    d = effects[0].shape[0]
    for i, E in enumerate(effects):
        if E.shape != (d, d) or not mc.is_hermitian(E):
            raise InvalidPOVM(f"effect {i} is not a Hermitian {d}x{d} matrix")
        if np.linalg.eigvalsh(mc.hermitize(E)).min() < -tol:
            raise InvalidPOVM(f"effect {i} is not positive semidefinite")
    if np.max(np.abs(sum(effects) - np.eye(d))) > tol:
        raise InvalidPOVM("effects do not sum to the identity")
    return effects


def cfi(family: ParametricFamily, povm, prob_floor: float = 1e-14) -> np.ndarray:
    """Classical Fisher information of a POVM, one value per parameter."""
    effects = check_povm(povm)
    rho = family.state().mat
    out = np.empty(family.n_params)
    p = np.array([np.real(np.trace(rho @ E)) for E in effects])
    keep = p > prob_floor
    for k in range(family.n_params):
        dr = d_rho(family, k)
        dp = np.array([np.real(np.trace(dr @ E)) for E in effects])
        out[k] = float(np.sum(dp[keep] ** 2 / p[keep]))
    return out


def sld_projectors(rho, drho) -> list:
    """Projectors onto the eigenbasis of the SLD (the optimal single-parameter measurement)."""
    L = sld(rho, drho).L
    _, v = np.linalg.eigh(L)
    return [np.outer(v[:, i], v[:, i].conj()) for i in range(v.shape[1])]


def cramer_rao(F: float, n_trials: int = 1) -> float:
    """Variance lower bound 1/(n F)."""
    if not F > 0:
        raise NonpositiveFisher(f"Fisher information must be positive, got {F}")
    if n_trials < 1:
        raise InvalidParams("n_trials must be at least 1")
    return 1.0 / (n_trials * F)


__all__ = [
    "ParametricFamily",
    "unitary_family",
    "evaluator_family",
    "x_family",
    "d_rho",
    "SLD",
    "sld",
    "sld_lyapunov",
    "lyapunov_residual",
    "qfi",
    "qfi_pure_unitary",
    "qfim",
    "qfim_vectorized",
    "qfim_bloch_qubit",
    "qfim_xstate_block",
    "check_povm",
    "cfi",
    "sld_projectors",
    "cramer_rao",
]
