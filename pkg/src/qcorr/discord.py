"""Discord-type correlation quantifiers for bipartite states.

Conventions: ``measured="B"`` means the projective measurement acts on the
second tensor factor, ``"A"`` on the first. Entropies are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matcore as mc
from .entanglement import concurrence_2q, eof_2q, negativity
from .entropy import binary_h, entropy_of_spectrum, linear_entropy, mutual_information, spectrum, von_neumann
from .errors import DimMismatch, InvalidParams, RankTooHigh, SingularPurification, SingularR, UnsupportedCut
from .states import (
    BellDiagonalParams,
    DensityMatrix,
    PureState,
    XStateParams,
    as_state,
    bloch_decompose,
    fano_bloch,
    require_dims,
)


@dataclass
class DiscordResult:
    quantum: float
    classical: float
    total: float
    measured_side: str
    method: str
    extras: dict = field(default_factory=dict)


@dataclass
class ChannelMatrixL:
    """Rows index the input Pauli sigma_i, columns the output generator gamma_j."""

    L: np.ndarray

    def lambda_max(self) -> float:
        return float(np.linalg.eigvalsh(self.L @ self.L.T).max())


def _side(measured: str) -> str:
    s = str(measured).upper()
    if s not in ("A", "B"):
        raise InvalidParams(f"measured side must be 'A' or 'B', got {measured!r}")
    return s


def _measured_last(rho: DensityMatrix, measured: str) -> DensityMatrix:
    """Reorder so that the measured party is the second factor."""
    if len(rho.dims) != 2:
        raise DimMismatch(f"bipartite state expected, got dims {rho.dims}")
    return rho if _side(measured) == "B" else mc.permute_subsystems(rho, [1, 0])


def _g(x: float) -> float:
    """g(x) = h((1 + sqrt(1 - x))/2)."""
    return binary_h(0.5 * (1.0 + np.sqrt(min(max(1.0 - x, 0.0), 1.0))))


# ----------------------------------------------------------------------------
# X states, closed form


def _as_x(x) -> XStateParams:
    if isinstance(x, XStateParams):
        return x
    return XStateParams.from_matrix(x)


def _xlog2(v) -> float:
    v = np.asarray(v, dtype=float)
    v = v[v > 0]
    return float(np.sum(v * np.log2(v)))


def discord_x(x, check: bool = True) -> DiscordResult:
    """Entropic discord of an X state, measuring B, via the two-branch closed form."""
    x = _as_x(x)
    if check:
        x.check()
    r11, r22, r33, r44 = x.d1, x.d2, x.d3, x.d4
    a14, a23 = abs(x.a14), abs(x.a23)
    s14 = np.sqrt((r11 - r44) ** 2 + 4 * a14**2)
    s23 = np.sqrt((r22 - r33) ** 2 + 4 * a23**2)
    eta = np.array([r11 + r44 + s14, r11 + r44 - s14, r22 + r33 + s23, r22 + r33 - s23]) / 2
    eta = np.clip(eta, 0.0, None)
    hb = binary_h(r11 + r33)  # S(rho_B)
    ha = binary_h(r11 + r22)  # S(rho_A)
    rad = np.sqrt((1 - 2 * (r33 + r44)) ** 2 + 4 * (a14 + a23) ** 2)
    zeta1 = binary_h(min(1.0, (1 + rad) / 2))
    zeta2 = -_xlog2([r11, r22, r33, r44]) - hb
    q1 = hb + _xlog2(eta) + zeta1
    q2 = hb + _xlog2(eta) + zeta2
    j1, j2 = ha - zeta1, ha - zeta2
    total = ha + hb + _xlog2(eta)
    return DiscordResult(
        quantum=float(max(min(q1, q2), 0.0)),
        classical=float(max(j1, j2)),
        total=float(total),
        measured_side="B",
        method="x_closed",
        extras={"Q1": q1, "Q2": q2, "branch": 1 if q1 <= q2 else 2},
    )


def discord_bell_diagonal(c) -> float:
    """Closed-form entropic discord of a Bell-diagonal state."""
    p = c if isinstance(c, BellDiagonalParams) else BellDiagonalParams(*map(float, c))
    lam = p.eigenvalues()
    cm = max(abs(p.c1), abs(p.c2), abs(p.c3))
    tail = 0.0
    for v in (1 - cm, 1 + cm):
        if v > 0:
            tail += v / 2 * np.log2(v)
    return float(2.0 + _xlog2(lam) - tail)


# ----------------------------------------------------------------------------
# numeric optimisation over projective measurements on a qubit


def _conditional_operators(rho: DensityMatrix):
    """rho_A and C_k = Tr_B[(1 (x) sigma_k) rho] for a state whose second factor is a qubit."""
    dA, dB = rho.dims
    t = rho.mat.reshape(dA, dB, dA, dB)
    rho_a = np.einsum("ibjb->ij", t)
    cs = np.stack([np.einsum("ibjc,cb->ij", t, s) for s in mc.PAULIS])
    return rho_a, cs


def _cond_entropy_batch(rho_a, cs, theta, phi) -> np.ndarray:
    """Post-measurement conditional entropy S(A|{Pi_B}) for arrays of angles."""
    theta = np.atleast_1d(theta)
    phi = np.atleast_1d(phi)
    n = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
    nc = np.einsum("pk,kij->pij", n, cs)
    total = np.zeros(n.shape[0])
    for sign in (1.0, -1.0):
        m = 0.5 * (rho_a[None] + sign * nc)
        w = np.linalg.eigvalsh(m)
        w = np.clip(w, 0.0, None)
        p = w.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            wl = np.where(w > 0, w * np.log2(np.where(w > 0, w, 1.0)), 0.0)
            pl = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        total += -wl.sum(axis=1) + pl
    return total


def discord_numeric(rho, measured: str = "B", grid_n: int = 64, refine_iters: int = 20) -> DiscordResult:
    """Entropic discord by direct minimisation over projective qubit measurements.

    The measurement direction (theta, phi) is scanned on a grid_n x grid_n grid
    over [0, pi] x [0, 2 pi), the lowest grid index wins ties, and the best
    point is then polished by ``refine_iters`` rounds of coordinate moves whose
    step halves each round. The result is an upper bound on the discord.
    """
    rho = as_state(rho)
    side = _side(measured)
    r = _measured_last(rho, side)
    if r.dims[1] != 2:
        raise DimMismatch(f"measured party must be a qubit, got dimension {r.dims[1]}")
    rho_a, cs = _conditional_operators(r)
    grid_n = int(grid_n)
    th = np.linspace(0.0, np.pi, grid_n)
    ph = np.linspace(0.0, 2 * np.pi, grid_n, endpoint=False)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    vals = _cond_entropy_batch(rho_a, cs, tt.ravel(), pp.ravel())
    k = int(np.argmin(vals))
    best_t, best_p, best = tt.ravel()[k], pp.ravel()[k], float(vals[k])
    step_t = np.pi / max(grid_n - 1, 1)
    step_p = 2 * np.pi / grid_n
    for _ in range(int(refine_iters)):
        cand_t = np.array([best_t - step_t, best_t + step_t])
        v = _cond_entropy_batch(rho_a, cs, cand_t, np.full(2, best_p))
        i = int(np.argmin(v))
        if v[i] < best:
            best, best_t = float(v[i]), float(cand_t[i])
        cand_p = np.array([best_p - step_p, best_p + step_p])
        v = _cond_entropy_batch(rho_a, cs, np.full(2, best_t), cand_p)
        i = int(np.argmin(v))
        if v[i] < best:
            best, best_p = float(v[i]), float(cand_p[i])
        step_t *= 0.5
        step_p *= 0.5
    s_a = von_neumann(rho_a)
    s_b = von_neumann(mc.partial_trace(r, 1).mat)
    s_ab = von_neumann(r.mat)
    total = s_a + s_b - s_ab
    classical = s_a - best
    return DiscordResult(
        quantum=float(total - classical),
        classical=float(classical),
        total=float(total),
        measured_side=side,
        method="numeric",
        extras={"theta": best_t, "phi": best_p, "conditional_entropy": best},
    )


def conditional_entropy_fixed(rho, measured: str = "B", direction=(0.0, 0.0, 1.0)) -> float:
    """S(A|{Pi_B}) for one fixed projective measurement along a Bloch direction."""
    r = _measured_last(as_state(rho), measured)
    if r.dims[1] != 2:
        raise DimMismatch("measured party must be a qubit")
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    theta = np.arccos(np.clip(n[2], -1, 1))
    phi = np.arctan2(n[1], n[0])
    rho_a, cs = _conditional_operators(r)
    return float(_cond_entropy_batch(rho_a, cs, theta, phi)[0])


# ----------------------------------------------------------------------------
# rank-2 closed form


def discord_rank2(rho, measured: str = "B") -> float:
    """Q = S(rho_m) - S(rho) + g(S2(rho_u) - J2_m) for two-qubit states of rank <= 2.

    ``m`` is the measured party and ``u`` the unmeasured one.
    """
    rho = as_state(rho)
    require_dims(rho, (2, 2), "discord_rank2")
    r = _measured_last(rho, measured)
    w = np.sort(spectrum(r.mat))[::-1]
    if w[2] >= 1e-9:
        raise RankTooHigh(f"third eigenvalue {w[2]:.3e} >= 1e-9")
    s_b = von_neumann(mc.partial_trace(r, 1).mat)
    s2_a = linear_entropy(mc.partial_trace(r, 0).mat)
    j2, _ = classical_corr_linear_qubitqubit(r)
    return float(s_b - entropy_of_spectrum(w) + _g(s2_a - j2))


# ----------------------------------------------------------------------------
# geometric discords


def geometric_discord_hs(rho, measured: str = "A") -> float:
    """Hilbert-Schmidt geometric discord 1/4 (|x|^2 + |T|^2 - k_max).

    Only Hermiticity is required, so the formula can be evaluated on any
    two-qubit Hermitian operator with unit trace.
    """
    m = mc.as_matrix(rho)
    if m.shape != (4, 4):
        raise DimMismatch("geometric_discord_hs needs a two-qubit operator")
    if _side(measured) == "B":
        m = mc.permute_subsystems(m, [1, 0], dims=(2, 2))
    bt = bloch_decompose(DensityMatrix((2, 2), m))
    x, T = bt.x, bt.T
    K = np.outer(x, x) + T @ T.T
    kmax = float(np.linalg.eigvalsh(K).max())
    return float(0.25 * (x @ x + np.sum(T * T) - kmax))


def trace_discord_x(x, check: bool = True) -> float:
    """Trace-distance discord of an X state (measurement on A).

    Complex anti-diagonal phases are removed first by local diagonal unitaries,
    which leave the measure unchanged. The |gamma1| >= |gamma2| ordering is also
    a local-unitary symmetry and is enforced explicitly.
    """
    x = _as_x(x)
    if check:
        x.check()
    r41, r32 = abs(x.a14), abs(x.a23)
    g1 = 2 * (r32 + r41)
    g2 = 2 * (r32 - r41)
    if abs(g1) < abs(g2):
        g1, g2 = g2, g1
    g3 = 1 - 2 * (x.d2 + x.d3)
    x3 = 2 * (x.d1 + x.d2) - 1
    a, b, c, s = g1 * g1, g2 * g2, g3 * g3, x3 * x3
    hi = max(c, b + s)
    lo = min(c, a)
    den = hi - lo + a - b
    if den <= 1e-14:
        return float(abs(g1))
    num = a * hi - b * lo
    return float(np.sqrt(max(num, 0.0) / den))


# ----------------------------------------------------------------------------
# linear-entropy classical correlation


def _symmetric_purification(rho_b: np.ndarray):
    """V with |v> = sum V_ab |a>|b>, V = Phi diag(sqrt(lam)) Phi^T, Tr_1 |v><v| = rho_b."""
    w, phi = mc.eigh(rho_b)
    w = mc.clamp_spectrum(w)
    V = (phi * np.sqrt(w)) @ phi.T
    return V, w


def channel_blocks(rho) -> np.ndarray:
    """Solve for Lambda(|a><a'|), the qubit-to-A channel with rho = (Lambda (x) 1)|v><v|.

    Returns an array X[a, a'] of dA x dA operators. Raises SingularPurification
    when rho_B is (numerically) singular.
    """
    rho = as_state(rho)
    if len(rho.dims) != 2 or rho.dims[1] != 2:
        raise DimMismatch(f"second factor must be a qubit, got dims {rho.dims}")
    dA = rho.dims[0]
    rho_b = mc.partial_trace(rho, 1).mat
    V, w = _symmetric_purification(rho_b)
    cond = float(np.linalg.cond(V)) if w.min() > 0 else float("inf")
    if not np.isfinite(cond) or cond > 1e8:
        raise SingularPurification(f"reduced state of the measured qubit is singular (cond={cond:.3e})", cond)
    t = rho.mat.reshape(dA, 2, dA, 2)
    # beta[b, b'] (operator on A) = t[:, b, :, b']; beta = V^T X V-bar in the (a, b) indices
    beta = np.transpose(t, (1, 3, 0, 2))  # b, b', m, n
    vinv = np.linalg.inv(V.T)
    vbinv = np.linalg.inv(V.conj())
    X = np.einsum("ab,bcmn,cd->admn", vinv, beta, vbinv)
    return X


def _channel_on(X: np.ndarray, op: np.ndarray) -> np.ndarray:
    return np.einsum("ab,abmn->mn", op, X)


def _pure_marginal_b(rho: DensityMatrix, tol: float = 1e-12) -> bool:
    # a pure marginal forces a product state, so J2 = 0 and L is taken as zero
    return float(np.linalg.eigvalsh(mc.partial_trace(rho, 1).mat).min()) <= tol


def classical_corr_linear_qubitqubit(rho):
    """Linear-entropy classical correlation measuring B: (J2, ChannelMatrixL).

    L_ij = Tr[Lambda(sigma_i) sigma_j] / 2 and J2 = lambda_max(L^T L) S2(rho_B).
    """
    rho = as_state(rho)
    require_dims(rho, (2, 2), "classical_corr_linear_qubitqubit")
    if _pure_marginal_b(rho):
        return 0.0, ChannelMatrixL(np.zeros((3, 3)))
    X = channel_blocks(rho)
    L = np.empty((3, 3))
    for i, si in enumerate(mc.PAULIS):
        li = _channel_on(X, si)
        for j, sj in enumerate(mc.PAULIS):
            L[i, j] = 0.5 * np.real(np.trace(li @ sj))
    s2b = linear_entropy(mc.partial_trace(rho, 1).mat)
    cl = ChannelMatrixL(L)
    return float(cl.lambda_max() * s2b), cl


def classical_corr_linear_quditqubit(rho):
    """Linear-entropy classical correlation of a d (x) 2 state measuring the qubit.

    Uses calL = (2/d) (calR^T)^{-1} R^T with R the Fano-Bloch tensor of rho and
    calR the Pauli correlation tensor of the symmetric purification of rho_B.
    The returned L = (d/2) calL restricted to generator rows and columns, so
    that J2 = (4/d^2) lambda_max(L L^T) S2(rho_B).
    """
    rho = as_state(rho)
    if len(rho.dims) != 2 or rho.dims[1] != 2:
        raise DimMismatch(f"classical_corr_linear_quditqubit needs dims (d, 2), got {rho.dims}")
    d = rho.dims[0]
    if _pure_marginal_b(rho):
        return 0.0, ChannelMatrixL(np.zeros((d * d - 1, 3)))
    rho_b = mc.partial_trace(rho, 1).mat
    V, _ = _symmetric_purification(rho_b)
    v = V.ravel()
    pv = np.outer(v, v.conj())
    sig = [mc.PAULI_I, *mc.PAULIS]
    calR = np.array([[np.real(np.trace(pv @ mc.kron(sa, sb))) for sb in sig] for sa in sig])
    cond = float(np.linalg.cond(calR))
    if not np.isfinite(cond) or cond > 1e8:
        raise SingularR(f"Pauli tensor of the purification is singular (cond={cond:.3e})", cond)
    R = fano_bloch(rho).R
    calL = (2.0 / d) * np.linalg.solve(calR.T, R.T)
    L = 0.5 * d * calL[1:, 1:]
    s2b = linear_entropy(rho_b)
    cl = ChannelMatrixL(L)
    return float(4.0 / d**2 * cl.lambda_max() * s2b), cl


def classical_corr_linear(rho):
    rho = as_state(rho)
    if tuple(rho.dims) == (2, 2):
        return classical_corr_linear_qubitqubit(rho)
    return classical_corr_linear_quditqubit(rho)


def linear_discord(rho) -> float:
    """I(A:B) (von Neumann) minus the linear-entropy classical correlation measuring B."""
    rho = as_state(rho)
    j2, _ = classical_corr_linear(rho)
    return float(mutual_information(rho) - j2)


# ----------------------------------------------------------------------------
# tripartite relations


def koashi_winter_residual(psi: PureState, grid_n: int = 64, refine_iters: int = 20) -> float:
    """|E_f(rho_AB) + J(rho_BE) - S(rho_B)| for a pure three-qubit state.

    J(rho_BE) is the classical correlation with the measurement on E, obtained
    from :func:`discord_numeric`.
    """
    if tuple(psi.dims) != (2, 2, 2):
        raise DimMismatch(f"koashi_winter_residual needs dims (2,2,2), got {psi.dims}")
    rho = psi.density()
    ef = eof_2q(mc.partial_trace(rho, [0, 1]))
    rho_be = mc.partial_trace(rho, [1, 2])
    j = discord_numeric(rho_be, "B", grid_n, refine_iters).classical
    s_b = von_neumann(mc.partial_trace(rho, 1).mat)
    return float(abs(ef + j - s_b))


def pair_discord(rho3: DensityMatrix, x: int, y: int, grid_n: int = 64, refine_iters: int = 20) -> float:
    """Q_{x|y}: discord of the reduced pair (x, y) with the measurement on y."""
    pair = mc.partial_trace(rho3, [x, y])
    side = "B" if y > x else "A"  # partial_trace keeps ascending order
    return discord_numeric(pair, side, grid_n, refine_iters).quantum


def conservation_3q_residual(psi: PureState, grid_n: int = 64, refine_iters: int = 20):
    """(central, cyclic) residuals of the three-qubit conservation laws.

    central = |E_AB + E_AC - Q_{A|B} - Q_{A|C}|
    cyclic  = |E_AB + E_BC + E_CA - Q_{B|A} - Q_{C|B} - Q_{A|C}|
    with E the entanglement of formation and Q_{x|y} measuring y.
    """
    if tuple(psi.dims) != (2, 2, 2):
        raise DimMismatch(f"conservation_3q_residual needs dims (2,2,2), got {psi.dims}")
    rho = psi.density()
    A, B, C = 0, 1, 2
    e = {
        (A, B): eof_2q(mc.partial_trace(rho, [A, B])),
        (A, C): eof_2q(mc.partial_trace(rho, [A, C])),
        (B, C): eof_2q(mc.partial_trace(rho, [B, C])),
    }
    q = {}
    for xy in [(A, B), (A, C), (B, A), (C, B)]:
        q[xy] = pair_discord(rho, *xy, grid_n=grid_n, refine_iters=refine_iters)
    central = abs(e[A, B] + e[A, C] - q[A, B] - q[A, C])
    cyclic = abs(e[A, B] + e[B, C] + e[A, C] - q[B, A] - q[C, B] - q[A, C])
    return float(central), float(cyclic)


MONOGAMY_MEASURES = ("lqu", "negativity_sq", "concurrence_sq")


def monogamy_delta(rho, measure: str = "concurrence_sq", pivot: int = 0) -> float:
    """delta = Q_{pivot|rest} - sum_i Q_{pivot, i} for a multiqubit state."""
    from .uncertainty import lqu_2xd

    rho = as_state(rho)
    n = len(rho.dims)
    if any(d != 2 for d in rho.dims) or n < 3:
        raise UnsupportedCut(f"monogamy_delta needs at least three qubits, got dims {rho.dims}")
    if not 0 <= pivot < n:
        raise UnsupportedCut(f"pivot {pivot} out of range")
    if measure not in MONOGAMY_MEASURES:
        raise UnsupportedCut(f"unknown measure {measure!r}")
    others = [k for k in range(n) if k != pivot]
    front = mc.permute_subsystems(rho, [pivot] + others)
    if measure == "concurrence_sq":
        if abs(rho.purity() - 1.0) > 1e-10:
            raise UnsupportedCut("one-versus-rest concurrence is only available for pure global states")
        red = mc.partial_trace(rho, pivot).mat
        whole = 2.0 * (1.0 - float(np.real(np.vdot(red, red))))
        parts = [concurrence_2q(mc.partial_trace(rho, sorted([pivot, k]))) ** 2 for k in others]
    elif measure == "negativity_sq":
        whole = negativity(rho, subsystem=pivot) ** 2
        parts = [negativity(mc.partial_trace(rho, sorted([pivot, k])), subsystem=0) ** 2 for k in others]
    else:
        whole = lqu_2xd(DensityMatrix((2, int(np.prod(rho.dims)) // 2), front.mat))[0]
        parts = []
        for k in others:
            pair = mc.partial_trace(rho, sorted([pivot, k]))
            if k < pivot:
                pair = mc.permute_subsystems(pair, [1, 0])
            parts.append(lqu_2xd(pair)[0])
    return float(whole - sum(parts))


__all__ = [
    "DiscordResult",
    "ChannelMatrixL",
    "discord_x",
    "discord_bell_diagonal",
    "discord_numeric",
    "conditional_entropy_fixed",
    "discord_rank2",
    "geometric_discord_hs",
    "trace_discord_x",
    "channel_blocks",
    "classical_corr_linear_qubitqubit",
    "classical_corr_linear_quditqubit",
    "classical_corr_linear",
    "linear_discord",
    "koashi_winter_residual",
    "pair_discord",
    "conservation_3q_residual",
    "monogamy_delta",
]
