"""Verification suites: closed forms, oracle agreement, conservation laws, metrology.

Each check returns a :class:`Check` carrying its worst residual and the
tolerance it is judged against. ``n`` scales the number of random samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import coherence as co
from . import discord as dc
from . import dynamics as dy
from . import entanglement as et
from . import entropy as en
from . import matcore as mc
from . import metrology as me
from . import states as st
from . import uncertainty as un


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} residual={self.residual:.12g} tol={self.tol:.3g}"


def _seeds(seed: int, n: int) -> list:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


# ----------------------------------------------------------------------------
# closed forms


def check_bell_golden() -> list:
    rho = st.bell_state("bell_phi_plus")
    psi = st.PureState((2, 2), st.bell_ket("bell_phi_plus"))
    closed = {
        "concurrence": (et.concurrence_2q(rho), 1.0),
        "eof": (et.eof_2q(rho), 1.0),
        "entanglement_entropy": (et.entanglement_entropy(psi), 1.0),
        "negativity": (et.negativity(rho), 0.5),
        "log_negativity": (et.log_negativity(rho), 1.0),
        "lqu": (un.lqu_2xd(rho)[0], 1.0),
        "lqfi": (un.lqfi(rho)[0], 1.0),
        "discord_x": (dc.discord_x(rho).quantum, 1.0),
    }
    out = [Check(f"bell.{k}", abs(v - e), 1e-9) for k, (v, e) in closed.items()]
    out.append(Check("bell.discord_numeric", abs(dc.discord_numeric(rho).quantum - 1.0), 2e-4))
    return out


def check_bell_diagonal(n: int, seed: int) -> list:
    r_tr = r_hs = r_j2 = r_wang = 0.0
    for s in _seeds(seed, n):
        p = st.random_bell_diagonal(s)
        c = np.array([p.c1, p.c2, p.c3])
        a = np.sort(np.abs(c))
        rho = st.DensityMatrix((2, 2), p.matrix())
        r_tr = max(r_tr, abs(dc.trace_discord_x(p.to_x()) - a[1]))
        r_hs = max(r_hs, abs(dc.geometric_discord_hs(rho) - 0.25 * (a[0] ** 2 + a[1] ** 2)))
        r_j2 = max(r_j2, abs(dc.classical_corr_linear(rho)[0] - a[2] ** 2))
        r_wang = max(r_wang, abs(dc.discord_x(p.to_x()).quantum - dc.discord_bell_diagonal(p)))
    return [
        Check("bd.trace_discord", r_tr, 1e-9),
        Check("bd.hs_geometric", r_hs, 1e-9),
        Check("bd.linear_classical", r_j2, 1e-8),
        Check("bd.wang_vs_closed", r_wang, 1e-8),
    ]


def horodecki_rank2_formula(p: float) -> float:
    """h(p/2) - h(p) + g(2p(1-p)) for the Horodecki family."""
    return en.binary_h(p / 2) - en.binary_h(p) + dc._g(2 * p * (1 - p))


def check_horodecki(points: int = 21) -> list:
    r_pair = r_l = 0.0
    for p in np.linspace(0.0, 1.0, points):
        rho = st.horodecki(p)
        formula = horodecki_rank2_formula(p)
        wang = dc.discord_x(rho).quantum
        r_pair = max(r_pair, abs(formula - wang), abs(formula - dc.discord_rank2(rho)))
        a = np.sqrt(p / (2 - p))
        expected = np.diag([a, -a, -p / (2 - p)])
        _, L = dc.classical_corr_linear(rho)
        r_l = max(r_l, float(np.max(np.abs(L.L - expected))))
    return [Check("horodecki.formula_vs_wang_vs_rank2", r_pair, 2e-4), Check("horodecki.L_entries", r_l, 1e-9)]


def check_pure_identities(n: int, seed: int) -> list:
    r_lqu = r_c2 = r_l1 = r_cc = 0.0
    for s in _seeds(seed, n):
        psi = st.random_pure((2, 2), s)
        rho = psi.density()
        s2 = en.linear_entropy(mc.partial_trace(rho, 0).mat)
        lqu = un.lqu_2xd(rho)[0]
        r_lqu = max(r_lqu, abs(lqu - s2))
        r_c2 = max(r_c2, abs(lqu - et.concurrence_pure(psi) ** 2))
        U = co.schmidt_reference_basis(psi)
        cl1 = co.c_l1(rho, U)
        r_l1 = max(r_l1, abs(cl1 - 2 * et.negativity(rho)))
        r_cc = max(r_cc, abs(co.coherence_concurrence_pure(psi, U) - cl1))
    return [
        Check("pure.lqu_eq_s2", r_lqu, 1e-9),
        Check("pure.lqu_eq_c2", r_c2, 1e-9),
        Check("pure.cl1_eq_2N", r_l1, 1e-9),
        Check("pure.cc_eq_cl1", r_cc, 1e-10),
    ]


# ----------------------------------------------------------------------------
# oracle agreement


def check_bd_numeric(n: int, seed: int) -> list:
    r = 0.0
    for s in _seeds(seed, n):
        p = st.random_bell_diagonal(s)
        r = max(r, abs(dc.discord_x(p.to_x()).quantum - dc.discord_numeric(p.matrix()).quantum))
    return [Check("bd.wang_vs_numeric", r, 2e-4)]


def check_horodecki_numeric(points: int = 21) -> list:
    r = 0.0
    for p in np.linspace(0.0, 1.0, points):
        rho = st.horodecki(p)
        r = max(r, abs(horodecki_rank2_formula(p) - dc.discord_numeric(rho).quantum))
    return [Check("horodecki.formula_vs_numeric", r, 2e-4)]


def check_x_battery(n: int, seed: int) -> list:
    r_c = r_q = r_t = 0.0
    for s in _seeds(seed, n):
        x = st.random_x_params(s)
        rho = x.density()
        r_c = max(r_c, abs(et.concurrence_x(x) - et.concurrence_2q(rho)))
        r_q = max(r_q, abs(dc.discord_x(x).quantum - dc.discord_numeric(rho).quantum))
        p = st.random_bell_diagonal(s)
        r_t = max(r_t, abs(dc.trace_discord_x(p.to_x()) - np.sort(np.abs([p.c1, p.c2, p.c3]))[1]))
    return [
        Check("x.concurrence_closed_vs_wootters", r_c, 1e-10),
        Check("x.discord_closed_vs_numeric", r_q, 2e-4),
        Check("x.trace_discord_bd_limit", r_t, 1e-9),
    ]


def check_sandwich(n: int, seed: int) -> list:
    worst = -np.inf
    for dims in ((2, 2), (2, 3)):
        for s in _seeds(seed + dims[1], n):
            rho = st.random_density(dims, seed=s)
            u = un.lqu_2xd(rho)[0]
            f = un.lqfi(rho)[0]
            worst = max(worst, u - f, f - 2 * u)
    return [Check("sandwich.lqu_le_lqfi_le_2lqu", max(worst, 0.0), 1e-9)]


def relative_entropy_of_coherence_oracle(rho) -> float:
    """min over diagonal qubit states of S(rho || delta), by bounded scalar search."""
    m = mc.as_matrix(rho)
    res = minimize_scalar(
        lambda q: en.relative_entropy(m, np.diag([q, 1 - q])),
        bounds=(1e-12, 1 - 1e-12),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.fun)


def check_coherence(n: int, seed: int) -> list:
    r_cr = r_cg = 0.0
    for s in _seeds(seed, n):
        rho = st.random_density((2,), seed=s).mat
        r_cr = max(r_cr, abs(co.c_rel_entropy(rho) - relative_entropy_of_coherence_oracle(rho)))
        r_cg = max(r_cg, abs(co.c_geometric_qubit(rho) - co.c_geometric_numeric(rho)))
    viol = 0.0
    for d in (2, 3, 4):
        for s in _seeds(seed + d, n):
            lhs, _ = co.complementarity_check(st.random_density((d,), seed=s).mat)
            viol = max(viol, lhs - 1.0)
    eq = max(abs(co.complementarity_check(st.plus_state(d).mat)[0] - 1.0) for d in (2, 3, 4))
    return [
        Check("coherence.cr_vs_minimisation", r_cr, 1e-4),
        Check("coherence.complementarity_violation", max(viol, 0.0), 1e-9),
        Check("coherence.complementarity_equality_plus", eq, 1e-9),
        Check("coherence.cg_closed_vs_numeric", r_cg, 1e-5),
    ]


# ----------------------------------------------------------------------------
# conservation laws and dynamics


def check_tripartite(n: int, seed: int) -> list:
    r_cen = r_cyc = r_kw = 0.0
    for s in _seeds(seed, n):
        central, cyclic = dc.conservation_3q_residual(st.random_pure((2, 2, 2), s))
        r_cen, r_cyc = max(r_cen, central), max(r_cyc, cyclic)
        pur = st.purify(st.random_density((2, 2), rank=2, seed=s + 1))
        r_kw = max(r_kw, dc.koashi_winter_residual(pur))
    r_kw = max(r_kw, dc.koashi_winter_residual(st.ghz_ket(3)))
    return [
        Check("tripartite.central_law", r_cen, 5e-3),
        Check("tripartite.cyclic_law", r_cyc, 5e-3),
        Check("tripartite.koashi_winter", r_kw, 2e-3),
    ]


def rk4_order(dts=(0.2, 0.1, 0.05), t_end: float = 1.0) -> float:
    """Smallest observed convergence order of the integrator on a driven dephasing model."""
    model = dy.LindbladModel(0.5 * mc.PAULI_X, [(0.3, mc.PAULI_Z)])
    rho0 = st.plus_state(2)
    ref = dy.lindblad_evolve(rho0, model, t_end, 1e-4).states[-1].mat
    errs = [np.abs(dy.lindblad_evolve(rho0, model, t_end, dt).states[-1].mat - ref).max() for dt in dts]
    return float(min(np.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)))


def check_dynamics(seed: int) -> list:
    comp = max(dy.channel_preset(c, p).completeness_error() for c in dy.CHANNELS for p in np.linspace(0, 1, 11))
    rho = st.random_density((2,), seed=seed)
    deph = dy.apply_channel(rho, dy.channel_preset("dephasing", 1.0), 0).mat
    off = float(np.max(np.abs(deph - np.diag(np.diag(deph)))))
    g = 0.8
    model = dy.LindbladModel(np.zeros((2, 2)), [(g, np.array([[0, 1], [0, 0]]))])
    tr = dy.lindblad_evolve(st.computational([1], (2,)), model, 2.0, 0.01)
    pop = max(abs(s.mat[1, 1].real - np.exp(-g * t)) for t, s in zip(tr.times, tr.states))
    U = st.random_unitary(6, seed=seed)
    rho_e = st.random_density((3,), seed=seed + 1)
    rho_s = st.random_density((2,), seed=seed + 2)
    ch = dy.kraus_from_environment(U, rho_e)
    env = float(np.max(np.abs(dy.apply_channel(rho_s, ch).mat - dy.evolve_with_environment(rho_s, U, rho_e))))
    order = rk4_order()
    return [
        Check("dynamics.completeness", comp, 1e-12),
        Check("dynamics.dephasing_full_offdiag", off, 1e-15),
        Check("dynamics.amplitude_damping_population", pop, 1e-5),
        Check("dynamics.trace_drift", tr.max_trace_drift, 1e-8),
        Check("dynamics.rk4_order_deficit", max(3.5 - order, 0.0), 0.0),
        Check("dynamics.environment_two_route", env, 1e-9),
    ]


# ----------------------------------------------------------------------------
# metrology


def bloch_angle_state(theta, radius: float = 0.7) -> np.ndarray:
    t, p = theta
    r = radius * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
    return 0.5 * (np.eye(2) + sum(r[i] * mc.PAULIS[i] for i in range(3)))


def x_test_family(theta) -> st.XStateParams:
    a, b = theta
    d = np.array([0.3 + 0.1 * np.sin(a), 0.2, 0.25, 0.25 - 0.1 * np.sin(a)])
    a14 = 0.4 * np.cos(b) * np.exp(1j * a) * np.sqrt(d[0] * d[3])
    a23 = 0.1 * b * np.sqrt(d[1] * d[2])
    return st.XStateParams(*d, a14, a23)


def _qfim_routes(fam, rho, drs, third):
    A = me.qfim(fam)
    B = me.qfim_vectorized(rho, drs)
    C = third
    return max(np.abs(A - B).max(), np.abs(A - C).max(), np.abs(B - C).max())


def check_metrology(n: int, seed: int) -> list:
    radius, t, p = 0.7, 0.7, 0.4
    fam = me.evaluator_family(lambda th: bloch_angle_state(th, radius), [t, p])
    rho = fam.state().mat
    drs = [me.d_rho(fam, k) for k in range(2)]
    r = radius * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
    dr_t = radius * np.array([np.cos(t) * np.cos(p), np.cos(t) * np.sin(p), -np.sin(t)])
    dr_p = radius * np.array([-np.sin(t) * np.sin(p), np.sin(t) * np.cos(p), 0.0])
    r_bloch = _qfim_routes(fam, rho, drs, me.qfim_bloch_qubit(r, [dr_t, dr_p]))

    xfam = me.x_family(x_test_family, [0.3, 0.5])
    xrho = xfam.state().mat
    xdrs = [me.d_rho(xfam, k) for k in range(2)]
    r_x = _qfim_routes(xfam, xrho, xdrs, me.qfim_xstate_block(xrho, xdrs))

    r_ghz = 0.0
    for m in (2, 3, 4):
        H = sum(mc.embed_operator(mc.PAULI_Z / 2, k, (2,) * m) for k in range(m))
        r_ghz = max(r_ghz, abs(me.qfi_pure_unitary(st.ghz_ket(m), H) - m * m))

    r_sat = 0.0
    viol = -np.inf
    for s in _seeds(seed, n):
        rng = np.random.default_rng(s)
        rho0 = st.random_density((2,), seed=rng)
        H = mc.hermitize(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        f = me.unitary_family(rho0, H)
        d = me.d_rho(f)
        q = me.qfi(f.state().mat, d)
        r_sat = max(r_sat, abs(me.cfi(f, me.sld_projectors(f.state().mat, d))[0] - q))
        viol = max(viol, me.cfi(f, random_povm(2, 3, rng))[0] - q)
    return [
        Check("metrology.bloch_three_routes", r_bloch, 1e-7),
        Check("metrology.x_three_routes", r_x, 1e-7),
        Check("metrology.ghz_heisenberg", r_ghz, 1e-8),
        Check("metrology.sld_projectors_saturate", r_sat, 1e-6),
        Check("metrology.cfi_le_qfi", max(viol, 0.0), 1e-9),
    ]


def random_povm(d: int, k: int, seed=None) -> list:
    """k-outcome POVM E_i = S^{-1/2} G_i S^{-1/2} from random positive G_i."""
    rng = np.random.default_rng(seed)
    G = []
    for _ in range(k):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        G.append(a @ a.conj().T)
    w, v = np.linalg.eigh(sum(G))
    s = (v / np.sqrt(w)) @ v.conj().T
    return [mc.hermitize(s @ g @ s) for g in G]


# ----------------------------------------------------------------------------
# suites


SUITES: dict = {
    "closed_forms": lambda n, seed: [
        *check_bell_golden(),
        *check_bell_diagonal(n, seed),
        *check_horodecki(),
        *check_pure_identities(n, seed),
    ],
    "oracles": lambda n, seed: [
        *check_bd_numeric(n, seed),
        *check_horodecki_numeric(),
        *check_x_battery(n, seed),
        *check_sandwich(n, seed),
        *check_coherence(n, seed),
    ],
    "conservation": lambda n, seed: [*check_tripartite(n, seed), *check_dynamics(seed)],
    "metrology": lambda n, seed: check_metrology(n, seed),
}
SUITE_NAMES = (*SUITES, "all")


def run_suite(name: str, n: int = 20, seed: int = 0) -> list:
    if name == "all":
        return [c for k in SUITES for c in SUITES[k](n, seed)]
    runner: Callable = SUITES[name]
    return runner(n, seed)


__all__ = ["Check", "SUITES", "SUITE_NAMES", "run_suite", "random_povm", "rk4_order", "horodecki_rank2_formula"]
