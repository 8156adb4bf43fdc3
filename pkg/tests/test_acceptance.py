"""The ten acceptance criteria at their stated tolerances.

Each test reports one pass/fail line (shown in the terminal summary) and then
asserts the same condition.
"""

import numpy as np
from scipy.optimize import minimize_scalar

from qcorr import coherence as co
from qcorr import discord as dc
from qcorr import dynamics as dy
from qcorr import entanglement as et
from qcorr import entropy as en
from qcorr import matcore as mc
from qcorr import metrology as me
from qcorr import states as st
from qcorr import uncertainty as un


def h(x):
    x = float(np.clip(x, 0.0, 1.0))
    return 0.0 if x in (0.0, 1.0) else -x * np.log2(x) - (1 - x) * np.log2(1 - x)


def g(x):
    return h(0.5 * (1 + np.sqrt(max(1 - x, 0.0))))


def test_criterion_01_bell_golden_values(report):
    rho = st.bell_state("bell_phi_plus")
    psi = st.PureState((2, 2), st.bell_ket("bell_phi_plus"))
    values = {
        "concurrence": (et.concurrence_2q(rho), 1.0),
        "eof": (et.eof_2q(rho), 1.0),
        "entanglement_entropy": (et.entanglement_entropy(psi), 1.0),
        "negativity": (et.negativity(rho), 0.5),
        "log_negativity": (et.log_negativity(rho), 1.0),
        "lqu": (un.lqu_2xd(rho)[0], 1.0),
        "lqfi": (un.lqfi(rho)[0], 1.0),
        "discord_closed": (dc.discord_x(rho).quantum, 1.0),
    }
    checks = {k: (abs(v - e), 1e-9) for k, (v, e) in values.items()}
    checks["discord_numeric"] = (abs(dc.discord_numeric(rho).quantum - 1.0), 2e-4)
    assert report("criterion 1", checks)


def test_criterion_02_bell_diagonal_closed_forms(report):
    rng = np.random.default_rng(2)
    r = dict.fromkeys(["trace", "hs", "j2", "wang_closed", "wang_numeric"], 0.0)
    for _ in range(100):
        p = st.random_bell_diagonal(rng)
        c = np.array([p.c1, p.c2, p.c3])
        a = np.sort(np.abs(c))
        rho = p.matrix()
        # oracle for the Bell-diagonal discord: eigenvalues straight from the Bell-basis weights
        lam = np.linalg.eigvalsh(rho)
        cm = a[2]
        q_bd = 2 + sum(x * np.log2(x) for x in lam if x > 0) - sum(
            v / 2 * np.log2(v) for v in (1 - cm, 1 + cm) if v > 0
        )
        wang = dc.discord_x(p.to_x()).quantum
        r["trace"] = max(r["trace"], abs(dc.trace_discord_x(p.to_x()) - a[1]))
        r["hs"] = max(r["hs"], abs(dc.geometric_discord_hs(rho) - 0.25 * (a[0] ** 2 + a[1] ** 2)))
        r["j2"] = max(r["j2"], abs(dc.classical_corr_linear_qubitqubit(rho)[0] - a[2] ** 2))
        r["wang_closed"] = max(r["wang_closed"], abs(wang - q_bd), abs(dc.discord_bell_diagonal(p) - q_bd))
        r["wang_numeric"] = max(r["wang_numeric"], abs(wang - dc.discord_numeric(rho).quantum))
    tols = {"trace": 1e-9, "hs": 1e-9, "j2": 1e-8, "wang_closed": 1e-8, "wang_numeric": 2e-4}
    assert report("criterion 2", {k: (r[k], tols[k]) for k in r})


def test_criterion_03_horodecki_family(report):
    pair = l_entries = 0.0
    for p in np.linspace(0.0, 1.0, 21):
        rho = st.horodecki(p)
        formula = h(p / 2) - h(p) + g(2 * p * (1 - p))
        wang = dc.discord_x(rho).quantum
        num = dc.discord_numeric(rho).quantum
        pair = max(pair, abs(formula - wang), abs(formula - num), abs(wang - num))
        a = np.sqrt(p / (2 - p))
        expected = np.diag([a, -a, -p / (2 - p)])
        _, L = dc.classical_corr_linear_qubitqubit(rho)
        l_entries = max(l_entries, float(np.max(np.abs(L.L - expected))))
    assert report("criterion 3", {"pairwise_discord": (pair, 2e-4), "L_entries": (l_entries, 1e-9)})


def test_criterion_04_x_state_battery(report):
    rng = np.random.default_rng(4)
    rc = rq = rt = 0.0
    for _ in range(300):
        x = st.random_x_params(rng)
        rho = x.density()
        rc = max(rc, abs(et.concurrence_x(x) - et.concurrence_2q(rho)))
        rq = max(rq, abs(dc.discord_x(x).quantum - dc.discord_numeric(rho).quantum))
        # Bell-diagonal member with random anti-diagonal phases (a local diagonal unitary)
        p = st.random_bell_diagonal(rng)
        xb = p.to_x()
        f1, f2 = rng.uniform(0, 2 * np.pi, 2)
        xb = st.XStateParams(xb.d1, xb.d2, xb.d3, xb.d4, xb.a14 * np.exp(1j * f1), xb.a23 * np.exp(1j * f2))
        rt = max(rt, abs(dc.trace_discord_x(xb) - np.sort(np.abs([p.c1, p.c2, p.c3]))[1]))
    assert report(
        "criterion 4",
        {"concurrence": (rc, 1e-10), "discord": (rq, 2e-4), "trace_discord_bd": (rt, 1e-9)},
    )


def test_criterion_05_pure_state_identities(report):
    rng = np.random.default_rng(5)
    r_s2 = r_c2 = r_l1 = r_cc = 0.0
    for _ in range(200):
        psi = st.random_pure((2, 2), rng)
        rho = psi.density()
        lqu = un.lqu_2xd(rho)[0]
        rho_a = mc.partial_trace(rho, 0).mat
        s2 = 2 * (1 - np.real(np.trace(rho_a @ rho_a)))
        # concurrence of a pure state from the amplitude matrix: 2|det|
        c = 2 * abs(np.linalg.det(np.asarray(psi.amplitudes).reshape(2, 2)))
        r_s2 = max(r_s2, abs(lqu - s2))
        r_c2 = max(r_c2, abs(lqu - c * c))
        U = co.schmidt_reference_basis(psi)
        cl1 = co.c_l1(rho, U)
        r_l1 = max(r_l1, abs(cl1 - 2 * et.negativity(rho)))
        r_cc = max(r_cc, abs(co.coherence_concurrence_pure(psi, U) - cl1))
    assert report(
        "criterion 5",
        {"lqu_s2": (r_s2, 1e-9), "lqu_c2": (r_c2, 1e-9), "cl1_2N": (r_l1, 1e-9), "cc_cl1": (r_cc, 1e-10)},
    )


def test_criterion_06_sandwich_bound(report):
    rng = np.random.default_rng(6)
    lower = upper = 0.0
    for dims in [(2, 2), (2, 3)]:
        for _ in range(200):
            rank = int(rng.integers(1, 2 * dims[1] + 1))
            rho = st.random_density(dims, rank=rank, seed=rng)
            u = un.lqu_2xd(rho)[0]
            f = un.lqfi(rho)[0]
            lower = max(lower, u - f)
            upper = max(upper, f - 2 * u)
    assert report("criterion 6", {"lqu_minus_lqfi": (lower, 1e-9), "lqfi_minus_2lqu": (upper, 1e-9)})


def test_criterion_07_tripartite_relations(report):
    rng = np.random.default_rng(7)
    central = cyclic = kw = 0.0
    for _ in range(100):
        c1, c2 = dc.conservation_3q_residual(st.random_pure((2, 2, 2), rng))
        central, cyclic = max(central, c1), max(cyclic, c2)
        kw = max(kw, dc.koashi_winter_residual(st.purify(st.random_density((2, 2), rank=2, seed=rng))))
    kw_ghz = dc.koashi_winter_residual(st.ghz_ket(3))
    assert report(
        "criterion 7",
        {"central": (central, 5e-3), "cyclic": (cyclic, 5e-3), "kw_random": (kw, 2e-3), "kw_ghz": (kw_ghz, 2e-3)},
    )


def _bloch_state(theta, radius=0.7):
    t, p = theta
    r = radius * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
    return 0.5 * (np.eye(2) + sum(r[i] * mc.PAULIS[i] for i in range(3)))


def _x_state(theta):
    a, b = theta
    d = np.array([0.3 + 0.1 * np.sin(a), 0.2, 0.25, 0.25 - 0.1 * np.sin(a)])
    return st.XStateParams(*d, 0.4 * np.cos(b) * np.exp(1j * a) * np.sqrt(d[0] * d[3]), 0.1 * b * np.sqrt(d[1] * d[2]))


def _random_povm(d, k, rng):
    G = [a @ a.conj().T for a in (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(k))]
    w, v = np.linalg.eigh(sum(G))
    s = (v / np.sqrt(w)) @ v.conj().T
    return [mc.hermitize(s @ x @ s) for x in G]


def test_criterion_08_metrology(report):
    rng = np.random.default_rng(8)
    routes = 0.0
    for theta, radius in [([0.7, 0.4], 0.7), ([1.2, 2.5], 0.35)]:
        fam = me.evaluator_family(lambda th: _bloch_state(th, radius), theta)
        rho = fam.state().mat
        drs = [me.d_rho(fam, k) for k in range(2)]
        t, p = theta
        r = radius * np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
        dr = [
            radius * np.array([np.cos(t) * np.cos(p), np.cos(t) * np.sin(p), -np.sin(t)]),
            radius * np.array([-np.sin(t) * np.sin(p), np.sin(t) * np.cos(p), 0.0]),
        ]
        A, B, C = me.qfim(fam), me.qfim_vectorized(rho, drs), me.qfim_bloch_qubit(r, dr)
        routes = max(routes, np.abs(A - B).max(), np.abs(A - C).max(), np.abs(B - C).max())
    for theta in ([0.3, 0.5], [1.1, -0.4]):
        fam = me.x_family(_x_state, theta)
        rho = fam.state().mat
        drs = [me.d_rho(fam, k) for k in range(2)]
        A, B, C = me.qfim(fam), me.qfim_vectorized(rho, drs), me.qfim_xstate_block(rho, drs)
        routes = max(routes, np.abs(A - B).max(), np.abs(A - C).max(), np.abs(B - C).max())

    heis = 0.0
    for n in (2, 3, 4):
        Jz = sum(mc.embed_operator(mc.PAULI_Z / 2, k, (2,) * n) for k in range(n))
        heis = max(heis, abs(me.qfi_pure_unitary(st.ghz_ket(n), Jz) - n * n))

    sat = 0.0
    viol = 0.0
    for i in range(50):
        d = 2 + i % 2
        rho0 = st.random_density((d,), seed=rng)
        H = mc.hermitize(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        fam = me.unitary_family(rho0, H)
        drho = me.d_rho(fam)
        q = me.qfi(fam.state().mat, drho)
        sat = max(sat, abs(me.cfi(fam, me.sld_projectors(fam.state().mat, drho))[0] - q))
        viol = max(viol, me.cfi(fam, _random_povm(d, int(rng.integers(2, 5)), rng))[0] - q)
    assert report(
        "criterion 8",
        {"qfim_routes": (routes, 1e-7), "heisenberg": (heis, 1e-8), "sld_saturation": (sat, 1e-6), "cfi_le_qfi": (viol, 1e-12)},
    )


def test_criterion_09_coherence(report):
    rng = np.random.default_rng(9)
    r_cr = r_cg = 0.0
    for _ in range(50):
        rho = st.random_density((2,), seed=rng).mat
        oracle = minimize_scalar(
            lambda q: en.relative_entropy(rho, np.diag([q, 1 - q])),
            bounds=(1e-12, 1 - 1e-12),
            method="bounded",
            options={"xatol": 1e-12},
        ).fun
        r_cr = max(r_cr, abs(co.c_rel_entropy(rho) - oracle))
        r_cg = max(r_cg, abs(co.c_geometric_qubit(rho) - co.c_geometric_numeric(rho)))
    viol = 0.0
    for i in range(1000):
        d = 2 + i % 3
        rank = int(rng.integers(1, d + 1))
        lhs, _ = co.complementarity_check(st.random_density((d,), rank=rank, seed=rng).mat)
        viol = max(viol, lhs - 1.0)
    eq = max(abs(co.complementarity_check(st.plus_state(d).mat)[0] - 1.0) for d in (2, 3, 4))
    assert report(
        "criterion 9",
        {"cr_vs_min": (r_cr, 1e-4), "complementarity": (viol, 1e-9), "equality_plus": (eq, 1e-9), "cg": (r_cg, 1e-5)},
    )


def test_criterion_10_dynamics(report):
    rng = np.random.default_rng(10)
    comp = max(dy.channel_preset(c, p).completeness_error() for c in dy.CHANNELS for p in np.linspace(0, 1, 21))

    rho = st.random_density((2,), seed=rng)
    out = dy.apply_channel(rho, dy.channel_preset("dephasing", 1.0), 0).mat
    off = abs(out[0, 1]) + abs(out[1, 0])

    gamma = 0.8
    model = dy.LindbladModel(np.zeros((2, 2)), [(gamma, np.array([[0, 1], [0, 0]]))])
    tr = dy.lindblad_evolve(st.computational([1], (2,)), model, 3.0, 0.01)
    pop = max(abs(s.mat[1, 1].real - np.exp(-gamma * t)) for t, s in zip(tr.times, tr.states))

    # dephasing family: the coherence of |+> decays as exp(-2 gamma t) and rotates at omega
    omega, gd, t_end = 1.3, 0.4, 2.0
    deph = dy.LindbladModel(0.5 * omega * mc.PAULI_Z, [(gd, mc.PAULI_Z)])
    exact = 0.5 * np.exp(-2 * gd * t_end) * np.exp(-1j * omega * t_end)
    errs = [abs(dy.lindblad_evolve(st.plus_state(2), deph, t_end, dt).states[-1].mat[0, 1] - exact) for dt in (0.2, 0.1, 0.05)]
    order = min(np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2]))
    drift = max(tr.max_trace_drift, dy.lindblad_evolve(st.plus_state(2), deph, t_end, 0.01).max_trace_drift)

    env = 0.0
    for _ in range(5):
        U = st.random_unitary(6, seed=rng)
        rho_e = st.random_density((3,), seed=rng)
        rho_s = st.random_density((2,), seed=rng)
        ch = dy.kraus_from_environment(U, rho_e)
        env = max(env, np.abs(dy.apply_channel(rho_s, ch).mat - dy.evolve_with_environment(rho_s, U, rho_e)).max())
    assert report(
        "criterion 10",
        {
            "completeness": (comp, 1e-12),
            "dephasing_offdiag": (off, 1e-15),
            "amplitude_damping": (pop, 1e-5),
            "trace_drift": (drift, 1e-8),
            "rk4_order_shortfall": (max(3.5 - order, 0.0), 0.0),
            "environment": (env, 1e-9),
        },
    )
