import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from qcorr import discord as dc
from qcorr import dynamics as dy
from qcorr import entanglement as et
from qcorr import matcore as mc
from qcorr import states as st
from qcorr import uncertainty as un
from qcorr.errors import DimMismatch, InvalidParams, NonUnitary, StepUnstable

seeds = hst.integers(0, 2**32 - 1)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1| with |1> excited
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def is_valid(rho, tol=1e-9):
    m = rho.mat if hasattr(rho, "mat") else rho
    return abs(np.trace(m) - 1) < 1e-10 and np.linalg.eigvalsh(mc.hermitize(m)).min() > -tol


class TestChannels:
    @pytest.mark.parametrize("name", dy.CHANNELS)
    @pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
    def test_completeness(self, name, p):
        assert dy.channel_preset(name, p).completeness_error() < 1e-12

    def test_rejects_bad_parameter(self):
        with pytest.raises(InvalidParams):
            dy.channel_preset("dephasing", 1.5)
        with pytest.raises(InvalidParams):
            dy.channel_preset("bogus", 0.1)

    def test_dephasing_endpoints(self):
        rho = st.random_density((2,), seed=1)
        np.testing.assert_allclose(dy.apply_channel(rho, dy.channel_preset("dephasing", 0.0)).mat, rho.mat, atol=1e-15)
        out = dy.apply_channel(st.plus_state(2), dy.channel_preset("dephasing", 1.0)).mat
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-15)

    @given(seeds, hst.floats(0, 1))
    @settings(max_examples=30, deadline=None)
    def test_depolarizing_identity(self, seed, p):
        rho = st.random_density((2,), seed=seed).mat
        out = dy.apply_channel(rho, dy.channel_preset("depolarizing", p)).mat
        np.testing.assert_allclose(out, (1 - p) * rho + p * np.eye(2) / 2, atol=1e-12)

    @pytest.mark.parametrize("p", [0.1, 0.25, 0.6])
    def test_phase_flip_on_bell_diagonal(self, p):
        c = np.array([-0.55, -0.5, -0.1])
        out = dy.apply_channel(st.preset("bell_diagonal", *c), dy.channel_preset("phase_flip", p), [0, 1])
        f = (1 - 2 * p) ** 2
        expected = st.BellDiagonalParams(f * c[0], f * c[1], c[2]).matrix()
        np.testing.assert_allclose(out.mat, expected, atol=1e-12)

    @given(seeds, hst.sampled_from(dy.CHANNELS), hst.floats(0, 1), hst.integers(0, 1))
    @settings(max_examples=40, deadline=None)
    def test_cptp_on_random_states(self, seed, name, p, target):
        out = dy.apply_channel(st.random_density((2, 3) if target == 0 else (3, 2), seed=seed),
                               dy.channel_preset(name, p), target)
        assert is_valid(out)

    @given(seeds, hst.floats(0, 1), hst.floats(0, 1))
    @settings(max_examples=30, deadline=None)
    def test_composition(self, seed, p, q):
        rho = st.random_density((2,), seed=seed)
        a = dy.channel_preset("amplitude_damping", p)
        b = dy.channel_preset("depolarizing", q)
        twice = dy.apply_channel(dy.apply_channel(rho, a), b).mat
        np.testing.assert_allclose(dy.apply_channel(rho, a.compose(b)).mat, twice, atol=1e-10)

    def test_dim_mismatch(self):
        ch = dy.channel_preset("dephasing", 0.2)
        with pytest.raises(DimMismatch):
            dy.apply_channel(st.random_density((3, 2), seed=0), ch, 0)
        with pytest.raises(DimMismatch):
            dy.apply_channel(st.random_density((2, 2), seed=0), ch)
        with pytest.raises(DimMismatch):
            dy.apply_channel(st.random_density((2, 2), seed=0), ch, 2)


class TestEnvironment:
    def test_product_unitary_is_closed_evolution(self):
        rng = np.random.default_rng(3)
        Us, Ue = st.random_unitary(2, rng), st.random_unitary(3, rng)
        ch = dy.kraus_from_environment(np.kron(Us, Ue), st.random_density((3,), seed=rng).mat)
        rho = st.random_density((2,), seed=rng)
        np.testing.assert_allclose(dy.apply_channel(rho, ch).mat, Us @ rho.mat @ Us.conj().T, atol=1e-12)

    def test_cnot_dephases_control(self):
        ch = dy.kraus_from_environment(CNOT, np.diag([1.0, 0.0]))
        out = dy.apply_channel(st.plus_state(2), ch).mat
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-15)

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_matches_partial_trace(self, seed):
        rng = np.random.default_rng(seed)
        U = st.random_unitary(6, rng)
        rho_e = st.random_density((3,), seed=rng).mat
        rho_s = st.random_density((2,), seed=rng).mat
        ch = dy.kraus_from_environment(U, rho_e)
        assert ch.completeness_error() < 1e-9
        np.testing.assert_allclose(dy.apply_channel(rho_s, ch).mat, dy.evolve_with_environment(rho_s, U, rho_e), atol=1e-9)

    def test_non_unitary(self):
        with pytest.raises(NonUnitary):
            dy.kraus_from_environment(2 * np.eye(4), np.diag([1.0, 0.0]))


class TestLindblad:
    def test_static(self):
        rho = st.random_density((2,), seed=1)
        tr = dy.lindblad_evolve(rho, dy.LindbladModel(np.zeros((2, 2))), 1.0, 0.1)
        for s in tr.states:
            np.testing.assert_allclose(s.mat, rho.mat, atol=1e-15)
        assert tr.times[-1] == pytest.approx(1.0)

    @pytest.mark.parametrize("gamma", [0.3, 1.0])
    def test_amplitude_damping(self, gamma):
        model = dy.LindbladModel(np.zeros((2, 2)), [(gamma, SIGMA_MINUS)])
        tr = dy.lindblad_evolve(np.diag([0.0, 1.0]), model, 3.0, 0.01)
        pops = np.array([s.mat[1, 1].real for s in tr.states])
        np.testing.assert_allclose(pops, np.exp(-gamma * tr.times), atol=1e-5)
        assert tr.max_trace_drift <= 1e-8
        assert tr.min_eigenvalue >= -1e-7

    def test_pure_dephasing(self):
        gamma = 0.4
        model = dy.LindbladModel(np.zeros((2, 2)), [(gamma, mc.PAULI_Z)])
        tr = dy.lindblad_evolve(st.plus_state(2), model, 2.0, 0.01)
        off = np.array([abs(s.mat[0, 1]) for s in tr.states])
        np.testing.assert_allclose(off, 0.5 * np.exp(-2 * gamma * tr.times), atol=1e-5)

    @given(seeds)
    @settings(max_examples=15, deadline=None)
    def test_unitary_limit(self, seed):
        rng = np.random.default_rng(seed)
        H = mc.hermitize(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        rho = st.random_density((3,), seed=rng).mat
        tr = dy.lindblad_evolve(rho, dy.LindbladModel(H), 1.0, 0.01)
        U = mc.expm(-1j * H)
        np.testing.assert_allclose(tr.states[-1].mat, U @ rho @ U.conj().T, atol=1e-7)

    def test_fourth_order_convergence(self):
        H = 0.9 * mc.PAULI_X + 0.4 * mc.PAULI_Z
        rho = st.plus_state(2).mat
        U = mc.expm(-2j * H)
        exact = U @ rho @ U.conj().T
        err = [np.abs(dy.lindblad_evolve(rho, dy.LindbladModel(H), 2.0, dt).states[-1].mat - exact).max()
               for dt in (0.2, 0.1, 0.05)]
        orders = np.log2(np.array(err[:-1]) / np.array(err[1:]))
        assert orders.min() >= 3.5

    def test_short_last_step(self):
        tr = dy.lindblad_evolve(np.eye(2) / 2, dy.LindbladModel(np.zeros((2, 2))), 0.25, 0.1)
        np.testing.assert_allclose(tr.times, [0.0, 0.1, 0.2, 0.25])

    def test_unstable_step(self):
        # the generator is traceless, so drift only appears through round-off once RK4 blows up
        model = dy.LindbladModel(np.zeros((2, 2)), [(50.0, SIGMA_MINUS)])
        with pytest.raises(StepUnstable, match="trace drift"):
            dy.lindblad_evolve(np.diag([0.0, 1.0]), model, 5.0, 0.5)

    def test_eig_floor(self):
        # trace is conserved exactly here, so only the eigenvalue floor can flag the blow-up
        model = dy.LindbladModel(np.zeros((2, 2)), [(20.0, mc.PAULI_Z)])
        tr = dy.lindblad_evolve(st.plus_state(2), model, 1.0, 0.25)
        assert tr.min_eigenvalue < -1e-7
        with pytest.raises(StepUnstable):
            dy.lindblad_evolve(st.plus_state(2), model, 1.0, 0.25, eig_floor=1e-7)

    def test_invalid_inputs(self):
        with pytest.raises(InvalidParams):
            dy.LindbladModel(np.array([[0, 1], [0, 0]]))
        with pytest.raises(InvalidParams):
            dy.LindbladModel(np.zeros((2, 2)), [(-1.0, SIGMA_MINUS)])
        with pytest.raises(InvalidParams):
            dy.lindblad_evolve(np.eye(2) / 2, dy.LindbladModel(np.zeros((2, 2))), 1.0, 0.0)


class TestSweep:
    MEASURES = {
        "concurrence": et.concurrence_2q,
        "lqu": lambda r: un.lqu_2xd(r)[0],
        "trace_discord": lambda r: dc.trace_discord_x(r.mat),
    }

    def test_bell_dephasing_monotone(self):
        grid = np.linspace(0, 1, 21)
        tab = dy.sweep(st.bell_state(), dy.ChannelProcess("dephasing"), self.MEASURES, grid, "p")
        assert not tab.errors
        for name, col in tab.columns.items():
            assert col.size == grid.size
            assert np.all(np.diff(col) <= 1e-12), name
            assert col[0] == pytest.approx(1.0)

    def test_first_row_is_initial_state(self):
        rho = st.random_density((2, 2), seed=4)
        tab = dy.sweep(rho, dy.ChannelProcess("depolarizing"), {"c": et.concurrence_2q}, [0.0, 0.5])
        assert tab.columns["c"][0] == pytest.approx(et.concurrence_2q(rho))

    def test_local_hamiltonian_preserves_lqu(self):
        H = np.kron(mc.PAULI_Z, mc.PAULI_I) + 0.7 * np.kron(mc.PAULI_I, mc.PAULI_X)
        proc = dy.LindbladProcess(dy.LindbladModel(H), dt=0.01)
        tab = dy.sweep(st.random_density((2, 2), seed=5), proc, {"lqu": self.MEASURES["lqu"]}, np.linspace(0, 2, 9), "t")
        col = tab.columns["lqu"]
        assert np.ptp(col) < 1e-6

    def test_trajectory_reuse_matches_restart(self):
        model = dy.LindbladModel(mc.PAULI_X, [(0.3, SIGMA_MINUS)])
        proc = dy.LindbladProcess(model, dt=0.01)
        rho = st.random_density((2,), seed=6)
        tab = dy.sweep(rho, proc, {"p1": dy.population(1)}, [0.0, 0.5, 1.0], "t")
        assert tab.columns["p1"][2] == pytest.approx(proc.at(rho, 1.0).mat[1, 1].real, abs=1e-12)

    def test_errors_become_nan(self):
        def bad(_):
            raise ArithmeticError("boom")

        tab = dy.sweep(st.bell_state(), dy.ChannelProcess("dephasing"), {"bad": bad}, [0.0, 0.5])
        assert np.all(np.isnan(tab.columns["bad"]))
        assert len(tab.errors["bad"]) == 2
        assert tab.to_csv().splitlines()[1] == "0,nan"

    def test_csv_format(self):
        tab = dy.sweep(st.bell_state(), dy.ChannelProcess("dephasing"), {"concurrence": et.concurrence_2q}, [0.0, 1 / 3], "p")
        lines = tab.to_csv().splitlines()
        assert lines[0] == "p,concurrence"
        assert lines[1] == "0,1"
        assert lines[2].split(",")[0] == "0.333333333333"
        assert tab.to_csv() == tab.to_csv()

    def test_no_measures(self):
        with pytest.raises(InvalidParams):
            dy.sweep(st.bell_state(), dy.ChannelProcess("dephasing"), {}, [0.0])
