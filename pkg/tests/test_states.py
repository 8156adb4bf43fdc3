import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from qcorr import matcore as mc
from qcorr import states as st
from qcorr.errors import DimMismatch, InvalidParams, InvalidState

seeds = hst.integers(0, 2**32 - 1)


class TestValidation:
    def test_valid_state(self):
        out = st.validate(np.eye(4) / 4, (2, 2))
        assert isinstance(out, st.DensityMatrix)

    def test_diagnostics_name_the_violation(self):
        bad = np.diag([1.2, -0.2])
        out = st.validate(bad)
        assert not out.ok
        assert "negative eigenvalue" in str(out)

    def test_trace_violation(self):
        out = st.validate(np.eye(2))
        assert "trace" in str(out)

    def test_ensure_state_raises(self):
        with pytest.raises(InvalidState):
            st.ensure_state(np.array([[0.5, 1.0], [0.0, 0.5]]))

    def test_dims_mismatch_reported(self):
        assert not st.validate(np.eye(4) / 4, (2, 3)).ok


class TestPresets:
    @pytest.mark.parametrize("name", ["bell_phi_plus", "bell_phi_minus", "bell_psi_plus", "bell_psi_minus"])
    def test_bell_states_are_pure(self, name):
        rho = st.preset(name)
        assert rho.purity() == pytest.approx(1.0)
        np.testing.assert_allclose(mc.partial_trace(rho, 0).mat, np.eye(2) / 2, atol=1e-15)

    def test_bell_diagonal_rejects_invalid(self):
        with pytest.raises(InvalidParams):
            st.preset("bell_diagonal", 0.8, 0.5, 0.2)

    def test_bell_diagonal_correlation_matrix(self):
        c = (-0.55, -0.5, -0.1)
        bt = st.bloch_decompose(st.preset("bell_diagonal", *c))
        np.testing.assert_allclose(bt.T, np.diag(c), atol=1e-14)
        np.testing.assert_allclose(bt.x, 0, atol=1e-15)
        np.testing.assert_allclose(bt.y, 0, atol=1e-15)

    def test_x_family_marginals(self):
        for x in (0.0, 0.7, 2.0):
            rho = st.preset("x_state", x)
            np.testing.assert_allclose(mc.partial_trace(rho, 0).mat, np.eye(2) / 2, atol=1e-15)
        with pytest.raises(InvalidParams):
            st.preset("x_state", 2.5)

    def test_horodecki_endpoints(self):
        np.testing.assert_allclose(st.horodecki(1.0).mat, st.bell_state("bell_psi_plus").mat, atol=1e-15)
        assert st.horodecki(0.0).mat[0, 0] == pytest.approx(1.0)

    def test_ghz_and_w(self):
        g = st.ghz_ket(3).amplitudes
        assert abs(g[0]) ** 2 == pytest.approx(0.5)
        assert abs(g[-1]) ** 2 == pytest.approx(0.5)
        w = st.w_ket(3).amplitudes
        np.testing.assert_allclose(np.abs(w[[1, 2, 4]]) ** 2, 1 / 3)

    def test_computational_flat_form(self):
        rho = st.preset("computational", 3, 2, 2)
        assert rho.dims == (2, 2)
        assert rho.mat[3, 3] == 1

    def test_unknown_preset(self):
        with pytest.raises(InvalidParams):
            st.preset("nope")


class TestParametrisations:
    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_x_state_roundtrip(self, seed):
        x = st.random_x_params(seed)
        y = st.XStateParams.from_matrix(x.density().mat)
        np.testing.assert_allclose(y.matrix(), x.matrix(), atol=1e-15)
        assert not x.violations()

    def test_x_from_matrix_rejects_non_x(self):
        with pytest.raises(InvalidParams):
            st.XStateParams.from_matrix(st.random_density((2, 2), seed=1).mat)

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_bloch_reconstruction(self, seed):
        rho = st.random_density((2, 2), seed=seed)
        np.testing.assert_allclose(st.bloch_decompose(rho).matrix(), rho.mat, atol=1e-14)

    @pytest.mark.parametrize("dims", [(2, 2), (3, 2), (4, 2)])
    def test_fano_bloch_reconstruction(self, dims):
        rho = st.random_density(dims, seed=11)
        fb = st.fano_bloch(rho)
        np.testing.assert_allclose(fb.matrix(), rho.mat, atol=1e-13)

    def test_fano_bloch_needs_qubit_second_factor(self):
        with pytest.raises(DimMismatch):
            st.fano_bloch(st.random_density((3, 3), seed=1))

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_su_generators_orthonormal(self, d):
        gens = st.su_generators(d)
        assert len(gens) == d * d - 1
        gram = np.array([[np.trace(a @ b) for b in gens] for a in gens])
        np.testing.assert_allclose(gram, 2 * np.eye(len(gens)), atol=1e-14)
        for g in gens:
            assert abs(np.trace(g)) < 1e-14
            assert mc.is_hermitian(g)

    def test_bell_diagonal_eigenvalues(self):
        p = st.BellDiagonalParams(-0.55, -0.5, -0.1)
        np.testing.assert_allclose(np.sort(p.eigenvalues()), np.sort(np.linalg.eigvalsh(p.matrix())), atol=1e-14)


class TestSchmidtAndPurification:
    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_schmidt_reconstructs(self, seed):
        psi = st.random_pure((2, 3), seed)
        w, u, v = st.schmidt(psi)
        assert w.sum() == pytest.approx(1.0)
        rebuilt = sum(np.sqrt(w[k]) * np.kron(u[:, k], v[:, k]) for k in range(w.size))
        np.testing.assert_allclose(rebuilt, psi.amplitudes, atol=1e-13)

    def test_purify_traces_back(self):
        rho = st.random_density((2, 2), rank=3, seed=3)
        psi = st.purify(rho)
        assert psi.dims == (2, 2, 3)
        np.testing.assert_allclose(mc.partial_trace(psi.density(), [0, 1]).mat, rho.mat, atol=1e-13)


class TestRandomAndJson:
    def test_random_density_reproducible(self):
        a = st.random_density((2, 3), seed=5).mat
        b = st.random_density((2, 3), seed=5).mat
        np.testing.assert_array_equal(a, b)
        assert isinstance(st.validate(a, (2, 3)), st.DensityMatrix)

    def test_random_unitary(self):
        U = st.random_unitary(4, seed=0)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-13)

    def test_json_roundtrip(self):
        rho = st.random_density((2, 3), seed=9)
        back = st.state_from_json(json.dumps(st.state_to_json(rho)))
        assert back.dims == (2, 3)
        np.testing.assert_allclose(back.mat, rho.mat, atol=1e-15)

    def test_json_preset(self):
        rho = st.state_from_json({"preset": "horodecki", "params": {"p": 0.3}})
        np.testing.assert_allclose(rho.mat, st.horodecki(0.3).mat)

    def test_json_malformed(self):
        with pytest.raises(InvalidState):
            st.state_from_json("{not json")
        with pytest.raises(InvalidState):
            st.state_from_json({"re": [[1]]})
