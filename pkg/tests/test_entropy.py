import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from qcorr import entropy as en
from qcorr import matcore as mc
from qcorr import states as st

seeds = hst.integers(0, 2**32 - 1)


class TestScalarEntropies:
    def test_shannon(self):
        assert en.shannon([0.5, 0.5]) == pytest.approx(1.0)
        assert en.shannon([1.0, 0.0]) == 0.0
        assert en.shannon(np.ones(8) / 8) == pytest.approx(3.0)

    def test_binary_h(self):
        assert en.binary_h(0.5) == pytest.approx(1.0)
        assert en.binary_h(0.0) == 0.0
        assert en.binary_h(0.11) == pytest.approx(en.binary_h(0.89))

    def test_von_neumann_mixed_and_pure(self):
        assert en.von_neumann(np.eye(4) / 4) == pytest.approx(2.0)
        assert en.von_neumann(st.bell_state()) == pytest.approx(0.0, abs=1e-12)

    def test_linear_entropy(self):
        assert en.linear_entropy(np.eye(2) / 2) == pytest.approx(1.0)
        assert en.linear_entropy(st.plus_state(2)) == pytest.approx(0.0, abs=1e-14)

    def test_renyi_limits(self):
        rho = st.random_density((3,), seed=1)
        assert en.renyi(rho, 1.0 + 1e-7) == pytest.approx(en.von_neumann(rho), abs=1e-5)
        purity = np.real(np.trace(rho.mat @ rho.mat))
        assert en.renyi(rho, 2) == pytest.approx(-np.log2(purity))


class TestRelativeAndMutual:
    @given(seeds, seeds)
    @settings(max_examples=30, deadline=None)
    def test_klein_inequality(self, s1, s2):
        a = st.random_density((3,), seed=s1)
        b = st.random_density((3,), seed=s2)
        assert en.relative_entropy(a, b) >= -1e-12
        assert en.relative_entropy(a, a) == pytest.approx(0.0, abs=1e-10)

    def test_relative_entropy_support(self):
        assert en.relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == np.inf

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_subadditivity_and_araki_lieb(self, seed):
        rho = st.random_density((2, 3), seed=seed)
        sa = en.von_neumann(mc.partial_trace(rho, 0))
        sb = en.von_neumann(mc.partial_trace(rho, 1))
        sab = en.von_neumann(rho)
        assert sab <= sa + sb + 1e-12
        assert abs(sa - sb) <= sab + 1e-12
        assert en.mutual_information(rho) == pytest.approx(sa + sb - sab)

    def test_bell_mutual_information(self):
        assert en.mutual_information(st.bell_state()) == pytest.approx(2.0)
        assert en.conditional_entropy(st.bell_state()) == pytest.approx(-1.0)
