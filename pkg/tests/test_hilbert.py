import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assb.hilbert import (
    PureState,
    basis_state,
    dicke_state,
    neel_state,
    sector_basis,
    swap_sites,
    total_sz,
)


def binomial_by_product(n: int, k: int) -> int:
    # Independent of math.comb: running product n!/(k!(n-k)!).
    out = 1
    for step in range(1, k + 1):
        out = out * (n - k + step) // step
    return out


class TestSectorBasis:
    def test_two_site_single_excitation(self):
        b = sector_basis(2, 1)
        assert list(b.states) == [0b01, 0b10]
        assert b.size == 2

    def test_size_is_binomial(self):
        assert sector_basis(4, 2).size == 6

    def test_size_10_choose_5(self):
        assert sector_basis(10, 5).size == binomial_by_product(10, 5) == 252

    @given(st.integers(1, 12), st.data())
    @settings(max_examples=40, deadline=None)
    def test_index_of_inverts_enumeration(self, L, data):
        N = data.draw(st.integers(0, L))
        b = sector_basis(L, N)
        assert b.size == math.comb(L, N)
        assert np.all(np.diff(b.states) > 0)  # strictly sorted
        for k in range(b.size):
            assert b.index_of(int(b.states[k])) == k

    def test_charge(self):
        assert sector_basis(6, 4).charge == 1.0
        assert sector_basis(5, 2).charge == -0.5

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            sector_basis(4, 5)
        with pytest.raises(ValueError):
            sector_basis(4, -1)
        with pytest.raises(ValueError):
            sector_basis(25, 2)

    def test_index_of_rejects_foreign_bitstring(self):
        b = sector_basis(4, 2)
        with pytest.raises(KeyError):
            b.index_of(0b0111)


class TestReferenceStates:
    def test_neel_two_sites(self):
        s = neel_state(2)
        assert s.amps[0b01] == 1.0
        assert np.count_nonzero(s.amps) == 1

    def test_neel_four_sites(self):
        s = neel_state(4)
        assert np.flatnonzero(s.amps).tolist() == [0b0101]

    def test_neel_rejects_odd(self):
        with pytest.raises(ValueError):
            neel_state(3)

    def test_dicke_two_site(self):
        s = dicke_state(2, 1)
        np.testing.assert_allclose(s.amps, [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0], atol=1e-15)

    def test_dicke_extremal_sector(self):
        s = dicke_state(2, 2)
        assert s.amps[0b11] == 1.0

    def test_dicke_uniform_weights(self):
        s = dicke_state(4, 2)
        nz = np.flatnonzero(s.amps)
        assert nz.size == 6
        np.testing.assert_allclose(s.amps[nz], 1 / np.sqrt(6), atol=1e-15)

    def test_dicke_rejects_bad_filling(self):
        with pytest.raises(ValueError):
            dicke_state(4, 5)

    @pytest.mark.parametrize("L,N", [(2, 1), (4, 2), (6, 3), (8, 5)])
    def test_dicke_is_swap_symmetric(self, L, N):
        s = dicke_state(L, N)
        idx = np.arange(s.dim)
        for i in range(1, L + 1):
            for j in range(i + 1, L + 1):
                perm = np.array([swap_sites(int(t), i, j) for t in idx])
                np.testing.assert_allclose(s.amps[perm], s.amps, atol=1e-15)

    def test_dicke_sector_representation(self):
        b = sector_basis(4, 2)
        s = dicke_state(4, 2, basis=b)
        assert s.basis is b
        np.testing.assert_allclose(s.amps, 1 / np.sqrt(6))
        np.testing.assert_allclose(s.to_full().amps, dicke_state(4, 2).amps)

    def test_basis_state_string(self):
        s = basis_state(4, "1010")
        assert np.flatnonzero(s.amps).tolist() == [0b0101]
        with pytest.raises(ValueError):
            basis_state(4, "10")
        with pytest.raises(ValueError):
            basis_state(2, 4)


class TestTotalSz:
    def test_neel_is_half_filled(self):
        assert total_sz(neel_state(4)) == pytest.approx(0.0, abs=1e-14)

    def test_all_up(self):
        assert total_sz(basis_state(2, "11")) == pytest.approx(1.0)

    def test_dicke_fixed_weight(self):
        assert total_sz(dicke_state(4, 3)) == pytest.approx(1.0, abs=1e-13)

    @given(st.integers(2, 8), st.data())
    @settings(max_examples=25, deadline=None)
    def test_dicke_charge_exact(self, L, data):
        N = data.draw(st.integers(0, L))
        assert total_sz(dicke_state(L, N)) == pytest.approx(N - L / 2, abs=1e-12)


class TestPureState:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            PureState(2, np.ones(3))

    def test_sector_shape_validation(self):
        b = sector_basis(4, 2)
        with pytest.raises(ValueError):
            PureState(4, np.ones(5), basis=b)
        with pytest.raises(ValueError):
            PureState(3, np.ones(6), basis=b)

    def test_normalized(self):
        s = PureState(1, np.array([3.0, 4.0]))
        assert s.normalized().norm() == pytest.approx(1.0)
        with pytest.raises(ValueError):
            PureState(1, np.zeros(2)).normalized()

    def test_overlap_rejects_mixed_bases(self):
        full = dicke_state(4, 2)
        restricted = dicke_state(4, 2, basis=sector_basis(4, 2))
        with pytest.raises(ValueError):
            full.overlap(restricted)
        assert restricted.overlap(restricted) == pytest.approx(1.0)
        assert full.fidelity(restricted.to_full()) == pytest.approx(1.0)
