import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from assb.analytic import (
    asymptotic_entropy,
    entanglement_spectrum,
    exact_entropy,
    projected_channel_matrix,
    steady_chi,
    steady_zz,
    stirling_sandwich,
)
from assb.channel import build_superoperator
from assb.hilbert import dicke_state, sector_basis
from assb.trajectory import ModelParams, half_chain_entropy


def exact_pk(L, N, A, K):
    # integer-arithmetic oracle
    return math.comb(A, K) * math.comb(L - A, N - K) / math.comb(L, N)


class TestSteadyValues:
    def test_chi_values(self):
        assert steady_chi(2) == pytest.approx(1.0)
        assert steady_chi(4) == pytest.approx(1.5)
        assert steady_chi(100) == pytest.approx(25.5)
        with pytest.raises(ValueError):
            steady_chi(0)

    def test_zz_values(self):
        assert steady_zz(4, 0) == pytest.approx(-1 / 12)
        assert steady_zz(10, 0) == pytest.approx(-1 / 36)
        for L in (2, 5, 8):
            assert steady_zz(L, L / 2) == pytest.approx(0.25)
        with pytest.raises(ValueError):
            steady_zz(1, 0)
        with pytest.raises(ValueError):
            steady_zz(4, 3)


class TestEntanglementSpectrum:
    def test_half_filled_four_sites(self):
        spec = entanglement_spectrum(4, 2, 2)
        np.testing.assert_allclose(spec.probabilities, [1 / 6, 2 / 3, 1 / 6], atol=1e-14)

    def test_empty_sector(self):
        spec = entanglement_spectrum(4, 0, 2)
        np.testing.assert_allclose(spec.probabilities, [1.0])

    def test_two_sites(self):
        spec = entanglement_spectrum(2, 1, 1)
        np.testing.assert_allclose(spec.probabilities, [0.5, 0.5])

    def test_matches_integer_oracle(self):
        for (L, N, A) in ((10, 4, 3), (12, 6, 5), (9, 2, 4)):
            spec = entanglement_spectrum(L, N, A)
            for K, p in enumerate(spec.probabilities):
                want = exact_pk(L, N, A, K) if N - K <= L - A else 0.0
                assert p == pytest.approx(want, abs=1e-13)

    @given(st.integers(2, 200), st.data())
    @settings(max_examples=60, deadline=None)
    def test_normalization(self, L, data):
        N = data.draw(st.integers(0, L))
        A = data.draw(st.integers(1, L - 1))
        spec = entanglement_spectrum(L, N, A)
        assert spec.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(spec.probabilities >= 0)

    def test_symmetry_under_A_N_exchange(self):
        a = entanglement_spectrum(12, 4, 6).probabilities
        b = entanglement_spectrum(12, 6, 4).probabilities
        np.testing.assert_allclose(a, b, atol=1e-13)

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            entanglement_spectrum(4, 5, 2)
        with pytest.raises(ValueError):
            entanglement_spectrum(4, 2, 4)


class TestExactEntropy:
    def test_half_filled_four_sites(self):
        p = np.array([1 / 6, 2 / 3, 1 / 6])
        assert exact_entropy(4, 2, 2) == pytest.approx(float(-np.sum(p * np.log(p))), abs=1e-13)

    def test_polarized_is_product(self):
        assert exact_entropy(6, 6, 3) == pytest.approx(0.0, abs=1e-13)

    @pytest.mark.parametrize("L,N", [(4, 2), (6, 3), (8, 4), (10, 5), (12, 6), (11, 4)])
    def test_matches_schmidt_oracle(self, L, N):
        got = exact_entropy(L, N, L // 2)
        # independent route: Schmidt decomposition of the actual statevector
        state = dicke_state(L, N)
        m = state.amps.reshape(1 << (L - L // 2), 1 << (L // 2))
        p = np.linalg.svd(m, compute_uv=False) ** 2
        p = p[p > 1e-15]
        want = float(-np.sum(p * np.log(p)))
        assert got == pytest.approx(want, abs=1e-10)

    def test_symmetries(self):
        assert exact_entropy(10, 3, 4) == pytest.approx(exact_entropy(10, 7, 4), abs=1e-12)
        assert exact_entropy(10, 3, 4) == pytest.approx(exact_entropy(10, 3, 6), abs=1e-12)

    def test_fixed_charge_entropy_stays_bounded(self):
        # area-law behaviour when N is held fixed while L grows
        values = [exact_entropy(L, 4, L // 2) for L in (100, 1000, 10_000)]
        assert values[0] < values[1] < values[2] < 4.0
        assert values[2] - values[1] < values[1] - values[0]


class TestAsymptoticEntropy:
    def test_reference_value(self):
        want = 0.5 * np.log(256) + 0.5 * (np.log(np.pi / 8) + 1)
        got = asymptotic_entropy(256, 0.5, 0.5)
        assert got == pytest.approx(want, abs=1e-14)
        assert got == pytest.approx(2.805, abs=1e-3)

    def test_partition_symmetry(self):
        assert asymptotic_entropy(128, 0.3, 0.4) == pytest.approx(
            asymptotic_entropy(128, 0.7, 0.4), abs=1e-14
        )

    def test_convergence_to_exact(self):
        diffs = [
            abs(exact_entropy(L, L // 2, L // 2) - asymptotic_entropy(L, 0.5, 0.5))
            for L in (64, 256, 1024, 4096)
        ]
        assert all(d1 > d2 for d1, d2 in zip(diffs, diffs[1:]))
        assert diffs[-1] < 0.01

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            asymptotic_entropy(64, 0.0, 0.5)
        with pytest.raises(ValueError):
            asymptotic_entropy(64, 0.5, 1.0)


class TestStirlingSandwich:
    def test_brackets_exact_value(self):
        lo, hi = stirling_sandwich(40, 20, 20, 10)
        want = exact_pk(40, 20, 20, 10)
        assert lo < want < hi

    def test_interior_sweep(self):
        L, N, A = 100, 50, 50
        for K in range(1, 50):
            if min(K, A - K, N - K, (L - A) - N + K) < 1:
                continue
            lo, hi = stirling_sandwich(L, N, A, K)
            want = exact_pk(L, N, A, K)
            assert lo < want < hi

    def test_relative_width_shrinks(self):
        widths = []
        for L in (40, 80, 160, 320):
            K = L // 4  # K = a*n*L at a = n = 1/2
            lo, hi = stirling_sandwich(L, L // 2, L // 2, K)
            widths.append((hi - lo) / exact_pk(L, L // 2, L // 2, K))
        assert all(w1 > w2 for w1, w2 in zip(widths, widths[1:]))

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            stirling_sandwich(40, 20, 20, 0)
        with pytest.raises(ValueError):
            stirling_sandwich(40, 20, 20, 20)


class TestProjectedChannel:
    def test_full_dephasing_is_identity(self):
        m = projected_channel_matrix(4, 1.0).toarray()
        np.testing.assert_allclose(m, np.eye(16), atol=1e-15)

    def test_uniform_weight_vectors_are_fixed(self):
        L = 5
        for p_z in (0.0, 0.3, 0.7):
            m = projected_channel_matrix(L, p_z)
            for N in (0, 2, 5):
                v = np.zeros(1 << L, dtype=complex)
                v[sector_basis(L, N).states] = 1.0
                np.testing.assert_allclose(m @ v, v, atol=1e-13)

    def test_left_action_of_full_channel_on_diagonal_rows(self):
        # acting on <<b,b| the dephased dynamics reduces to this matrix
        L = 4
        d = 1 << L
        for p_z in (0.05, 0.3):
            S = build_superoperator(ModelParams(L, p_s=1 - p_z, p_z=p_z))
            proj = projected_channel_matrix(L, p_z).toarray()
            for b in range(d):
                row = np.asarray(S.matrix[b * d + b].todense()).ravel()
                expected = np.zeros(d * d, dtype=complex)
                expected[np.arange(d) * d + np.arange(d)] = proj[b]
                np.testing.assert_allclose(row, expected, atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            projected_channel_matrix(1, 0.5)
        with pytest.raises(ValueError):
            projected_channel_matrix(4, 1.5)


class TestConsistencyWithSimulators:
    def test_exact_entropy_equals_state_entropy(self):
        for L in (4, 6, 8, 10, 12):
            got = half_chain_entropy(dicke_state(L, L // 2))
            assert got == pytest.approx(exact_entropy(L, L // 2, L // 2), abs=1e-10)
