import math

import numpy as np
import pytest
import scipy.linalg
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from qadapt.qstate import (
    apply_unitary,
    basis_state,
    born_probabilities,
    check_state,
    fidelity,
    is_unitary,
    sample_outcome,
    two_level_unitary,
    xor_gate_apply,
)
from qadapt.rng import RngStream

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)


def qubit(theta, phi=0.0):
    return np.array(
        [math.cos(theta / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2)],
        dtype=np.complex128,
    )


class TestFidelity:
    def test_identical_states(self):
        assert fidelity(basis_state(2, 0), basis_state(2, 0)) == 1.0

    def test_orthogonal_states(self):
        assert fidelity(basis_state(2, 0), basis_state(2, 1)) == 0.0

    def test_half_angle(self):
        assert fidelity(basis_state(2, 0), qubit(math.pi / 2, 0.7)) == pytest.approx(0.5, abs=1e-12)

    def test_symmetric(self):
        a = qubit(1.1, 0.3)
        b = qubit(2.0, -0.9)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(basis_state(2, 0), basis_state(3, 0))


class TestBornProbabilities:
    def test_identity_frame_basis_env(self):
        probs = born_probabilities(np.eye(4, dtype=complex), basis_state(4, 0))
        assert np.allclose(probs, [1, 0, 0, 0])

    def test_qubit_angle_law(self):
        # p0 = cos^2(theta/2) for a qubit environment in the identity frame
        for theta in (0.2, 1.0, 2.5):
            probs = born_probabilities(np.eye(2, dtype=complex), qubit(theta, 0.4))
            assert probs[0] == pytest.approx(math.cos(theta / 2) ** 2, abs=1e-12)

    def test_uniform_superposition_d11(self):
        env = np.full(11, 1 / math.sqrt(11), dtype=complex)
        probs = born_probabilities(np.eye(11, dtype=complex), env)
        assert np.allclose(probs, 1 / 11, atol=1e-12)

    def test_index0_is_agent_fidelity(self):
        from qadapt.oracle import _random_frame
        from qadapt.envstates import random_qudit

        rng = RngStream(31)
        for d in (2, 3, 5, 11):
            frame = _random_frame(d, rng)
            env = random_qudit(d, rng)
            probs = born_probabilities(frame, env)
            assert probs[0] == pytest.approx(fidelity(frame[:, 0], env), abs=1e-12)

    def test_sums_to_one(self):
        probs = born_probabilities(np.eye(3, dtype=complex), np.array([0.6, 0.8j, 0.0]))
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)

    def test_aborts_on_unnormalized(self):
        with pytest.raises(ValueError):
            born_probabilities(np.eye(2, dtype=complex), np.array([1.0, 1.0], dtype=complex))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            born_probabilities(np.eye(3, dtype=complex), basis_state(2, 0))


class TestSampleOutcome:
    def test_deterministic_distributions(self):
        for seed in range(20):
            assert sample_outcome(np.array([1.0, 0.0]), RngStream(seed)) == 0
            assert sample_outcome(np.array([0.0, 1.0]), RngStream(seed)) == 1

    def test_consumes_exactly_one_draw(self):
        rng = RngStream(3)
        sample_outcome(np.array([0.3, 0.7]), rng)
        reference = RngStream(3)
        reference.uniform()
        assert rng.uniform() == reference.uniform()

    def test_fair_coin_monte_carlo(self):
        rng = RngStream(2024)
        p = np.array([0.5, 0.5])
        hits = sum(sample_outcome(p, rng) == 0 for _ in range(100_000))
        assert hits / 100_000 == pytest.approx(0.5, abs=0.005)

    def test_chi_square_against_target_law(self):
        # empirical law matches p at significance 0.001 on 1e5 draws
        p = np.array([0.1, 0.2, 0.3, 0.4])
        rng = RngStream(99)
        counts = np.zeros(4)
        n = 100_000
        for _ in range(n):
            counts[sample_outcome(p, rng)] += 1
        result = scipy.stats.chisquare(counts, f_exp=p * n)
        assert result.pvalue > 0.001


class TestTwoLevelUnitary:
    def test_zero_angles_identity(self):
        assert np.array_equal(two_level_unitary(2, 0, 1, 0.0, 0.0), np.eye(2))

    def test_pure_phase_leaves_state_fixed(self):
        u = two_level_unitary(2, 0, 1, math.pi, 0.0)
        out = apply_unitary(u, basis_state(2, 0))
        assert out[0] == pytest.approx(complex(math.cos(math.pi / 2), -math.sin(math.pi / 2)))
        assert fidelity(out, basis_state(2, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_matches_matrix_exponential_oracle(self):
        # independent route: scaling-and-squaring expm of the generators
        d, i, j, alpha, beta = 3, 0, 2, 0.7, 1.3
        sz = np.zeros((d, d), dtype=complex)
        sz[i, i], sz[j, j] = 0.5, -0.5
        sx = np.zeros((d, d), dtype=complex)
        sx[i, j] = sx[j, i] = 0.5
        expected = scipy.linalg.expm(-1j * sz * alpha) @ scipy.linalg.expm(-1j * sx * beta)
        assert np.max(np.abs(two_level_unitary(d, i, j, alpha, beta) - expected)) < 1e-10

    @given(alpha=angles, beta=angles, data=st.data())
    @settings(max_examples=150, deadline=None)
    def test_always_unitary(self, alpha, beta, data):
        d = data.draw(st.integers(2, 12))
        i = data.draw(st.integers(0, d - 1))
        j = data.draw(st.integers(0, d - 1).filter(lambda x: x != i))
        u = two_level_unitary(d, i, j, alpha, beta)
        assert np.max(np.abs(u.conj().T @ u - np.eye(d))) < 1e-10

    @given(alpha=angles, beta=angles)
    @settings(max_examples=60, deadline=None)
    def test_off_span_exactly_fixed(self, alpha, beta):
        u = two_level_unitary(5, 1, 3, alpha, beta)
        for k in (0, 2, 4):
            assert np.array_equal(apply_unitary(u, basis_state(5, k)), basis_state(5, k))

    @given(alpha=angles)
    @settings(max_examples=60, deadline=None)
    def test_beta_zero_is_phase_only(self, alpha):
        u = two_level_unitary(4, 0, 2, alpha, 0.0)
        out = apply_unitary(u, basis_state(4, 0))
        assert fidelity(out, basis_state(4, 0)) == pytest.approx(1.0, abs=1e-12)

    def test_index_validation(self):
        with pytest.raises(ValueError):
            two_level_unitary(3, 1, 1, 0.1, 0.1)
        with pytest.raises(ValueError):
            two_level_unitary(3, 0, 3, 0.1, 0.1)


class TestXorGate:
    def test_cnot_coincidence(self):
        assert xor_gate_apply(1, 1, 2) == (1, 0)

    def test_d3_example(self):
        assert xor_gate_apply(1, 0, 3) == (1, 1)

    def test_d5_modular(self):
        assert xor_gate_apply(2, 4, 5) == (2, 3)

    @pytest.mark.parametrize("d", [2, 3, 5, 7])
    def test_exhaustive_modular_table(self, d):
        for j in range(d):
            for k in range(d):
                assert xor_gate_apply(j, k, d) == (j, (j - k) % d)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    def test_self_inverse(self, d):
        # applying the gate twice restores (j, k), so the permutation is
        # involutory for every d, not just the CNOT case
        for j in range(d):
            for k in range(d):
                j2, k2 = xor_gate_apply(j, k, d)
                assert xor_gate_apply(j2, k2, d) == (j, k)

    def test_wipes_target_iff_equal(self):
        for d in (2, 3, 5):
            for j in range(d):
                for k in range(d):
                    assert (xor_gate_apply(j, k, d)[1] == 0) == (j == k)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            xor_gate_apply(2, 0, 2)


class TestApplyUnitary:
    def test_identity(self):
        s = qubit(1.2, 0.5)
        assert np.array_equal(apply_unitary(np.eye(2, dtype=complex), s), s)

    def test_full_flip(self):
        # closed form: beta = pi swaps the levels with a -i phase
        out = apply_unitary(two_level_unitary(2, 0, 1, 0.0, math.pi), basis_state(2, 0))
        assert out[1] == pytest.approx(-1j, abs=1e-15)
        assert abs(out[0]) < 1e-15

    @given(alpha=angles, beta=angles)
    @settings(max_examples=60, deadline=None)
    def test_norm_preserved(self, alpha, beta):
        u = two_level_unitary(3, 0, 2, alpha, beta)
        out = apply_unitary(u, np.array([0.6, 0.48j, 0.64], dtype=complex))
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_unitary(np.eye(3, dtype=complex), basis_state(2, 0))


def test_check_state_validation():
    check_state(qubit(0.3))
    with pytest.raises(ValueError):
        check_state(np.array([1.0, 1.0], dtype=complex))
    with pytest.raises(ValueError):
        check_state(np.array([1.0], dtype=complex))
    with pytest.raises(ValueError):
        check_state(np.array([np.nan, 0.0], dtype=complex))


def test_is_unitary():
    assert is_unitary(np.eye(3))
    assert not is_unitary(np.ones((2, 2)))
    assert not is_unitary(np.eye(3)[:, :2])
