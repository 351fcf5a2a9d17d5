import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinpressure.errors import ReducibleMatrixError
from spinpressure.sft import (MarkovMeasure, OptimizeOptions, SftModel,
                              allowed_words, classical_pressure,
                              cyclicity_index, diagonal_bridge, full_shift,
                              gibbs_markov_measure, golden_mean_shift,
                              higher_block_recode, ising_sft, markov_energy,
                              markov_entropy, rpf_eigendata,
                              stationary_distribution, transfer_matrix,
                              variational_optimize, word_log_sum)

PHI = (1 + np.sqrt(5)) / 2


def random_irreducible(rng, s, density=0.6):
    while True:
        A = (rng.random((s, s)) < density).astype(int)
        try:
            m = SftModel(A, np.zeros((s, s)))
        except ValueError:
            continue
        if m.irreducible:
            return A


class TestModel:
    def test_rejects_bad_transition(self):
        with pytest.raises(ValueError):
            SftModel(np.array([[1, 2], [1, 1]]), np.zeros((2, 2)))

    def test_rejects_zero_row(self):
        with pytest.raises(ValueError):
            SftModel(np.array([[0, 0], [1, 1]]), np.zeros((2, 2)))

    def test_reducible_flagged(self):
        m = SftModel(np.array([[1, 1], [0, 1]]), np.zeros((2, 2)))
        assert not m.irreducible
        with pytest.raises(ReducibleMatrixError):
            classical_pressure(m, 1.0)

    def test_golden_mean_irreducible(self):
        assert golden_mean_shift().irreducible


class TestTransferMatrix:
    def test_zero_potential_is_transition(self):
        m = golden_mean_shift()
        assert np.array_equal(transfer_matrix(m, 1.0), m.transition)

    def test_ising_entries(self):
        J, beta = 0.7, 1.3
        L = transfer_matrix(ising_sft(J), beta)
        want = np.array([[np.exp(beta * J), np.exp(-beta * J)],
                         [np.exp(-beta * J), np.exp(beta * J)]])
        assert np.allclose(L, want)


class TestRpf:
    def test_golden_mean_eigenvalue(self):
        rpf = rpf_eigendata(golden_mean_shift().transition.astype(float))
        assert rpf.eigenvalue == pytest.approx(PHI, abs=1e-12)
        # right eigenvector proportional to (phi, 1)
        assert rpf.right[0] / rpf.right[1] == pytest.approx(PHI, abs=1e-10)

    def test_eigen_equations(self, rng):
        L = np.exp(rng.normal(size=(4, 4)))
        rpf = rpf_eigendata(L)
        assert np.max(np.abs(L @ rpf.right - rpf.eigenvalue * rpf.right)) < 1e-10
        assert np.max(np.abs(rpf.left @ L - rpf.eigenvalue * rpf.left)) < 1e-10
        assert rpf.left @ rpf.right == pytest.approx(1.0, abs=1e-12)

    def test_matches_numpy_eig(self, rng):
        L = np.exp(rng.normal(size=(5, 5)))
        rpf = rpf_eigendata(L)
        lam = np.max(np.linalg.eigvals(L).real)
        assert rpf.eigenvalue == pytest.approx(lam, abs=1e-10)

    def test_periodic_matrix_converges(self):
        # 2-cycle: plain power iteration oscillates, the averaged one stops
        L = np.array([[0.0, 2.0], [3.0, 0.0]])
        rpf = rpf_eigendata(L)
        assert rpf.eigenvalue == pytest.approx(np.sqrt(6), abs=1e-10)

    def test_reducible_rejected(self):
        with pytest.raises(ReducibleMatrixError):
            rpf_eigendata(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestClassicalPressure:
    def test_full_shift_entropy(self):
        for s in (2, 3, 5):
            assert classical_pressure(full_shift(s), 1.0) \
                == pytest.approx(np.log(s), abs=1e-12)

    def test_golden_mean_log_phi(self):
        assert classical_pressure(golden_mean_shift(), 1.0) \
            == pytest.approx(np.log(PHI), abs=1e-12)

    def test_ising_closed_form(self):
        for J in (0.5, 1.0, 2.0):
            for beta in (0.5, 1.0):
                got = classical_pressure(ising_sft(J), beta)
                assert got == pytest.approx(np.log(2 * np.cosh(beta * J)),
                                            abs=1e-12)

    def test_constant_shift(self, rng):
        A = random_irreducible(rng, 3)
        phi = rng.normal(size=(3, 3))
        c = 0.8
        p1 = classical_pressure(SftModel(A, phi), 1.0)
        p2 = classical_pressure(SftModel(A, phi + c), 1.0)
        assert p2 == pytest.approx(p1 - c, abs=1e-11)

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2))
    def test_coboundary_invariance(self, g):
        # phi(ij) + g(j) - g(i) has the same pressure as phi
        sft = ising_sft(1.0)
        g = np.array(g)
        phi2 = sft.potential + g[np.newaxis, :] - g[:, np.newaxis]
        p1 = classical_pressure(sft, 1.0)
        p2 = classical_pressure(SftModel(sft.transition, phi2), 1.0)
        assert p2 == pytest.approx(p1, abs=1e-10)


class TestCyclicity:
    def test_full_shift(self):
        assert cyclicity_index(np.ones((3, 3))) == 1

    def test_two_cycle(self):
        assert cyclicity_index(np.array([[0, 1], [1, 0]])) == 2

    def test_golden_mean(self):
        assert cyclicity_index(golden_mean_shift().transition) == 1

    def test_three_cycle(self):
        A = np.roll(np.eye(3, dtype=int), 1, axis=1)
        assert cyclicity_index(A) == 3


class TestMarkovMeasures:
    def test_parry_kernel_golden_mean(self):
        mu = gibbs_markov_measure(golden_mean_shift(), 1.0)
        want = np.array([[1 / PHI, 1 / PHI ** 2], [1.0, 0.0]])
        assert np.allclose(mu.kernel, want, atol=1e-10)

    def test_parry_entropy_is_pressure(self):
        for sft in (golden_mean_shift(), full_shift(3)):
            mu = gibbs_markov_measure(sft, 1.0)
            assert markov_entropy(mu) == pytest.approx(
                classical_pressure(sft, 1.0), abs=1e-10)

    def test_gibbs_chain_attains_pressure(self, rng):
        A = random_irreducible(rng, 4)
        phi = rng.normal(size=(4, 4))
        sft = SftModel(A, phi)
        beta = 1.3
        mu = gibbs_markov_measure(sft, beta)
        val = markov_entropy(mu) - beta * markov_energy(mu, phi)
        assert val == pytest.approx(classical_pressure(sft, beta), abs=1e-10)

    def test_stationary_distribution(self, rng):
        P = rng.random((5, 5)) + 0.01
        P /= P.sum(axis=1, keepdims=True)
        pi = stationary_distribution(P)
        assert np.max(np.abs(pi @ P - pi)) < 1e-12
        assert pi.sum() == pytest.approx(1.0)

    def test_invalid_measure_rejected(self):
        with pytest.raises(ValueError):
            MarkovMeasure(np.array([[0.5, 0.4], [0.5, 0.5]]),
                          np.array([0.5, 0.5]))

    def test_perturbations_decrease_entropy(self, rng):
        # Parry measure is the unique entropy maximizer
        sft = golden_mean_shift()
        mu = gibbs_markov_measure(sft, 1.0)
        h0 = markov_entropy(mu)
        for _ in range(25):
            eps = rng.uniform(0.01, 0.2)
            P = mu.kernel.copy()
            P[0, 0] += eps
            P[0, 1] -= eps
            if P[0, 1] <= 0:
                continue
            pi = stationary_distribution(P)
            assert markov_entropy(MarkovMeasure(P, pi)) < h0 - 1e-12


class TestHigherBlock:
    def test_word_len_two_unchanged(self):
        m = golden_mean_shift()
        assert higher_block_recode(m) is m

    def test_full_shift_r3_alphabet(self):
        phi = np.zeros((2, 2, 2))
        m2 = higher_block_recode(SftModel(np.ones((2, 2), dtype=int), phi,
                                          word_len=3))
        assert m2.alphabet_size == 4
        assert int(m2.transition.sum()) == 8

    def test_golden_mean_r3_alphabet(self):
        phi = np.zeros((2, 2, 2))
        m2 = higher_block_recode(SftModel(golden_mean_shift().transition, phi,
                                          word_len=3))
        # allowed 2-blocks: 00, 01, 10
        assert m2.alphabet_size == 3

    def test_pressure_invariance(self, rng):
        # a 3-word potential depending only on its first two letters must
        # give the same pressure as the 2-word model
        A = golden_mean_shift().transition
        phi2 = rng.normal(size=(2, 2))
        phi3 = np.repeat(phi2[:, :, np.newaxis], 2, axis=2)
        phi3[:, 1, :] = phi2[:, 1, np.newaxis]   # keep dependence on (i,j) only
        p2 = classical_pressure(SftModel(A, phi2), 1.0)
        p3 = classical_pressure(SftModel(A, phi3, word_len=3), 1.0)
        assert p3 == pytest.approx(p2, abs=1e-11)

    def test_word_counts(self):
        # golden mean word counts are Fibonacci numbers
        m = golden_mean_shift()
        fib = [2, 3, 5, 8, 13, 21]
        for n, f in zip(range(1, 7), fib):
            assert len(allowed_words(m, n)) == f


class TestVariationalOptimize:
    def test_full_shift_zero_potential(self):
        res = variational_optimize(full_shift(2), 1.0,
                                   opts=OptimizeOptions(restarts=2))
        assert res.value == pytest.approx(np.log(2), abs=1e-8)
        assert np.allclose(res.measure.kernel, 0.5, atol=1e-4)

    def test_golden_mean_matches_rpf(self):
        res = variational_optimize(golden_mean_shift(), 1.0,
                                   opts=OptimizeOptions(restarts=3))
        assert res.value == pytest.approx(np.log(PHI), abs=1e-8)
        mu = gibbs_markov_measure(golden_mean_shift(), 1.0)
        assert np.max(np.abs(res.measure.kernel - mu.kernel)) < 1e-4

    def test_ising_matches_closed_form(self):
        res = variational_optimize(ising_sft(1.0), 1.0,
                                   opts=OptimizeOptions(restarts=3))
        assert res.value == pytest.approx(np.log(2 * np.cosh(1.0)), abs=1e-8)

    def test_never_exceeds_pressure(self, rng):
        A = random_irreducible(rng, 3)
        phi = rng.normal(size=(3, 3))
        sft = SftModel(A, phi)
        res = variational_optimize(sft, 0.8, opts=OptimizeOptions(restarts=3))
        assert res.value <= classical_pressure(sft, 0.8) + 1e-10

    def test_order_two_same_value(self):
        # a 2-word potential is already order-1; lifting to order 2 cannot
        # improve the supremum
        sft = golden_mean_shift()
        r1 = variational_optimize(sft, 1.0, opts=OptimizeOptions(restarts=2))
        r2 = variational_optimize(sft, 1.0, order=2,
                                  opts=OptimizeOptions(restarts=2))
        assert r2.value == pytest.approx(r1.value, abs=1e-7)
        assert r2.measure.kernel.shape == (3, 3)

    def test_order_below_range_rejected(self):
        phi = np.zeros((2, 2, 2))
        sft = SftModel(np.ones((2, 2), dtype=int), phi, word_len=3)
        with pytest.raises(ValueError):
            variational_optimize(sft, 1.0, order=1)


class TestBridge:
    def test_word_log_sum_full_shift(self):
        # zero potential: log(number of words)
        assert word_log_sum(full_shift(2), 1.0, 5) \
            == pytest.approx(5 * np.log(2), abs=1e-12)
        assert word_log_sum(golden_mean_shift(), 1.0, 6) \
            == pytest.approx(np.log(21), abs=1e-12)

    def test_ising_bridge_exact(self):
        out = diagonal_bridge(ising_sft(1.0), 1.0, 6)
        assert out["pressure_gap"] < 1e-12
        assert out["tv_distance"] < 1e-12

    def test_golden_mean_bridge(self):
        for bnd in ("open", "periodic"):
            out = diagonal_bridge(golden_mean_shift(), 1.0, 8, boundary=bnd)
            assert out["pressure_gap"] < 1e-9
            assert out["tv_distance"] < 1e-9

    def test_periodic_word_sum_transfer_trace(self):
        # periodic word sum equals log Tr L^n
        sft = ising_sft(0.8)
        beta, n = 1.0, 6
        L = transfer_matrix(sft, beta)
        want = np.log(np.trace(np.linalg.matrix_power(L, n)))
        assert word_log_sum(sft, beta, n, "periodic") \
            == pytest.approx(want, abs=1e-12)

    def test_penalty_scale_insensitive(self):
        sft = golden_mean_shift()
        a = diagonal_bridge(sft, 1.0, 6)
        b = diagonal_bridge(sft, 1.0, 6, penalty=500.0)
        assert abs(a["classical_log_z"] - b["classical_log_z"]) < 1e-12
        assert b["pressure_gap"] < 1e-9
