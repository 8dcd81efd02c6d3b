from fractions import Fraction
from itertools import product
from random import Random

import numpy as np
import pytest

from avnlab.avn import constraint_system, satisfied_count
from avnlab.bell import (
    BellExpression,
    BellTerm,
    bell_expression,
    bell_report,
    estimate_terms,
    lhv_bound,
    max_violation_check,
    noise_threshold,
    quantum_value,
)
from avnlab.hilbert import (
    ObservableWord,
    StateVector,
    basis_state,
    expectation,
    word,
    word_matrix,
)
from oracles import embed_word_matrix, random_product_state_amps, random_state_amps


class TestExpression:
    def test_four_terms(self):
        expr = bell_expression()
        assert len(expr.terms) == 4

    def test_y_term_is_negative(self):
        expr = bell_expression()
        signs = {str(t.word): t.coefficient for t in expr.terms}
        assert signs["Y1 Y2 z2"] == -1
        assert signs["X1 X2 z2"] == signs["X1 x1 Y2 y2"] == signs["Y1 x1 X2 y2"] == 1

    def test_third_term_covers_all_slots(self):
        expr = bell_expression()
        assert len(expr.terms[2].word.factors) == 4

    def test_seven_participating_observables(self):
        assert set(bell_expression().participating_symbols()) == {
            "X1", "Y1", "x1", "X2", "Y2", "y2", "z2",
        }

    def test_coefficient_validation(self):
        with pytest.raises(ValueError):
            BellTerm(2, word("X1"))


class TestQuantumValue:
    def test_cluster_state_reaches_four(self, psi):
        assert quantum_value(bell_expression(), psi) == pytest.approx(4, abs=1e-12)

    def test_product_state_value_from_dense_oracle(self):
        # every term contains X1 or Y1 (off-diagonal on pol1), so |HuHu> gives 0
        expr = bell_expression()
        huhu = basis_state("HuHu")
        oracle = sum(
            t.coefficient
            * np.vdot(huhu.amplitudes, embed_word_matrix(t.word) @ huhu.amplitudes).real
            for t in expr.terms
        )
        assert oracle == 0
        assert quantum_value(expr, huhu) == pytest.approx(0, abs=1e-12)

    def test_matches_termwise_expectations(self, psi):
        expr = bell_expression()
        total = sum(t.coefficient * expectation(t.word, psi) for t in expr.terms)
        assert quantum_value(expr, psi) == pytest.approx(total, abs=1e-12)


class TestLhvBound:
    def test_bell_expression_bound_is_two(self):
        assert lhv_bound(bell_expression()) == Fraction(2)

    def test_single_term(self):
        expr = BellExpression((BellTerm(1, word("X1 X2 z2")),))
        assert lhv_bound(expr) == 1

    def test_cancelling_terms(self):
        expr = BellExpression((BellTerm(1, word("X1")), BellTerm(-1, word("X1"))))
        assert lhv_bound(expr) == 0

    def test_bridge_identity_over_all_128_assignments(self):
        """sum coeff*prod(values) = 4 - 2 * (violated new-proof constraints)."""
        system = constraint_system("new")
        expr = bell_expression()
        symbols = system.universe
        for values in product((1, -1), repeat=len(symbols)):
            assignment = dict(zip(symbols, values))
            bell_sum = sum(
                t.coefficient * np.prod([assignment[s] for s in t.word.symbols])
                for t in expr.terms
            )
            violated = len(system.constraints) - satisfied_count(assignment, system)
            assert bell_sum == 4 - 2 * violated

    def test_bound_follows_from_max_satisfiable(self):
        from avnlab.avn import max_satisfiable

        best = max_satisfiable(constraint_system("new")).best
        assert lhv_bound(bell_expression()) == 4 - 2 * (4 - best) == 2


class TestMaxViolation:
    def test_bell_expression_ceiling_is_four(self):
        assert max_violation_check(bell_expression()) == pytest.approx(4, abs=1e-9)

    def test_single_word(self):
        expr = BellExpression((BellTerm(1, word("X1")),))
        assert max_violation_check(expr) == pytest.approx(1, abs=1e-9)

    def test_flipped_y_sign_expression(self):
        # all four coefficients +1: eigenvalue ceiling drops to 2 (dense eigensolve oracle)
        expr = BellExpression(
            (
                BellTerm(1, word("X1 X2 z2")),
                BellTerm(1, word("Y1 Y2 z2")),
                BellTerm(1, word("X1 x1 Y2 y2")),
                BellTerm(1, word("Y1 x1 X2 y2")),
            )
        )
        oracle_matrix = sum(embed_word_matrix(t.word) for t in expr.terms)
        oracle = float(np.max(np.linalg.eigvalsh(oracle_matrix)))
        assert max_violation_check(expr) == pytest.approx(oracle, abs=1e-9)
        assert max_violation_check(expr) == pytest.approx(2, abs=1e-9)

    def test_operator_norm_dominates_every_expectation(self):
        expr = bell_expression()
        ceiling = max_violation_check(expr)
        rand = Random(31)
        for _ in range(100):
            s = StateVector(random_state_amps(rand))
            assert quantum_value(expr, s) <= ceiling + 1e-9


class TestNoiseThreshold:
    def test_half_for_bell_expression(self, psi):
        assert noise_threshold(bell_expression(), psi) == pytest.approx(0.5, abs=1e-12)

    def test_linearity_against_mixed_state_oracle(self, psi):
        """Value of v*|psi><psi| + (1-v)*I/16 is v * 4, by direct trace."""
        expr = bell_expression()
        operator = expr.matrix()
        projector = np.outer(psi.amplitudes, psi.amplitudes.conj())
        for v in (0.0, 0.5, 1.0):
            rho = v * projector + (1 - v) * np.eye(16) / 16
            assert np.trace(rho @ operator).real == pytest.approx(4 * v, abs=1e-12)

    def test_no_margin_means_threshold_one(self, psi):
        expr = BellExpression((BellTerm(1, word("z1 z2")),))
        # quantum value 1 equals the local bound 1
        assert noise_threshold(expr, psi) == pytest.approx(1, abs=1e-12)

    def test_identity_term_rejected(self, psi):
        expr = BellExpression((BellTerm(1, ObservableWord()),))
        with pytest.raises(ValueError):
            noise_threshold(expr, psi)

    def test_zero_value_gives_infinity(self):
        assert noise_threshold(bell_expression(), basis_state("HuHu")) == float("inf")


class TestEstimates:
    def test_shot_floor(self, psi, rng):
        with pytest.raises(ValueError):
            estimate_terms(psi, 50, rng)

    def test_perfect_correlations_have_zero_variance(self, psi):
        report = estimate_terms(psi, 100_000, np.random.default_rng(23))
        by_word = {t.word: t for t in report.terms}
        assert by_word["X1 X2 z2"].mean == 1.0
        assert by_word["X1 X2 z2"].std_error == 0.0
        assert by_word["Y1 Y2 z2"].mean == -1.0
        assert report.total == pytest.approx(4, abs=0.05)
        assert report.total_std_error == 0.0

    def test_small_shot_count_still_exact_on_cluster_state(self, psi):
        report = estimate_terms(psi, 100, np.random.default_rng(2))
        assert report.total == 4.0

    def test_deterministic_under_seed(self, psi):
        a = estimate_terms(psi, 1000, np.random.default_rng(5))
        b = estimate_terms(psi, 1000, np.random.default_rng(5))
        assert a == b

    def test_means_within_five_standard_errors_on_product_states(self):
        rand = Random(8)
        expr = bell_expression()
        for trial in range(3):
            state = StateVector(random_product_state_amps(rand))
            report = estimate_terms(state, 100_000, np.random.default_rng(50 + trial))
            for term, estimate in zip(expr.terms, report.terms):
                exact = expectation(term.word, state)
                if estimate.std_error == 0:
                    assert estimate.mean == pytest.approx(exact, abs=1e-12)
                else:
                    assert abs(estimate.mean - exact) <= 5 * estimate.std_error


class TestBellReport:
    def test_fields(self, psi):
        report = bell_report(psi)
        assert report.quantum_value == pytest.approx(4, abs=1e-12)
        assert report.lhv_bound == Fraction(2)
        assert report.max_eigenvalue == pytest.approx(4, abs=1e-9)
        assert report.visibility_threshold == pytest.approx(0.5, abs=1e-12)
        assert report.violation_ratio == pytest.approx(2.0, abs=1e-12)

    def test_word_matrix_consistency(self):
        expr = bell_expression()
        direct = expr.matrix()
        rebuilt = sum(t.coefficient * word_matrix(t.word) for t in expr.terms)
        assert np.array_equal(direct, rebuilt)
