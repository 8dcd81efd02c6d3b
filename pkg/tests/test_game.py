import json
from fractions import Fraction
from random import Random

import numpy as np
import pytest

from avnlab.avn import CapacityError, ParityConstraint, constraint_system, max_satisfiable
from avnlab.game import (
    GameSpec,
    Question,
    Round,
    UnsupportedGameError,
    best_assignment,
    classical_value,
    logs_to_json_lines,
    new_game_spec,
    old_game_spec,
    quantum_value,
    simulate_rounds,
)
from avnlab.hilbert import basis_state


def single_round_game(predicates, alice=("X1", "x1"), bob=("X2", "y2")):
    return GameSpec(
        "custom",
        (Question("alice", "I", alice),),
        (Question("bob", "i", bob),),
        (Round("I", "i", Fraction(1), tuple(predicates)),),
    )


class TestNewGameSpec:
    def test_round_structure(self):
        spec = new_game_spec()
        assert len(spec.rounds) == 4
        assert all(r.probability == Fraction(1, 4) for r in spec.rounds)
        assert [(r.alice, r.bob) for r in spec.rounds] == [
            ("I", "ii"), ("I", "iii"), ("II", "i"), ("II", "iv"),
        ]

    def test_questions(self):
        spec = new_game_spec()
        assert spec.alice_question("I").asked == ("X1", "x1")
        assert spec.alice_question("II").asked == ("Y1", "x1")
        assert spec.bob_question("iv").asked == ("Y2", "z2")

    def test_round_predicates(self):
        spec = new_game_spec()
        by_pair = {(r.alice, r.bob): r.predicates for r in spec.rounds}
        assert by_pair[("I", "ii")] == (ParityConstraint(("X1", "X2", "z2"), +1),)
        assert by_pair[("II", "iv")] == (ParityConstraint(("Y1", "Y2", "z2"), -1),)

    def test_universe(self):
        spec = new_game_spec()
        assert set(spec.universe) == {"X1", "Y1", "x1", "X2", "Y2", "y2", "z2"}

    def test_canonical_json(self):
        payload = new_game_spec().to_json_dict()
        parsed = json.loads(json.dumps(payload, sort_keys=True))
        assert parsed["name"] == "new"
        assert parsed["rounds"][0] == {
            "alice": "I",
            "bob": "ii",
            "probability": "1/4",
            "predicates": [{"ids": ["X1", "X2", "z2"], "rhs": 1}],
        }


class TestOldGameSpec:
    def test_round_structure(self):
        spec = old_game_spec()
        assert len(spec.rounds) == 9
        assert all(r.probability == Fraction(1, 9) for r in spec.rounds)

    def test_each_round_observes_exactly_one_relation(self):
        spec = old_game_spec()
        assert all(len(r.predicates) == 1 for r in spec.rounds)

    def test_selected_predicates(self):
        spec = old_game_spec()
        by_pair = {(r.alice, r.bob): r.predicates for r in spec.rounds}
        assert by_pair[("I", "i")] == (ParityConstraint(("Z1", "Z2"), -1),)
        assert by_pair[("III", "iii")] == (
            ParityConstraint(("Z1z1", "X1x1", "Z2x2", "X2z2"), -1),
        )


class TestGameSpecValidation:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GameSpec(
                "bad",
                (Question("alice", "I", ("X1", "x1")),),
                (Question("bob", "i", ("X2", "y2")),),
                (Round("I", "i", Fraction(1, 2), ()),),
            )

    def test_predicates_must_reference_asked_ids(self):
        with pytest.raises(ValueError):
            single_round_game([ParityConstraint(("Y1",), 1)])

    def test_unknown_player(self):
        with pytest.raises(ValueError):
            Question("charlie", "I", ("X1", "x1"))

    def test_sides_must_be_disjoint(self):
        with pytest.raises(ValueError):
            GameSpec(
                "bad",
                (Question("alice", "I", ("X1", "x1")),),
                (Question("bob", "i", ("X1", "y2")),),
                (Round("I", "i", Fraction(1), ()),),
            )


class TestClassicalValue:
    def test_new_is_three_quarters(self):
        assert classical_value(new_game_spec()) == Fraction(3, 4)

    def test_old_is_eight_ninths(self):
        assert classical_value(old_game_spec()) == Fraction(8, 9)

    def test_single_forced_win(self):
        spec = single_round_game([ParityConstraint(("X1",), 1)])
        assert classical_value(spec) == 1

    def test_matches_max_satisfiable_under_uniform_promise(self):
        assert classical_value(new_game_spec()) == Fraction(
            max_satisfiable(constraint_system("new")).best, 4
        )
        assert classical_value(old_game_spec()) == Fraction(
            max_satisfiable(constraint_system("old")).best, 9
        )

    def test_best_assignment_achieves_value(self):
        for spec in (new_game_spec(), old_game_spec()):
            strategy = best_assignment(spec)
            value = sum(
                (r.probability for r in spec.rounds
                 if all(p.satisfied(strategy) for p in r.predicates)),
                Fraction(0),
            )
            assert value == classical_value(spec)

    def test_capacity_error(self):
        # 12 alice questions x 2 ids + 2 bob ids = 26 ids > the 24-id enumeration cap
        questions_a = tuple(
            Question("alice", f"A{i}", (f"a{2 * i}", f"a{2 * i + 1}")) for i in range(12)
        )
        questions_b = (Question("bob", "i", ("b0", "b1")),)
        rounds = tuple(
            Round(f"A{i}", "i", Fraction(1, 12), ()) for i in range(12)
        )
        spec = GameSpec("wide", questions_a, questions_b, rounds)
        with pytest.raises(CapacityError):
            classical_value(spec)


class TestQuantumValue:
    def test_cluster_state_never_fails(self, psi):
        assert quantum_value(new_game_spec(), psi) == pytest.approx(1, abs=1e-12)

    def test_product_state_value(self, psi):
        # dense-oracle value: every round word has X1 or Y1, off-diagonal on |H>,
        # so all four expectations vanish and each round wins with probability 1/2
        assert quantum_value(new_game_spec(), basis_state("HuHu")) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_z1z2_round_is_certain(self, psi):
        spec = single_round_game(
            [ParityConstraint(("z1", "z2"), +1)], alice=("z1", "x1"), bob=("z2", "y2")
        )
        assert quantum_value(spec, psi) == pytest.approx(1, abs=1e-12)

    def test_old_game_unsupported(self, psi):
        with pytest.raises(UnsupportedGameError):
            quantum_value(old_game_spec(), psi)

    def test_multi_predicate_round_unsupported(self, psi):
        spec = single_round_game(
            [ParityConstraint(("z1",), 1), ParityConstraint(("z2",), 1)],
            alice=("z1", "x1"),
            bob=("z2", "y2"),
        )
        with pytest.raises(UnsupportedGameError):
            quantum_value(spec, psi)


class TestSimulation:
    def test_rejects_zero_rounds(self, psi, rng):
        with pytest.raises(ValueError):
            simulate_rounds(new_game_spec(), psi, 0, rng)

    def test_quantum_strategy_never_fails(self, psi):
        result = simulate_rounds(new_game_spec(), psi, 100_000, np.random.default_rng(42))
        assert result.win_rate == 1.0
        assert all(log.won for log in result.logs)

    def test_all_ones_rate_near_three_quarters(self):
        spec = new_game_spec()
        ones = {name: 1 for name in spec.universe}
        result = simulate_rounds(spec, ones, 100_000, np.random.default_rng(0))
        assert abs(result.win_rate - 0.75) <= 0.01

    def test_missing_ids_rejected(self, rng):
        with pytest.raises(ValueError):
            simulate_rounds(new_game_spec(), {"X1": 1}, 10, rng)

    def test_deterministic_under_seed(self, psi):
        spec = new_game_spec()
        a = simulate_rounds(spec, psi, 500, np.random.default_rng(7))
        b = simulate_rounds(spec, psi, 500, np.random.default_rng(7))
        assert a.wins == b.wins
        assert a.logs == b.logs

    def test_promise_marginals(self):
        spec = new_game_spec()
        ones = {name: 1 for name in spec.universe}
        n = 100_000
        result = simulate_rounds(spec, ones, n, np.random.default_rng(11), log_limit=n)
        counts: dict[tuple[str, str], int] = {}
        for log in result.logs:
            counts[(log.alice_label, log.bob_label)] = counts.get(
                (log.alice_label, log.bob_label), 0
            ) + 1
        for r in spec.rounds:
            frequency = counts.get((r.alice, r.bob), 0) / n
            assert abs(frequency - float(r.probability)) <= 0.01

    def test_hoeffding_bound_for_deterministic_strategies(self):
        """|empirical - exact| <= 4 sqrt(ln(2/delta)/(2n)) with delta = 1e-6, n = 1e5."""
        spec = new_game_spec()
        n = 100_000
        bound = 4 * np.sqrt(np.log(2 / 1e-6) / (2 * n))
        rand = Random(3)
        strategies = [
            {name: 1 for name in spec.universe},
            best_assignment(spec),
            {name: rand.choice((1, -1)) for name in spec.universe},
        ]
        for k, strategy in enumerate(strategies):
            exact = sum(
                (r.probability for r in spec.rounds
                 if all(p.satisfied(strategy) for p in r.predicates)),
                Fraction(0),
            )
            result = simulate_rounds(spec, strategy, n, np.random.default_rng(100 + k))
            assert abs(result.win_rate - float(exact)) <= bound

    def test_classical_answers_are_context_free(self):
        """x1 is asked in both of Alice's questions; the logged answer never varies."""
        spec = new_game_spec()
        rand = Random(9)
        strategy = {name: rand.choice((1, -1)) for name in spec.universe}
        result = simulate_rounds(
            spec, strategy, 2000, np.random.default_rng(5), log_limit=2000
        )
        x1_answers = {log.alice_answers[1] for log in result.logs}
        assert x1_answers == {strategy["x1"]}

    def test_log_serialization(self, psi):
        result = simulate_rounds(new_game_spec(), psi, 50, np.random.default_rng(1))
        lines = logs_to_json_lines(result.logs)
        parsed = [json.loads(line) for line in lines.splitlines()]
        assert len(parsed) == len(result.logs)
        assert {"alice", "bob", "alice_answers", "bob_answers", "won"} <= set(parsed[0])

    def test_quantum_log_answers_satisfy_predicates(self, psi):
        spec = new_game_spec()
        result = simulate_rounds(spec, psi, 200, np.random.default_rng(8))
        for log in result.logs:
            qa = spec.alice_question(log.alice_label)
            qb = spec.bob_question(log.bob_label)
            values = dict(zip(qa.asked, log.alice_answers))
            values.update(zip(qb.asked, log.bob_answers))
            r = next(
                r for r in spec.rounds if (r.alice, r.bob) == (log.alice_label, log.bob_label)
            )
            assert all(p.satisfied(values) for p in r.predicates) == log.won
