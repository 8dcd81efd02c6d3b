"""Nonlocal games built on the value-constraint systems.

Two games are encoded: the promise game with 4 question rounds whose win
conditions are the four new-proof relations, and the promise-free game with 9
rounds checking the nine old-proof relations.  Classical values are exact
rationals computed by enumerating deterministic strategies (one value per
observable id, which encodes context-freeness; shared randomness cannot beat a
deterministic optimum by convexity).  The quantum value of the new game uses
P(product = r) = (1 + r * <W>)/2 per round; rounds are simulated by sampling
the promise distribution and the Born distribution of the asked observables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .avn import CapacityError, MAX_ENUMERATION_IDS, ParityConstraint
from .hilbert import (
    ObservableWord,
    StateVector,
    draw_indices,
    expectation,
    joint_outcome_distribution,
    local_observable,
    word,
)


class UnsupportedGameError(ValueError):
    """A quantum evaluation was requested for predicates with no single-word form."""


@dataclass(frozen=True)
class Question:
    player: str  # "alice" | "bob"
    label: str
    asked: tuple[str, str]

    def __post_init__(self) -> None:
        if self.player not in ("alice", "bob"):
            raise ValueError(f"unknown player {self.player!r}")


@dataclass(frozen=True)
class Round:
    """One legal question pair, its probability, and the win condition.

    ``predicates`` is a conjunction; a round with no predicates is always won.
    """

    alice: str
    bob: str
    probability: Fraction
    predicates: tuple[ParityConstraint, ...]


@dataclass(frozen=True)
class GameSpec:
    name: str
    alice_questions: tuple[Question, ...]
    bob_questions: tuple[Question, ...]
    rounds: tuple[Round, ...]

    def __post_init__(self) -> None:
        alice = {q.label: q for q in self.alice_questions}
        bob = {q.label: q for q in self.bob_questions}
        if len(alice) != len(self.alice_questions) or len(bob) != len(self.bob_questions):
            raise ValueError("question labels must be unique per player")
        shared = set(self.alice_ids) & set(self.bob_ids)
        if shared:
            raise ValueError(f"ids asked by both players: {sorted(shared)}")
        if sum(r.probability for r in self.rounds) != 1:
            raise ValueError("round probabilities must sum to 1")
        for r in self.rounds:
            if r.probability < 0:
                raise ValueError("round probabilities must be nonnegative")
            asked = set(alice[r.alice].asked) | set(bob[r.bob].asked)
            for pred in r.predicates:
                stray = set(pred.ids) - asked
                if stray:
                    raise ValueError(
                        f"round ({r.alice},{r.bob}) predicate uses unasked ids {sorted(stray)}"
                    )

    def alice_question(self, label: str) -> Question:
        return next(q for q in self.alice_questions if q.label == label)

    def bob_question(self, label: str) -> Question:
        return next(q for q in self.bob_questions if q.label == label)

    @property
    def alice_ids(self) -> tuple[str, ...]:
        return _ordered_ids(self.alice_questions)

    @property
    def bob_ids(self) -> tuple[str, ...]:
        return _ordered_ids(self.bob_questions)

    @property
    def universe(self) -> tuple[str, ...]:
        return self.alice_ids + self.bob_ids

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "alice_questions": [
                {"label": q.label, "asked": list(q.asked)} for q in self.alice_questions
            ],
            "bob_questions": [
                {"label": q.label, "asked": list(q.asked)} for q in self.bob_questions
            ],
            "rounds": [
                {
                    "alice": r.alice,
                    "bob": r.bob,
                    "probability": str(r.probability),
                    "predicates": [
                        {"ids": list(p.ids), "rhs": p.rhs} for p in r.predicates
                    ],
                }
                for r in self.rounds
            ],
        }


def _ordered_ids(questions: tuple[Question, ...]) -> tuple[str, ...]:
    seen: list[str] = []
    for q in questions:
        for name in q.asked:
            if name not in seen:
                seen.append(name)
    return tuple(seen)


def new_game_spec() -> GameSpec:
    """The 4-round promise game: Alice has 2 questions, Bob 4, uniform promise."""
    alice = (
        Question("alice", "I", ("X1", "x1")),
        Question("alice", "II", ("Y1", "x1")),
    )
    bob = (
        Question("bob", "i", ("X2", "y2")),
        Question("bob", "ii", ("X2", "z2")),
        Question("bob", "iii", ("Y2", "y2")),
        Question("bob", "iv", ("Y2", "z2")),
    )
    quarter = Fraction(1, 4)
    rounds = (
        Round("I", "ii", quarter, (ParityConstraint(("X1", "X2", "z2"), +1),)),
        Round("I", "iii", quarter, (ParityConstraint(("X1", "x1", "Y2", "y2"), +1),)),
        Round("II", "i", quarter, (ParityConstraint(("Y1", "x1", "X2", "y2"), +1),)),
        Round("II", "iv", quarter, (ParityConstraint(("Y1", "Y2", "z2"), -1),)),
    )
    return GameSpec("new", alice, bob, rounds)


_OLD_RELATIONS: tuple[ParityConstraint, ...] = (
    ParityConstraint(("Z1", "Z2"), -1),
    ParityConstraint(("z1", "z2"), -1),
    ParityConstraint(("X1", "X2"), -1),
    ParityConstraint(("x1", "x2"), -1),
    ParityConstraint(("Z1z1", "Z2", "z2"), +1),
    ParityConstraint(("X1x1", "X2", "x2"), +1),
    ParityConstraint(("Z1", "x1", "Z2x2"), +1),
    ParityConstraint(("X1", "z1", "X2z2"), +1),
    ParityConstraint(("Z1z1", "X1x1", "Z2x2", "X2z2"), -1),
)


def old_game_spec() -> GameSpec:
    """The 9-round promise-free game over the nine old-proof relations.

    Every question combination is legal with probability 1/9; a round's win
    condition is the conjunction of all relations whose ids are fully observable
    from that round's four answers (each round turns out to observe exactly one).
    """
    alice = (
        Question("alice", "I", ("Z1", "x1")),
        Question("alice", "II", ("X1", "z1")),
        Question("alice", "III", ("Z1z1", "X1x1")),
    )
    bob = (
        Question("bob", "i", ("Z2", "z2")),
        Question("bob", "ii", ("X2", "x2")),
        Question("bob", "iii", ("Z2x2", "X2z2")),
    )
    ninth = Fraction(1, 9)
    rounds = []
    for qa in alice:
        for qb in bob:
            asked = set(qa.asked) | set(qb.asked)
            applicable = tuple(
                rel for rel in _OLD_RELATIONS if set(rel.ids) <= asked
            )
            rounds.append(Round(qa.label, qb.label, ninth, applicable))
    return GameSpec("old", alice, bob, tuple(rounds))


def _round_win_table(spec: GameSpec) -> list[list[tuple[int, int]]]:
    """Per-round list of (id bitmask, rhs bit) pairs over spec.universe order."""
    position = {name: i for i, name in enumerate(spec.universe)}
    table = []
    for r in spec.rounds:
        entries = []
        for pred in r.predicates:
            mask = 0
            for name in pred.ids:
                mask |= 1 << position[name]
            entries.append((mask, 0 if pred.rhs == 1 else 1))
        table.append(entries)
    return table


def classical_value(spec: GameSpec) -> Fraction:
    """Exact maximum winning probability over deterministic strategies."""
    return _classical_optimum(spec)[0]


def best_assignment(spec: GameSpec) -> dict[str, int]:
    """One deterministic strategy achieving the classical value."""
    return _classical_optimum(spec)[1]


def _classical_optimum(spec: GameSpec) -> tuple[Fraction, dict[str, int]]:
    ids = spec.universe
    n = len(ids)
    if n > MAX_ENUMERATION_IDS:
        raise CapacityError(f"game universe has {n} ids; enumeration capped at {MAX_ENUMERATION_IDS}")
    table = _round_win_table(spec)
    probabilities = [r.probability for r in spec.rounds]
    best = Fraction(-1)
    best_mask = 0
    for mask in range(1 << n):
        value = Fraction(0)
        for prob, entries in zip(probabilities, table):
            if all((mask & m).bit_count() % 2 == rhs_bit for m, rhs_bit in entries):
                value += prob
        if value > best:
            best, best_mask = value, mask
    strategy = {name: -1 if (best_mask >> i) & 1 else 1 for i, name in enumerate(ids)}
    return best, strategy


def _round_word(r: Round) -> tuple[ObservableWord, int]:
    """(word, rhs) for a single-predicate round; raises if not single-word expressible."""
    if len(r.predicates) != 1:
        raise UnsupportedGameError(
            f"round ({r.alice},{r.bob}) has {len(r.predicates)} predicates; "
            "quantum value needs exactly one word per round"
        )
    pred = r.predicates[0]
    try:
        w = word(" ".join(pred.ids))
    except ValueError as exc:
        raise UnsupportedGameError(
            f"round ({r.alice},{r.bob}) predicate {pred} is not a product of "
            "single-slot observables on distinct slots"
        ) from exc
    return w, pred.rhs


def quantum_value(spec: GameSpec, state: StateVector) -> float:
    """Winning probability of the quantum strategy that measures the asked observables."""
    total = 0.0
    for r in spec.rounds:
        w, rhs = _round_word(r)
        total += float(r.probability) * (1.0 + rhs * expectation(w, state)) / 2.0
    return total


@dataclass(frozen=True)
class RoundLog:
    alice_label: str
    bob_label: str
    alice_answers: tuple[int, int]
    bob_answers: tuple[int, int]
    won: bool

    def to_json_dict(self) -> dict:
        return {
            "alice": self.alice_label,
            "bob": self.bob_label,
            "alice_answers": list(self.alice_answers),
            "bob_answers": list(self.bob_answers),
            "won": self.won,
        }


@dataclass(frozen=True)
class SimulationResult:
    n: int
    wins: int
    logs: tuple[RoundLog, ...]

    @property
    def win_rate(self) -> float:
        return self.wins / self.n


def simulate_rounds(
    spec: GameSpec,
    strategy: Mapping[str, int] | StateVector,
    n: int,
    rng: np.random.Generator,
    log_limit: int = 100,
) -> SimulationResult:
    """Play ``n`` rounds drawn from the promise distribution.

    ``strategy`` is either a +/-1 assignment over the game universe (classical,
    answers are question-independent by construction) or a shared StateVector
    (quantum, answers are Born samples of the four asked observables).  Returns
    the empirical win rate and the first ``log_limit`` round logs.
    """
    if n < 1:
        raise ValueError(f"need at least one round, got n={n}")
    probs = np.array([float(r.probability) for r in spec.rounds])
    drawn = draw_indices(probs, n, rng)

    if isinstance(strategy, StateVector):
        per_round = [_quantum_round_sampler(spec, r, strategy) for r in spec.rounds]
        wins = 0
        logs: list[RoundLog] = []
        for ri, r in enumerate(spec.rounds):
            hits = np.flatnonzero(drawn == ri)
            if hits.size == 0:
                continue
            outcomes, outcome_probs, won_flags = per_round[ri]
            picks = draw_indices(outcome_probs, hits.size, rng)
            wins += int(np.sum(won_flags[picks]))
            for k in range(min(hits.size, log_limit)):
                a_vals, b_vals = outcomes[int(picks[k])]
                logs.append(RoundLog(r.alice, r.bob, a_vals, b_vals, bool(won_flags[picks[k]])))
        return SimulationResult(n, wins, tuple(logs[:log_limit]))

    assignment = dict(strategy)
    missing = set(spec.universe) - set(assignment)
    if missing:
        raise ValueError(f"classical strategy is missing ids {sorted(missing)}")
    round_won = [
        all(p.satisfied(assignment) for p in r.predicates) for r in spec.rounds
    ]
    wins = int(sum(round_won[int(i)] for i in drawn))
    logs = []
    for i in drawn[:log_limit]:
        r = spec.rounds[int(i)]
        qa, qb = spec.alice_question(r.alice), spec.bob_question(r.bob)
        logs.append(
            RoundLog(
                r.alice,
                r.bob,
                (assignment[qa.asked[0]], assignment[qa.asked[1]]),
                (assignment[qb.asked[0]], assignment[qb.asked[1]]),
                round_won[int(i)],
            )
        )
    return SimulationResult(n, wins, tuple(logs))


def logs_to_json_lines(logs: Iterable[RoundLog]) -> str:
    """Serialize round logs as JSON-lines (one object per line)."""
    return "\n".join(json.dumps(log.to_json_dict(), sort_keys=True) for log in logs)


def _quantum_round_sampler(spec: GameSpec, r: Round, state: StateVector):
    """Precompute (answer pairs, Born probabilities, win flags) for one round."""
    qa, qb = spec.alice_question(r.alice), spec.bob_question(r.bob)
    asked = qa.asked + qb.asked
    observables = tuple(local_observable(s) for s in asked)
    tuples, probs = joint_outcome_distribution(state, observables)
    outcomes = []
    won = np.empty(len(tuples), dtype=bool)
    for i, values in enumerate(tuples):
        answers = dict(zip(asked, values))
        outcomes.append(((values[0], values[1]), (values[2], values[3])))
        won[i] = all(p.satisfied(answers) for p in r.predicates)
    return outcomes, probs, won
