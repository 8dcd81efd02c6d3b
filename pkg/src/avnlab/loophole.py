"""Detection-efficiency thresholds for the two games.

A local model with inefficient detectors is an ensemble of instruction sheets:
each sheet fixes, per observable id, a value in {-1, +1} or a refusal to answer
(encoded as 0).  Values attach to observables, not to questions, so a player
answers a question exactly when both asked observables carry values; refusing
one observable silences every question that asks it.  This preserves the
context-freeness of local elements of reality; per-question answer tables would
let a player answer the same observable differently in different questions and
trivially fake all correlations.

The critical efficiency of a game is the largest min(eta_alice, eta_bob) over
ensembles that win every round in which both players answer:

1. enumerate each player's sheets (3^ids) and deduplicate them into
   per-question behaviours (answer pair or silence per question);
2. keep only joint behaviours that never lose a round where both answer - any
   positively weighted loser would break conditional_win = 1;
3. maximize min-eta over mixtures of survivors, a two-constraint linear
   program over the probability simplex solved in exact rational arithmetic
   (survivors are deduplicated by their (eta_alice, eta_bob) pair first, which
   keeps the tableau tiny).

Question marginals are induced by the round distribution (uniform per player
for both games here).  The thresholds come out at exactly 3/4 (new proof) and
5/6 (old proof); the G/B1/B2 ensembles below achieve them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .game import GameSpec, Question, new_game_spec, old_game_spec
from .hilbert import draw_indices
from .simplex import OPTIMAL, solve_lp

NO_ANSWER = 0


@dataclass(frozen=True)
class InstructionSheet:
    """Per-observable instructions for one player: value +/-1, or 0 for no answer."""

    player: str
    values: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        ids = [name for name, _ in self.values]
        if len(set(ids)) != len(ids):
            raise ValueError("instruction sheet repeats an observable id")
        for name, value in self.values:
            if value not in (-1, 0, 1):
                raise ValueError(f"instruction for {name} must be -1, 0 or +1")

    def value(self, name: str) -> int:
        for key, value in self.values:
            if key == name:
                return value
        raise KeyError(f"sheet for {self.player} has no instruction for {name!r}")

    def answers(self, question: Question) -> bool:
        return all(self.value(name) != NO_ANSWER for name in question.asked)

    def answer_pair(self, question: Question) -> tuple[int, int] | None:
        pair = (self.value(question.asked[0]), self.value(question.asked[1]))
        return None if NO_ANSWER in pair else pair

    def to_json_dict(self) -> dict:
        return {"player": self.player, "values": {k: v for k, v in self.values}}


@dataclass(frozen=True)
class JointInstruction:
    alice: InstructionSheet
    bob: InstructionSheet

    def to_json_dict(self) -> dict:
        return {"alice": self.alice.to_json_dict(), "bob": self.bob.to_json_dict()}


@dataclass(frozen=True)
class Ensemble:
    """Probability-weighted joint instructions; weights are exact and sum to 1."""

    items: tuple[tuple[JointInstruction, Fraction], ...]

    def __post_init__(self) -> None:
        kept = tuple(
            (instr, Fraction(weight)) for instr, weight in self.items if weight != 0
        )
        for _, weight in kept:
            if weight < 0:
                raise ValueError("ensemble weights must be nonnegative")
        if sum(weight for _, weight in kept) != 1:
            raise ValueError("ensemble weights must sum to exactly 1")
        object.__setattr__(self, "items", kept)


def _sheet(player: str, **values: int) -> InstructionSheet:
    return InstructionSheet(player, tuple(values.items()))


def reference_ensemble(variant: str, p) -> Ensemble:
    """The G/B1/B2 ensemble with weights (1-p, p/2, p/2); zero weights are dropped."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"mixing probability must lie in [0, 1], got {p}")
    if variant == "new":
        g_alice = _sheet("alice", X1=1, Y1=1, x1=1)
        g_bob = _sheet("bob", X2=1, Y2=1, y2=1, z2=1)
        b1_alice = _sheet("alice", X1=1, Y1=0, x1=1)   # silences question II
        b2_bob = _sheet("bob", X2=1, Y2=0, y2=1, z2=1)  # silences iii and iv
        g = JointInstruction(g_alice, g_bob)
        b1 = JointInstruction(b1_alice, g_bob)
        b2 = JointInstruction(g_alice, b2_bob)
    elif variant == "old":
        g_alice = _sheet("alice", Z1=1, z1=1, X1=1, x1=1, Z1z1=1, X1x1=1)
        g_bob = _sheet("bob", Z2=-1, z2=-1, X2=-1, x2=-1, Z2x2=1, X2z2=1)
        b1_alice = _sheet("alice", Z1=1, z1=1, X1=1, x1=1, Z1z1=0, X1x1=0)
        b2_bob = _sheet("bob", Z2=-1, z2=-1, X2=-1, x2=-1, Z2x2=0, X2z2=0)
        g = JointInstruction(g_alice, g_bob)
        b1 = JointInstruction(b1_alice, g_bob)
        b2 = JointInstruction(g_alice, b2_bob)
    else:
        raise ValueError(f"unknown variant {variant!r}; expected 'new' or 'old'")
    half_p = p / 2
    return Ensemble(((g, 1 - p), (b1, half_p), (b2, half_p)))


def question_marginals(spec: GameSpec) -> tuple[dict[str, Fraction], dict[str, Fraction]]:
    """Per-player question probabilities induced by the round distribution."""
    alice = {q.label: Fraction(0) for q in spec.alice_questions}
    bob = {q.label: Fraction(0) for q in spec.bob_questions}
    for r in spec.rounds:
        alice[r.alice] += r.probability
        bob[r.bob] += r.probability
    return alice, bob


@dataclass(frozen=True)
class EfficiencyReport:
    eta_alice: Fraction
    eta_bob: Fraction
    valid_round_probability: Fraction
    conditional_win: Fraction | None  # undefined (None) when no round is ever valid


def _round_outcome(instr: JointInstruction, spec: GameSpec, r) -> tuple[bool, bool]:
    """(both answer, round won) for one instruction in one round."""
    qa, qb = spec.alice_question(r.alice), spec.bob_question(r.bob)
    if not (instr.alice.answers(qa) and instr.bob.answers(qb)):
        return False, False
    values = {name: instr.alice.value(name) for name in qa.asked}
    values.update({name: instr.bob.value(name) for name in qb.asked})
    return True, all(p.satisfied(values) for p in r.predicates)


def efficiency_of(ensemble: Ensemble, spec: GameSpec) -> EfficiencyReport:
    """Exact answer rates, valid-round probability and conditional win probability."""
    alice_marg, bob_marg = question_marginals(spec)
    eta_alice = Fraction(0)
    eta_bob = Fraction(0)
    valid = Fraction(0)
    valid_and_won = Fraction(0)
    for instr, weight in ensemble.items:
        for q in spec.alice_questions:
            if instr.alice.answers(q):
                eta_alice += weight * alice_marg[q.label]
        for q in spec.bob_questions:
            if instr.bob.answers(q):
                eta_bob += weight * bob_marg[q.label]
        for r in spec.rounds:
            both, won = _round_outcome(instr, spec, r)
            if both:
                valid += weight * r.probability
                if won:
                    valid_and_won += weight * r.probability
    conditional = valid_and_won / valid if valid != 0 else None
    return EfficiencyReport(eta_alice, eta_bob, valid, conditional)


@dataclass(frozen=True)
class BalanceResult:
    p: Fraction | None
    indeterminate: bool


def solve_balance(p_q, p_g, p_b1, p_b2) -> BalanceResult:
    """Solve p_q = (1-p) p_g + (p/2)(p_b1 + p_b2) for the mixing probability p."""
    p_q, p_g = Fraction(p_q), Fraction(p_g)
    mean_b = (Fraction(p_b1) + Fraction(p_b2)) / 2
    slope = mean_b - p_g
    if slope == 0:
        # degenerate: either every p works or none does
        return BalanceResult(None, indeterminate=(p_q == p_g))
    return BalanceResult((p_q - p_g) / slope, indeterminate=False)


def solve_balance_p(variant: str) -> BalanceResult:
    """Mixing probability at which the reference ensemble matches the quantum win rate 1."""
    spec = new_game_spec() if variant == "new" else old_game_spec()
    full = reference_ensemble(variant, 1)
    (b1, _), (b2, _) = full.items  # at p = 1 only B1 and B2 remain
    g_only = Ensemble(((reference_ensemble(variant, 0).items[0][0], Fraction(1)),))
    p_g = efficiency_of(g_only, spec).conditional_win
    p_b1 = efficiency_of(Ensemble(((b1, Fraction(1)),)), spec).conditional_win
    p_b2 = efficiency_of(Ensemble(((b2, Fraction(1)),)), spec).conditional_win
    return solve_balance(1, p_g, p_b1, p_b2)


@dataclass(frozen=True)
class _Behaviour:
    """A player's sheet reduced to what rounds can see: per-question answers and eta."""

    answers: tuple[tuple[int, int] | None, ...]
    eta: Fraction
    sheet: InstructionSheet


def _player_behaviours(
    player: str,
    questions: tuple[Question, ...],
    ids: tuple[str, ...],
    marginal: dict[str, Fraction],
) -> list[_Behaviour]:
    behaviours: dict[tuple, _Behaviour] = {}
    for combo in product((-1, 1, NO_ANSWER), repeat=len(ids)):
        sheet = InstructionSheet(player, tuple(zip(ids, combo)))
        answers = tuple(sheet.answer_pair(q) for q in questions)
        if answers in behaviours:
            continue
        eta = sum(
            (marginal[q.label] for q, a in zip(questions, answers) if a is not None),
            Fraction(0),
        )
        behaviours[answers] = _Behaviour(answers, eta, sheet)
    return list(behaviours.values())


@dataclass(frozen=True)
class SurvivorSet:
    """Joint behaviours that never lose a round in which both players answer."""

    count: int
    joint_count: int
    members: tuple[tuple[_Behaviour, _Behaviour], ...]


def survivors(spec: GameSpec) -> SurvivorSet:
    alice_marg, bob_marg = question_marginals(spec)
    alice_behaviours = _player_behaviours(
        "alice", spec.alice_questions, spec.alice_ids, alice_marg
    )
    bob_behaviours = _player_behaviours("bob", spec.bob_questions, spec.bob_ids, bob_marg)

    alice_index = {q.label: i for i, q in enumerate(spec.alice_questions)}
    bob_index = {q.label: i for i, q in enumerate(spec.bob_questions)}
    rounds = []
    for r in spec.rounds:
        qa, qb = spec.alice_question(r.alice), spec.bob_question(r.bob)
        id_pos = {name: ("a", k) for k, name in enumerate(qa.asked)}
        id_pos.update({name: ("b", k) for k, name in enumerate(qb.asked)})
        preds = [
            ([id_pos[name] for name in p.ids], p.rhs) for p in r.predicates
        ]
        rounds.append((alice_index[r.alice], bob_index[r.bob], preds))

    kept = []
    for ba in alice_behaviours:
        for bb in bob_behaviours:
            ok = True
            for ai, bi, preds in rounds:
                a_pair, b_pair = ba.answers[ai], bb.answers[bi]
                if a_pair is None or b_pair is None:
                    continue
                for positions, rhs in preds:
                    prod_value = 1
                    for side, k in positions:
                        prod_value *= a_pair[k] if side == "a" else b_pair[k]
                    if prod_value != rhs:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                kept.append((ba, bb))
    return SurvivorSet(
        count=len(kept),
        joint_count=len(alice_behaviours) * len(bob_behaviours),
        members=tuple(kept),
    )


@dataclass(frozen=True)
class ThresholdReport:
    threshold: Fraction
    eta_alice: Fraction
    eta_bob: Fraction
    survivor_count: int
    joint_count: int
    ensemble: Ensemble | None  # None only in the degenerate no-survivor case


def optimize_min_efficiency(spec: GameSpec) -> ThresholdReport:
    """Support-filter the instruction space, then solve the max-min LP exactly."""
    pool = survivors(spec)
    if pool.count == 0:
        return ThresholdReport(
            Fraction(0), Fraction(0), Fraction(0), 0, pool.joint_count, None
        )
    points: dict[tuple[Fraction, Fraction], tuple[_Behaviour, _Behaviour]] = {}
    for ba, bb in pool.members:
        points.setdefault((ba.eta, bb.eta), (ba, bb))
    keys = sorted(points)
    m = len(keys)
    # variables w_0..w_{m-1}, t: maximize t subject to
    #   sum w = 1,  t <= sum w*eta_alice,  t <= sum w*eta_bob
    objective = [Fraction(0)] * m + [Fraction(1)]
    a_ub = [
        [-a for a, _ in keys] + [Fraction(1)],
        [-b for _, b in keys] + [Fraction(1)],
    ]
    a_eq = [[Fraction(1)] * m + [Fraction(0)]]
    result = solve_lp(objective, a_ub, [Fraction(0), Fraction(0)], a_eq, [Fraction(1)])
    if result.status != OPTIMAL:
        raise RuntimeError(f"threshold LP unexpectedly {result.status}")
    weights = result.x[:m]
    eta_alice = sum((w * a for w, (a, _) in zip(weights, keys)), Fraction(0))
    eta_bob = sum((w * b for w, (_, b) in zip(weights, keys)), Fraction(0))
    ensemble = Ensemble(
        tuple(
            (JointInstruction(points[key][0].sheet, points[key][1].sheet), w)
            for key, w in zip(keys, weights)
            if w != 0
        )
    )
    return ThresholdReport(
        result.value, eta_alice, eta_bob, pool.count, pool.joint_count, ensemble
    )


def critical_efficiency(spec: GameSpec) -> Fraction:
    """Largest min(eta_alice, eta_bob) of any perfectly-simulating local ensemble."""
    return optimize_min_efficiency(spec).threshold


def max_bob_efficiency(spec: GameSpec, min_alice) -> Fraction:
    """Asymmetric query: maximize eta_bob subject to eta_alice >= min_alice.

    Exposed for exploration; the headline thresholds use the symmetric query.
    """
    min_alice = Fraction(min_alice)
    pool = survivors(spec)
    points = sorted({(ba.eta, bb.eta) for ba, bb in pool.members})
    m = len(points)
    objective = [b for _, b in points]
    # -sum w*eta_alice <= -min_alice
    a_ub = [[-a for a, _ in points]]
    a_eq = [[Fraction(1)] * m]
    result = solve_lp(objective, a_ub, [-min_alice], a_eq, [Fraction(1)])
    if result.status != OPTIMAL:
        raise ValueError(f"no ensemble reaches eta_alice >= {min_alice}")
    return result.value


@dataclass(frozen=True)
class OptimalityReport:
    variant: str
    lp_threshold: Fraction
    lp_ensemble: Ensemble | None
    survivor_count: int
    joint_count: int
    balance_p: Fraction
    reference_eta_alice: Fraction
    reference_eta_bob: Fraction
    reference_conditional_win: Fraction
    optimal: bool


def verify_reference_optimality(variant: str) -> OptimalityReport:
    """Confirm the G/B1/B2 family at the balance-equation p achieves the LP optimum."""
    spec = new_game_spec() if variant == "new" else old_game_spec()
    report = optimize_min_efficiency(spec)
    balance = solve_balance_p(variant)
    if balance.p is None:
        raise RuntimeError("balance equation was unexpectedly degenerate")
    eff = efficiency_of(reference_ensemble(variant, balance.p), spec)
    reference_min = min(eff.eta_alice, eff.eta_bob)
    return OptimalityReport(
        variant=variant,
        lp_threshold=report.threshold,
        lp_ensemble=report.ensemble,
        survivor_count=report.survivor_count,
        joint_count=report.joint_count,
        balance_p=balance.p,
        reference_eta_alice=eff.eta_alice,
        reference_eta_bob=eff.eta_bob,
        reference_conditional_win=eff.conditional_win,
        optimal=(
            reference_min == report.threshold and eff.conditional_win == 1
        ),
    )


@dataclass(frozen=True)
class NoAnswerSimulation:
    rounds: int
    valid_rounds: int
    wins: int

    @property
    def conditional_win_rate(self) -> float | None:
        return None if self.valid_rounds == 0 else self.wins / self.valid_rounds


def simulate_with_no_answer(
    ensemble: Ensemble, spec: GameSpec, n: int, rng: np.random.Generator
) -> NoAnswerSimulation:
    """Simulate-and-discard sampling: rounds where either player refuses are invalid."""
    if n < 1:
        raise ValueError(f"need at least one round, got n={n}")
    weights = np.array([float(w) for _, w in ensemble.items])
    round_probs = np.array([float(r.probability) for r in spec.rounds])
    valid_table = np.empty((len(ensemble.items), len(spec.rounds)), dtype=bool)
    win_table = np.empty_like(valid_table)
    for i, (instr, _) in enumerate(ensemble.items):
        for j, r in enumerate(spec.rounds):
            both, won = _round_outcome(instr, spec, r)
            valid_table[i, j] = both
            win_table[i, j] = won
    drawn_instr = draw_indices(weights, n, rng)
    drawn_round = draw_indices(round_probs, n, rng)
    valid = valid_table[drawn_instr, drawn_round]
    won = win_table[drawn_instr, drawn_round]
    return NoAnswerSimulation(n, int(valid.sum()), int((valid & won).sum()))
