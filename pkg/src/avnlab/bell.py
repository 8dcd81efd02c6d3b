"""The two-observer Bell inequality built from the four perfect correlations.

The expression X1X2z2 - Y1Y2z2 + X1x1Y2y2 + Y1x1X2y2 reaches 4 on the cluster
state, which is also the operator's largest eigenvalue, while every local
deterministic assignment keeps |<...>| <= 2 (and stochastic local models cannot
do better, being mixtures of deterministic ones).  For any assignment the sum
equals 4 - 2*(number of violated value constraints), which ties the bound to
the hidden-variable enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hilbert import (
    DIM,
    ObservableWord,
    StateVector,
    draw_indices,
    expectation,
    joint_outcome_distribution,
    max_eigenvalue,
    word,
    word_matrix,
)


@dataclass(frozen=True)
class BellTerm:
    coefficient: int
    word: ObservableWord

    def __post_init__(self) -> None:
        if self.coefficient not in (1, -1):
            raise ValueError("term coefficients must be +1 or -1")


@dataclass(frozen=True)
class BellExpression:
    terms: tuple[BellTerm, ...]

    def matrix(self) -> np.ndarray:
        out = np.zeros((DIM, DIM), dtype=complex)
        for term in self.terms:
            out += term.coefficient * word_matrix(term.word)
        return out

    def participating_symbols(self) -> tuple[str, ...]:
        seen: list[str] = []
        for term in self.terms:
            for symbol in term.word.symbols:
                if symbol not in seen:
                    seen.append(symbol)
        return tuple(seen)


def bell_expression() -> BellExpression:
    """+X1X2z2 - Y1Y2z2 + X1x1Y2y2 + Y1x1X2y2."""
    return BellExpression(
        (
            BellTerm(+1, word("X1 X2 z2")),
            BellTerm(-1, word("Y1 Y2 z2")),
            BellTerm(+1, word("X1 x1 Y2 y2")),
            BellTerm(+1, word("Y1 x1 X2 y2")),
        )
    )


def quantum_value(expr: BellExpression, state: StateVector) -> float:
    """Sum of coefficient * <word> on the state."""
    return sum(
        term.coefficient * expectation(term.word, state) for term in expr.terms
    )


def lhv_bound(expr: BellExpression) -> Fraction:
    """Exact max of |sum coefficient * product(values)| over all +/-1 assignments."""
    symbols = expr.participating_symbols()
    position = {s: i for i, s in enumerate(symbols)}
    term_masks = []
    for term in expr.terms:
        mask = 0
        for s in term.word.symbols:
            mask |= 1 << position[s]
        term_masks.append((term.coefficient * term.word.sign, mask))
    best = 0
    for assignment in range(1 << len(symbols)):
        total = 0
        for coeff, mask in term_masks:
            total += -coeff if (assignment & mask).bit_count() % 2 else coeff
        best = max(best, abs(total))
    return Fraction(best)


def max_violation_check(expr: BellExpression) -> float:
    """Largest eigenvalue of the Bell operator: the algebraic ceiling on its value."""
    return max_eigenvalue(expr.matrix())


def noise_threshold(expr: BellExpression, state: StateVector) -> float:
    """Critical visibility for the isotropic-noise family v*rho + (1-v)*I/16.

    Every term is a traceless product, so the mixed-state value is linear in v
    and the threshold is lhv_bound / quantum_value.  A result above 1 means the
    expression never beats its local bound on this state.
    """
    for term in expr.terms:
        if not term.word.factors:
            raise ValueError("identity term present; the noise shortcut needs traceless words")
    value = quantum_value(expr, state)
    if value == 0:
        return float("inf")
    return float(lhv_bound(expr)) / value


@dataclass(frozen=True)
class TermEstimate:
    word: str
    coefficient: int
    mean: float        # raw average of outcome products for the unsigned word
    std_error: float   # unbiased sample std / sqrt(shots); 0 for zero variance


@dataclass(frozen=True)
class EstimateReport:
    shots: int
    terms: tuple[TermEstimate, ...]
    total: float
    total_std_error: float


def estimate_terms(
    state: StateVector, shots: int, rng: np.random.Generator, expr: BellExpression | None = None
) -> EstimateReport:
    """Finite-shot estimate of each term and of the full expression."""
    if shots < 100:
        raise ValueError(f"need at least 100 shots, got {shots}")
    if expr is None:
        expr = bell_expression()
    estimates = []
    total = 0.0
    variance_sum = 0.0
    for term in expr.terms:
        observables = term.word.factors
        outcomes, probs = joint_outcome_distribution(state, observables)
        products = np.array([float(np.prod(values)) for values in outcomes])
        picks = draw_indices(probs, shots, rng)
        samples = products[picks]
        mean = float(samples.mean())
        std_error = float(samples.std(ddof=1) / np.sqrt(shots))
        estimates.append(TermEstimate(str(term.word), term.coefficient, mean, std_error))
        total += term.coefficient * term.word.sign * mean
        variance_sum += std_error**2
    return EstimateReport(shots, tuple(estimates), total, float(np.sqrt(variance_sum)))


@dataclass(frozen=True)
class BellReport:
    quantum_value: float
    lhv_bound: Fraction
    max_eigenvalue: float
    visibility_threshold: float

    @property
    def violation_ratio(self) -> float:
        return self.quantum_value / float(self.lhv_bound)


def bell_report(state: StateVector, expr: BellExpression | None = None) -> BellReport:
    """Quantum value, local bound, operator ceiling and visibility in one record."""
    if expr is None:
        expr = bell_expression()
    return BellReport(
        quantum_value=quantum_value(expr, state),
        lhv_bound=lhv_bound(expr),
        max_eigenvalue=max_violation_check(expr),
        visibility_threshold=noise_threshold(expr, state),
    )
