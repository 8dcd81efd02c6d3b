"""A small dense two-phase simplex over exact rationals.

Solves  max c.x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0  with
every coefficient coerced to ``fractions.Fraction``, so results are exact.
Bland's rule is used throughout, which guarantees termination.  Sized for the
tiny programs this package builds (a handful of rows over a probability
simplex); no sparsity, no presolve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...]
    value: Fraction


def solve_lp(
    objective: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
) -> LPResult:
    """Maximize ``objective . x`` over x >= 0 with the given constraints."""
    c = [Fraction(v) for v in objective]
    n = len(c)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    needs_artificial: list[bool] = []

    for row, b in zip(a_ub, b_ub, strict=True):
        if len(row) != n:
            raise ValueError("inequality row length does not match objective")
        coeffs = [Fraction(v) for v in row]
        b = Fraction(b)
        if b < 0:
            # flip to keep rhs nonnegative; slack coefficient becomes -1
            rows.append([-v for v in coeffs] + [Fraction(-1)])
            rhs.append(-b)
            needs_artificial.append(True)
        else:
            rows.append(coeffs + [Fraction(1)])
            rhs.append(b)
            needs_artificial.append(False)

    slack_count = len(rows)
    # pad earlier rows as slack columns accumulate
    for i, row in enumerate(rows):
        slack_col = row[n:]
        rows[i] = row[:n] + [Fraction(0)] * i + slack_col + [Fraction(0)] * (slack_count - i - 1)

    for row, b in zip(a_eq, b_eq, strict=True):
        if len(row) != n:
            raise ValueError("equality row length does not match objective")
        coeffs = [Fraction(v) for v in row]
        b = Fraction(b)
        if b < 0:
            coeffs = [-v for v in coeffs]
            b = -b
        rows.append(coeffs + [Fraction(0)] * slack_count)
        rhs.append(b)
        needs_artificial.append(True)

    m = len(rows)
    width = n + slack_count
    art_cols: dict[int, int] = {}  # row index -> artificial column
    basis: list[int] = [-1] * m
    for i in range(m):
        if needs_artificial[i]:
            art_cols[i] = width
            width += 1
    for i in range(m):
        row = rows[i]
        row.extend(Fraction(0) for _ in range(width - len(row)))
        if i in art_cols:
            row[art_cols[i]] = Fraction(1)
            basis[i] = art_cols[i]
        else:
            basis[i] = n + i  # its own slack, coefficient +1 by construction

    tableau = [rows[i] + [rhs[i]] for i in range(m)]

    if art_cols:
        # phase 1: maximize -sum(artificials); objective row holds -c, so +1 there
        z = [Fraction(0)] * (width + 1)
        for col in art_cols.values():
            z[col] = Fraction(1)
        _price_out(z, tableau, basis)
        _pivot_until_optimal(tableau, basis, z, allow_unbounded=False)
        if z[-1] != 0:
            return LPResult(INFEASIBLE, (), Fraction(0))
        _drive_out_artificials(tableau, basis, set(art_cols.values()))
        artificial = set(art_cols.values())
    else:
        artificial = set()

    # phase 2; artificial columns stay in the tableau but are never eligible to enter
    z = [Fraction(0)] * (width + 1)
    for j in range(n):
        z[j] = -c[j]
    _price_out(z, tableau, basis)
    status = _pivot_until_optimal(tableau, basis, z, allow_unbounded=True, blocked=artificial)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, (), Fraction(0))

    x = [Fraction(0)] * n
    for i, col in enumerate(basis):
        if col < n:
            x[col] = tableau[i][-1]
    return LPResult(OPTIMAL, tuple(x), z[-1])


def _price_out(z: list, tableau: list, basis: list[int]) -> None:
    """Zero the reduced costs of basic columns (z holds negated costs, value at z[-1])."""
    for i, col in enumerate(basis):
        factor = z[col]
        if factor != 0:
            row = tableau[i]
            for j in range(len(z)):
                z[j] -= factor * row[j]


def _pivot_until_optimal(
    tableau: list,
    basis: list[int],
    z: list,
    allow_unbounded: bool,
    blocked: set[int] = frozenset(),
) -> str:
    width = len(z) - 1
    while True:
        entering = -1
        for j in range(width):  # Bland: smallest eligible index
            if j not in blocked and z[j] < 0:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        leaving = -1
        best_ratio = None
        for i, row in enumerate(tableau):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            if allow_unbounded:
                return UNBOUNDED
            raise ArithmeticError("phase-1 problem cannot be unbounded")
        _pivot(tableau, basis, z, leaving, entering)


def _pivot(tableau: list, basis: list[int], z: list, i: int, j: int) -> None:
    row = tableau[i]
    factor = row[j]
    tableau[i] = [v / factor for v in row]
    row = tableau[i]
    for k, other in enumerate(tableau):
        if k != i and other[j] != 0:
            f = other[j]
            tableau[k] = [a - f * b for a, b in zip(other, row)]
    if z[j] != 0:
        f = z[j]
        for idx in range(len(z)):
            z[idx] -= f * row[idx]
    basis[i] = j


def _drive_out_artificials(tableau: list, basis: list[int], artificial: set[int]) -> None:
    """Pivot zero-valued basic artificials out on any nonzero structural column."""
    for i in range(len(basis)):
        if basis[i] in artificial:
            row = tableau[i]
            pivot_col = next(
                (j for j in range(len(row) - 1) if j not in artificial and row[j] != 0),
                None,
            )
            if pivot_col is not None:
                zeros = [Fraction(0)] * len(row)
                _pivot(tableau, basis, zeros, i, pivot_col)
            # else: redundant all-zero row; its artificial stays basic at value 0
