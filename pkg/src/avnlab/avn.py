"""Local-hidden-variable layer: parity constraints over +/-1 value assignments.

A constraint system collects relations "product of values = +/-1" over symbolic
observable ids.  Exhaustive enumeration gives the exact maximum number of
simultaneously satisfiable constraints; GF(2) elimination produces either a
satisfying assignment or a subset of constraints whose product reads 1 = -1,
i.e. a proof that no assignment exists.

Compound ids such as ``Z1z1`` are atomic symbols: no factorization constraint
v(Z1z1) = v(Z1) v(z1) is imposed (imposing one would change the classical
count).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


class CapacityError(ValueError):
    """Universe too large for exhaustive enumeration."""


MAX_ENUMERATION_IDS = 24

NEW_UNIVERSE: tuple[str, ...] = ("X1", "Y1", "x1", "X2", "Y2", "y2", "z2")
OLD_UNIVERSE: tuple[str, ...] = (
    "Z1", "z1", "X1", "x1", "Z1z1", "X1x1",
    "Z2", "z2", "X2", "x2", "Z2x2", "X2z2",
)


@dataclass(frozen=True)
class ParityConstraint:
    """product of assignment values over ``ids`` must equal ``rhs``."""

    ids: tuple[str, ...]
    rhs: int

    def __post_init__(self) -> None:
        if not self.ids:
            raise ValueError("a parity constraint needs at least one id")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError(f"repeated id in constraint {self.ids}")
        if self.rhs not in (1, -1):
            raise ValueError(f"rhs must be +1 or -1, got {self.rhs}")

    def satisfied(self, assignment: Mapping[str, int]) -> bool:
        prod = 1
        for name in self.ids:
            prod *= assignment[name]
        return prod == self.rhs

    def __str__(self) -> str:
        return f"{'.'.join(self.ids)} = {self.rhs:+d}"


@dataclass(frozen=True)
class ConstraintSystem:
    variant: str
    universe: tuple[str, ...]
    constraints: tuple[ParityConstraint, ...]

    def __post_init__(self) -> None:
        known = set(self.universe)
        if len(known) != len(self.universe):
            raise ValueError("universe ids must be distinct")
        for c in self.constraints:
            missing = set(c.ids) - known
            if missing:
                raise ValueError(f"constraint uses unknown ids {sorted(missing)}")

    def to_json_dict(self) -> dict:
        """Canonical JSON form (ids as strings, rhs as +/-1)."""
        return {
            "variant": self.variant,
            "universe": list(self.universe),
            "constraints": [
                {"ids": list(c.ids), "rhs": c.rhs} for c in self.constraints
            ],
        }


def constraint_system(variant: str) -> ConstraintSystem:
    """The four-relation ("new") or nine-relation ("old") value-constraint system."""
    if variant == "new":
        constraints = (
            ParityConstraint(("X1", "X2", "z2"), +1),
            ParityConstraint(("Y1", "Y2", "z2"), -1),
            ParityConstraint(("X1", "x1", "Y2", "y2"), +1),
            ParityConstraint(("Y1", "x1", "X2", "y2"), +1),
        )
        return ConstraintSystem("new", NEW_UNIVERSE, constraints)
    if variant == "old":
        constraints = (
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
        return ConstraintSystem("old", OLD_UNIVERSE, constraints)
    raise ValueError(f"unknown variant {variant!r}; expected 'new' or 'old'")


def satisfied_count(assignment: Mapping[str, int], system: ConstraintSystem) -> int:
    """Number of constraints satisfied by a total +/-1 assignment."""
    missing = set(system.universe) - set(assignment)
    if missing:
        raise ValueError(f"assignment is missing ids {sorted(missing)}")
    for name in system.universe:
        if assignment[name] not in (1, -1):
            raise ValueError(f"assignment value for {name} must be +1 or -1")
    return sum(c.satisfied(assignment) for c in system.constraints)


def _constraint_bits(system: ConstraintSystem) -> tuple[list[int], list[int]]:
    """Per-constraint (id bitmask, rhs bit) with rhs bit 1 meaning rhs = -1."""
    position = {name: i for i, name in enumerate(system.universe)}
    masks, rhs_bits = [], []
    for c in system.constraints:
        mask = 0
        for name in c.ids:
            mask |= 1 << position[name]
        masks.append(mask)
        rhs_bits.append(0 if c.rhs == 1 else 1)
    return masks, rhs_bits


def _mask_to_assignment(mask: int, universe: tuple[str, ...]) -> dict[str, int]:
    # bit set <-> value -1
    return {name: -1 if (mask >> i) & 1 else 1 for i, name in enumerate(universe)}


@dataclass(frozen=True)
class MaxSatResult:
    best: int
    optima_count: int


def max_satisfiable(system: ConstraintSystem) -> MaxSatResult:
    """Exact maximum of satisfied_count over all 2^n assignments, and the number of maximizers."""
    n = len(system.universe)
    if n > MAX_ENUMERATION_IDS:
        raise CapacityError(f"universe has {n} ids; enumeration capped at {MAX_ENUMERATION_IDS}")
    masks, rhs_bits = _constraint_bits(system)
    best = -1
    count = 0
    for assignment in range(1 << n):
        sat = 0
        for mask, rhs_bit in zip(masks, rhs_bits):
            if (assignment & mask).bit_count() % 2 == rhs_bit:
                sat += 1
        if sat > best:
            best, count = sat, 1
        elif sat == best:
            count += 1
    return MaxSatResult(best, count)


@dataclass(frozen=True)
class WitnessResult:
    """Either an infeasibility witness (constraint indices) or a satisfying assignment."""

    witness: tuple[int, ...] | None
    assignment: dict[str, int] | None

    @property
    def satisfiable(self) -> bool:
        return self.witness is None


def infeasibility_witness(system: ConstraintSystem) -> WitnessResult:
    """GF(2) elimination over the constraints.

    Each constraint becomes a GF(2) row (id membership bits, rhs bit).  A subset
    of rows summing to (0 | 1) proves no assignment exists; the subset indices
    are returned.  Otherwise back-substitution yields a satisfying assignment
    (free ids set to +1).
    """
    masks, rhs_bits = _constraint_bits(system)
    # rows: [lhs mask, rhs bit, combination mask over original constraint indices]
    rows = [[m, r, 1 << i] for i, (m, r) in enumerate(zip(masks, rhs_bits))]
    reduced: list[list[int]] = []
    pivots: list[int] = []
    for row in rows:
        lhs, rhs, combo = row
        for p_lhs, p_rhs, p_combo, p_bit in reduced:
            if lhs & p_bit:
                lhs ^= p_lhs
                rhs ^= p_rhs
                combo ^= p_combo
        if lhs == 0:
            if rhs == 1:
                witness = tuple(i for i in range(len(masks)) if (combo >> i) & 1)
                return WitnessResult(witness, None)
            continue  # redundant row
        pivot_bit = lhs & -lhs
        reduced.append((lhs, rhs, combo, pivot_bit))
        pivots.append(pivot_bit)

    # consistent: back-substitute (process in reverse insertion order)
    value_mask = 0  # bit set <-> value -1
    for lhs, rhs, _combo, pivot_bit in reversed(reduced):
        parity = (value_mask & (lhs & ~pivot_bit)).bit_count() % 2
        if parity != rhs:
            value_mask |= pivot_bit
    assignment = _mask_to_assignment(value_mask, system.universe)
    return WitnessResult(None, assignment)


def all_assignments(universe: tuple[str, ...]) -> Iterable[dict[str, int]]:
    """Iterate every total +/-1 assignment over a universe (2^n of them)."""
    n = len(universe)
    if n > MAX_ENUMERATION_IDS:
        raise CapacityError(f"universe has {n} ids; enumeration capped at {MAX_ENUMERATION_IDS}")
    for mask in range(1 << n):
        yield _mask_to_assignment(mask, universe)
