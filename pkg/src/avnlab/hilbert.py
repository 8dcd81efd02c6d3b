"""Exact complex linear algebra on the 16-dimensional two-photon space.

Each photon carries a polarization qubit (H/V) and a path qubit (u/d), so a
joint state lives in a 16-dimensional Hilbert space.  Basis vectors are indexed
by ``b = 8*pol1 + 4*path1 + 2*pol2 + path2`` with H, u -> 0 and V, d -> 1; the
first photon's slots occupy the high-order bits.  This module builds the
two-photon cluster state, products of single-slot observables, expectation
values, the nine perfect-correlation checks, and Born-rule sampling of joint
measurements.  All operations are pure; random sampling takes an explicit
``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from itertools import product

import numpy as np

DIM = 16

#: Norm / residual tolerance for exact identities (amplitudes here are dyadic,
#: so these checks normally come out at exactly 0).
ATOL = 1e-12

#: Tolerance below which an expectation value's imaginary part is discarded.
IMAG_TOL = 1e-9


class MalformedWordError(ValueError):
    """An observable product (or measurement request) repeats a slot."""


class HermiticityError(ValueError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class ConsistencyError(RuntimeError):
    """An internal numerical identity failed (e.g. complex expectation)."""


class Slot(IntEnum):
    """The four single-qubit slots, ordered pol1 < path1 < pol2 < path2."""

    POL1 = 0
    PATH1 = 1
    POL2 = 2
    PATH2 = 3

    @property
    def photon(self) -> int:
        return 1 if self in (Slot.POL1, Slot.PATH1) else 2

    @property
    def is_path(self) -> bool:
        return self in (Slot.PATH1, Slot.PATH2)


SLOTS = (Slot.POL1, Slot.PATH1, Slot.POL2, Slot.PATH2)

_AXIS_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_IDENTITY2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class LocalObservable:
    """A single Pauli axis acting on one slot.

    The axis matrices in the (H,V) or (u,d) ordered basis are exactly
    X = [[0,1],[1,0]], Y = [[0,-i],[i,0]] (so Y|H> = i|V>), and
    Z = [[1,0],[0,-1]].
    """

    slot: Slot
    axis: str

    def __post_init__(self) -> None:
        if self.axis not in _AXIS_MATRICES:
            raise ValueError(f"unknown axis {self.axis!r}; expected X, Y or Z")

    def matrix2(self) -> np.ndarray:
        """The 2x2 matrix of this observable on its own slot."""
        return _AXIS_MATRICES[self.axis]

    @property
    def symbol(self) -> str:
        """Conventional name: uppercase axis for polarization, lowercase for path."""
        letter = self.axis.lower() if self.slot.is_path else self.axis
        return f"{letter}{self.slot.photon}"

    def __str__(self) -> str:
        return self.symbol


def local_observable(symbol: str) -> LocalObservable:
    """Parse a symbol like ``"X1"``, ``"y2"`` or ``"z1"`` into a LocalObservable.

    Uppercase letters denote polarization observables, lowercase path
    observables; the digit selects the photon.  Compound symbols such as
    ``"Z1z1"`` are not single-slot observables and are rejected.
    """
    if len(symbol) != 2 or symbol[0].upper() not in "XYZ" or symbol[1] not in "12":
        raise ValueError(f"{symbol!r} is not a single-slot observable symbol")
    letter, photon = symbol[0], int(symbol[1])
    if letter.isupper():
        slot = Slot.POL1 if photon == 1 else Slot.POL2
    else:
        slot = Slot.PATH1 if photon == 1 else Slot.PATH2
    return LocalObservable(slot, letter.upper())


@dataclass(frozen=True)
class ObservableWord:
    """A signed product of local observables on pairwise distinct slots.

    The induced 16x16 matrix is Hermitian and squares to the identity.  An
    empty factor tuple is the (signed) identity word.
    """

    sign: int = 1
    factors: tuple[LocalObservable, ...] = ()

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        slots = [f.slot for f in self.factors]
        if len(set(slots)) != len(slots):
            raise MalformedWordError(f"duplicate slots in word {self.factors}")
        # canonical order: sort factors by slot
        object.__setattr__(
            self, "factors", tuple(sorted(self.factors, key=lambda f: f.slot))
        )

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(f.symbol for f in self.factors)

    def __str__(self) -> str:
        body = " ".join(self.symbols) if self.factors else "1"
        return body if self.sign == 1 else f"-{body}"


def word(symbols: str, sign: int = 1) -> ObservableWord:
    """Build an ObservableWord from whitespace-separated symbols, e.g. ``"X1 X2 z2"``."""
    return ObservableWord(sign, tuple(local_observable(s) for s in symbols.split()))


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized pure state: 16 complex amplitudes in the documented basis."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if amps.shape != (DIM,):
            raise ValueError(f"expected {DIM} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > ATOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


def basis_index(pol1: int, path1: int, pol2: int, path2: int) -> int:
    # b = 8*pol1 + 4*path1 + 2*pol2 + path2; H,u -> 0, V,d -> 1
    return 8 * pol1 + 4 * path1 + 2 * pol2 + path2


def basis_label(index: int) -> str:
    """Render a basis index as e.g. ``"HuHu"`` (pol1 path1 pol2 path2)."""
    bits = [(index >> k) & 1 for k in (3, 2, 1, 0)]
    return "".join(
        ("HV"[bits[0]], "ud"[bits[1]], "HV"[bits[2]], "ud"[bits[3]])
    )


BASIS_LABELS = tuple(basis_label(b) for b in range(DIM))


def basis_state(which: int | str) -> StateVector:
    """The computational basis state for an index or a label like ``"HuHu"``."""
    index = BASIS_LABELS.index(which) if isinstance(which, str) else which
    amps = np.zeros(DIM, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def normalized(amplitudes: np.ndarray) -> StateVector:
    """Normalize raw amplitudes into a StateVector."""
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return StateVector(amps / norm)


def cluster_state() -> StateVector:
    """The two-photon polarization/path cluster state.

    Returns (|HuHu> + |HdHd> + |VuVu> - |VdVd>)/2, the two-photon embodiment of
    the four-qubit cluster state.
    """
    amps = np.zeros(DIM, dtype=complex)
    amps[basis_index(0, 0, 0, 0)] = 0.5   # |HuHu>
    amps[basis_index(0, 1, 0, 1)] = 0.5   # |HdHd>
    amps[basis_index(1, 0, 1, 0)] = 0.5   # |VuVu>
    amps[basis_index(1, 1, 1, 1)] = -0.5  # |VdVd>
    return StateVector(amps)


def word_matrix(w: ObservableWord) -> np.ndarray:
    """The 16x16 matrix of a word: tensor factors in slot order, identity elsewhere."""
    by_slot = {f.slot: f.matrix2() for f in w.factors}
    out = np.array([[1.0 + 0.0j]])
    for slot in SLOTS:
        out = np.kron(out, by_slot.get(slot, _IDENTITY2))
    return w.sign * out


def apply_word(w: ObservableWord, state: StateVector) -> StateVector:
    """Apply a word to a state; words are unitary so the norm is preserved."""
    return StateVector(word_matrix(w) @ state.amplitudes)


def expectation(w: ObservableWord, state: StateVector) -> float:
    """<s|W|s>, checked to be real within tolerance before the imaginary part is dropped."""
    amps = state.amplitudes
    value = complex(np.vdot(amps, word_matrix(w) @ amps))
    if abs(value.imag) > IMAG_TOL:
        raise ConsistencyError(
            f"expectation of {w} has imaginary part {value.imag!r}"
        )
    return value.real


#: The nine perfect-correlation words and their eigenvalue signs; the order
#: here is the order every sign-pattern report uses.
STABILIZER_WORDS: tuple[tuple[str, int], ...] = (
    ("X1 X2 z2", +1),
    ("Y1 Y2 z2", -1),
    ("x1 Z2 x2", +1),
    ("X1 z1 X2", +1),
    ("Y1 z1 Y2", -1),
    ("Z1 y1 y2", -1),
    ("z1 z2", +1),
    ("X1 x1 Y2 y2", +1),
    ("Y1 x1 X2 y2", +1),
)


@dataclass(frozen=True)
class StabilizerCheck:
    word: ObservableWord
    expected_sign: int
    residual: float


@dataclass(frozen=True)
class StabilizerReport:
    """Residual norms ||W s - sign*s|| for the nine stabilizer words."""

    checks: tuple[StabilizerCheck, ...]

    @property
    def max_residual(self) -> float:
        return max(c.residual for c in self.checks)

    def all_within(self, tolerance: float = ATOL) -> bool:
        return all(c.residual < tolerance for c in self.checks)


def verify_stabilizers(state: StateVector) -> StabilizerReport:
    """Check the nine stabilizer equations W|s> = sign |s> on a state."""
    checks = []
    for symbols, sign in STABILIZER_WORDS:
        w = word(symbols)
        delta = word_matrix(w) @ state.amplitudes - sign * state.amplitudes
        checks.append(
            StabilizerCheck(w, sign, float(np.linalg.norm(delta)))
        )
    return StabilizerReport(tuple(checks))


def joint_outcome_distribution(
    state: StateVector, observables: tuple[LocalObservable, ...] | list[LocalObservable]
) -> tuple[tuple[tuple[int, ...], ...], np.ndarray]:
    """Born distribution of a joint measurement of commuting observables.

    The observables must act on pairwise distinct slots.  Returns all
    2^k outcome tuples (values in +1/-1, matching the order of ``observables``)
    and their probabilities ||prod_i (I + v_i W_i)/2 |s>||^2.
    """
    observables = tuple(observables)
    slots = [o.slot for o in observables]
    if len(set(slots)) != len(slots):
        raise MalformedWordError(f"duplicate slots in measurement request {observables}")
    matrices = [word_matrix(ObservableWord(1, (o,))) for o in observables]
    outcomes = tuple(product((1, -1), repeat=len(observables)))
    probs = np.empty(len(outcomes), dtype=float)
    for i, values in enumerate(outcomes):
        vec = state.amplitudes
        for value, mat in zip(values, matrices):
            vec = 0.5 * (vec + value * (mat @ vec))
        probs[i] = float(np.vdot(vec, vec).real)
    return outcomes, probs


def draw_indices(probabilities: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling of ``n`` category indices; zero-probability categories

    are never selected (a boundary hit resolves to the next category with mass).
    """
    cum = np.cumsum(probabilities)
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return np.minimum(idx, len(cum) - 1)


def sample_joint_measurement(
    state: StateVector,
    observables: tuple[LocalObservable, ...] | list[LocalObservable],
    rng: np.random.Generator,
) -> dict[LocalObservable, int]:
    """Draw one outcome record for a joint measurement on distinct slots."""
    observables = tuple(observables)
    outcomes, probs = joint_outcome_distribution(state, observables)
    index = int(draw_indices(probs, 1, rng)[0])
    return dict(zip(observables, outcomes[index]))


def max_eigenvalue(matrix: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix (checked within 1e-9)."""
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if float(np.max(np.abs(mat - mat.conj().T))) > 1e-9:
        raise HermiticityError("matrix is not Hermitian within 1e-9")
    return float(np.linalg.eigvalsh(mat)[-1])
