"""Verification laboratory for a two-observer all-versus-nothing Bell argument.

Submodules: ``hilbert`` (16-dimensional simulation core), ``avn`` (parity
constraint systems and the 1 = -1 witness), ``game`` (nonlocal-game values and
simulation), ``loophole`` (detection-efficiency thresholds), ``bell`` (the
two-observer Bell inequality), ``cli`` (reproducible reports).
"""

from .avn import (
    ConstraintSystem,
    MaxSatResult,
    ParityConstraint,
    WitnessResult,
    constraint_system,
    infeasibility_witness,
    max_satisfiable,
    satisfied_count,
)
from .bell import (
    BellExpression,
    BellReport,
    bell_expression,
    bell_report,
    lhv_bound,
    max_violation_check,
    noise_threshold,
)
from .game import (
    GameSpec,
    classical_value,
    new_game_spec,
    old_game_spec,
    quantum_value,
    simulate_rounds,
)
from .hilbert import (
    LocalObservable,
    ObservableWord,
    StateVector,
    apply_word,
    cluster_state,
    expectation,
    local_observable,
    max_eigenvalue,
    sample_joint_measurement,
    verify_stabilizers,
    word,
    word_matrix,
)
from .loophole import (
    Ensemble,
    InstructionSheet,
    JointInstruction,
    critical_efficiency,
    efficiency_of,
    optimize_min_efficiency,
    reference_ensemble,
    solve_balance_p,
    verify_reference_optimality,
)

__all__ = [
    "BellExpression",
    "BellReport",
    "ConstraintSystem",
    "Ensemble",
    "GameSpec",
    "InstructionSheet",
    "JointInstruction",
    "LocalObservable",
    "MaxSatResult",
    "ObservableWord",
    "ParityConstraint",
    "StateVector",
    "WitnessResult",
    "apply_word",
    "bell_expression",
    "bell_report",
    "classical_value",
    "cluster_state",
    "constraint_system",
    "critical_efficiency",
    "efficiency_of",
    "expectation",
    "infeasibility_witness",
    "lhv_bound",
    "local_observable",
    "max_eigenvalue",
    "max_satisfiable",
    "max_violation_check",
    "new_game_spec",
    "noise_threshold",
    "old_game_spec",
    "optimize_min_efficiency",
    "reference_ensemble",
    "quantum_value",
    "sample_joint_measurement",
    "satisfied_count",
    "simulate_rounds",
    "solve_balance_p",
    "verify_reference_optimality",
    "verify_stabilizers",
    "word",
    "word_matrix",
]

__version__ = "0.1.0"
