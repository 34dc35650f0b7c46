"""Statevector simulation of Grover and Eigenmarking search for entailment model checking."""
from .errors import (
    ConfigurationError,
    EigenmarkError,
    EvaluationError,
    GateError,
    MetricError,
    ParseError,
)
from .logic import KnowledgeBase, entails, evaluate, free_variables, parse, parse_kb, truth_table
from .oracle import (
    AnswerSet,
    CompiledOracle,
    CompiledPhaseOracle,
    PhaseOracle,
    compile_formula,
    entailment_probe_circuit,
    phase_oracle,
    violation_oracle,
)
from .schemes import (
    SchemeId,
    SchemeRun,
    grover_iterations,
    measure_run,
    run_conventional,
    run_grover,
    run_scheme,
    run_simpler,
    run_subtle,
)
from .statevector import (
    Circuit,
    Gate,
    GateKind,
    QubitLayout,
    StateVector,
    apply_circuit,
    apply_gate,
    new_ground_state,
    probabilities,
    sample_shots,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerSet",
    "apply_circuit",
    "apply_gate",
    "Circuit",
    "compile_formula",
    "CompiledOracle",
    "CompiledPhaseOracle",
    "ConfigurationError",
    "EigenmarkError",
    "entailment_probe_circuit",
    "entails",
    "evaluate",
    "EvaluationError",
    "free_variables",
    "Gate",
    "GateError",
    "GateKind",
    "grover_iterations",
    "KnowledgeBase",
    "measure_run",
    "MetricError",
    "new_ground_state",
    "parse",
    "parse_kb",
    "ParseError",
    "phase_oracle",
    "PhaseOracle",
    "probabilities",
    "QubitLayout",
    "run_conventional",
    "run_grover",
    "run_scheme",
    "run_simpler",
    "run_subtle",
    "sample_shots",
    "SchemeId",
    "SchemeRun",
    "StateVector",
    "truth_table",
    "violation_oracle",
]

