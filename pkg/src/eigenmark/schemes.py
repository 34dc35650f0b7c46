"""Grover search and the three Eigenmarking search procedures.

Register layouts (qubit index -> role), least significant first:

===============  ====================================  =======================
scheme           qubits                                label order
===============  ====================================  =======================
grover           y, x0..x{n-1}                         x{n-1}..x0 y
conventional     y, x0..x{n-1}, t0, t1                 t1 t0 x{n-1}..x0 y
subtle           y, x0..x{n-1}, t                      t y x{n-1}..x0
simpler          y, x0..x{n-1}, t                      t y x{n-1}..x0
===============  ====================================  =======================

Oracle ancillas (flag and work qubits of a compiled oracle) sit above the
scheme register. They return to |0> after each oracle call, are excluded from
inversion about the mean, and are marginalized out of measurements.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigurationError
from .oracle import AnswerSet, CompiledPhaseOracle, PhaseOracle, phase_oracle
from .statevector import (
    MAX_QUBITS,
    QubitLayout,
    StateVector,
    apply_circuit,
    apply_gate,
    ccz,
    crz,
    diffusion,
    h,
    marginal_probabilities,
    mcrz,
    new_ground_state,
    sample_counts,
    x,
)

Oracle = Union[PhaseOracle, CompiledPhaseOracle]


class SchemeId(str, enum.Enum):
    GROVER = "grover"
    CONVENTIONAL = "conventional"
    SUBTLE = "subtle"
    SIMPLER = "simpler"

    @classmethod
    def parse(cls, value) -> "SchemeId":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"conv": "conventional", "convention": "conventional"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ConfigurationError(f"unknown scheme {value!r}; choose from {names}") from None

    @property
    def oracle_theta(self) -> float:
        return math.pi / 2 if self is SchemeId.CONVENTIONAL else math.pi

    @property
    def tag_count(self) -> int:
        return {"grover": 0, "conventional": 2, "subtle": 1, "simpler": 1}[self.value]


EIGENMARKING = (SchemeId.CONVENTIONAL, SchemeId.SUBTLE, SchemeId.SIMPLER)


def scheme_layout(scheme: SchemeId | str, n: int) -> QubitLayout:
    scheme = SchemeId.parse(scheme)
    if n < 1:
        raise ConfigurationError("need at least one input qubit")
    roles = {"y": 0}
    roles.update({f"x{k}": k + 1 for k in range(n)})
    xs_desc = [k + 1 for k in range(n - 1, -1, -1)]
    if scheme is SchemeId.GROVER:
        order = xs_desc + [0]
    elif scheme is SchemeId.CONVENTIONAL:
        roles["t0"] = n + 1
        roles["t1"] = n + 2
        order = [n + 2, n + 1] + xs_desc + [0]
    else:
        roles["t"] = n + 1
        order = [n + 1, 0] + xs_desc
    return QubitLayout(len(roles), roles, tuple(order))


def input_qubits(layout: QubitLayout, n: int) -> list[int]:
    return [layout[f"x{k}"] for k in range(n)]


@dataclass
class SchemeRun:
    scheme: SchemeId
    n: int
    oracle: Oracle
    final_state: StateVector
    layout: QubitLayout
    iterations: int = 1
    trace: list[StateVector] = field(default_factory=list, repr=False)

    @property
    def answers(self) -> AnswerSet:
        return self.oracle.answers

    def probabilities(self) -> np.ndarray:
        """Probabilities over the scheme register only (oracle ancillas summed out)."""
        qubits = list(range(self.layout.num_qubits))
        if self.final_state.num_qubits == len(qubits):
            return np.abs(self.final_state.amplitudes) ** 2
        return marginal_probabilities(self.final_state, qubits)

    def label(self, index: int) -> str:
        return self.layout.label(index)

    def label_probabilities(self) -> dict[str, float]:
        p = self.probabilities()
        return {self.label(i): float(v) for i, v in enumerate(p)}


def grover_iterations(N: int, k: int = 1, approximate: bool = False) -> int:
    """Number of oracle+diffusion rounds that best concentrates k answers among N."""
    if N < 2:
        raise ConfigurationError("search space needs at least 2 states")
    if not 1 <= k <= N - 1:
        raise ConfigurationError(f"answer count must be in 1..{N - 1}, got {k}")
    if approximate:
        return int(round(math.pi / 4 * math.sqrt(N / k) - 0.5))
    angle = math.asin(math.sqrt(k / N))
    upper = math.ceil(math.pi / 4 * math.sqrt(N / k)) + 1
    # at least one round; near-ties go to the smaller count
    miss = np.array([math.cos((2 * j + 1) * angle) ** 2 for j in range(1, upper + 1)])
    return 1 + int(np.flatnonzero(miss <= miss.min() + 1e-12)[0])


def _coerce_oracle(oracle, n: int, theta: float) -> Oracle:
    if isinstance(oracle, AnswerSet):
        oracle = phase_oracle(oracle, theta)
    if oracle.n != n:
        raise ConfigurationError(f"oracle acts on {oracle.n} inputs, scheme has {n}")
    if not math.isclose(oracle.theta, theta, abs_tol=1e-12):
        raise ConfigurationError(f"oracle angle {oracle.theta} != required {theta}")
    return oracle


def _register(layout: QubitLayout, oracle: Oracle) -> tuple[StateVector, list[int]]:
    m = layout.num_qubits + oracle.extra_qubits
    if m > MAX_QUBITS:
        raise ConfigurationError(f"scheme plus oracle needs {m} qubits, cap is {MAX_QUBITS}")
    ancillas = list(range(layout.num_qubits, m))
    return new_ground_state(m), ancillas


def _hadamards(qubits):
    return [h(q) for q in qubits]


def run_grover(n: int, oracle: Oracle | AnswerSet, iterations: int | None = None,
               record: bool = False) -> SchemeRun:
    """Standard Grover search with y held in |1>.

    ``iterations`` defaults to :func:`grover_iterations` for the oracle's answer
    count (1 when there are no answers or every input is an answer).
    """
    oracle = _coerce_oracle(oracle, n, math.pi)
    layout = scheme_layout(SchemeId.GROVER, n)
    xs, y = input_qubits(layout, n), layout["y"]
    if iterations is None:
        k = len(oracle.answers)
        iterations = grover_iterations(1 << n, k) if 0 < k < 1 << n else 1
    if iterations < 0:
        raise ConfigurationError("iteration count must be non-negative")
    state, anc = _register(layout, oracle)
    trace = [state] if record else []
    state = apply_circuit(state, [x(y)] + _hadamards(xs))
    for _ in range(iterations):
        state = oracle.apply(state, xs, y, anc)
        if record:
            trace.append(state)
        state = apply_gate(state, diffusion(xs))
        if record:
            trace.append(state)
    return SchemeRun(SchemeId.GROVER, n, oracle, state, layout, iterations, trace)


def run_conventional(n: int, oracle: Oracle | AnswerSet, record: bool = False) -> SchemeRun:
    """Two tag qubits, pi/2 oracle, opposite controlled phases, global inversion."""
    oracle = _coerce_oracle(oracle, n, math.pi / 2)
    layout = scheme_layout(SchemeId.CONVENTIONAL, n)
    xs, y = input_qubits(layout, n), layout["y"]
    t0, t1 = layout["t0"], layout["t1"]
    state, anc = _register(layout, oracle)
    trace = [state] if record else []
    state = apply_circuit(state, _hadamards(xs + [y]))
    trace += [state] if record else []
    state = oracle.apply(state, xs, y, anc)
    trace += [state] if record else []
    state = apply_circuit(state, [h(t1), h(t0), crz(y, t0, math.pi / 2), crz(y, t1, -math.pi / 2)])
    trace += [state] if record else []
    state = apply_gate(state, diffusion(range(layout.num_qubits)))
    trace += [state] if record else []
    return SchemeRun(SchemeId.CONVENTIONAL, n, oracle, state, layout, 1, trace)


def _run_single_tag(scheme: SchemeId, n: int, oracle, record: bool) -> SchemeRun:
    oracle = _coerce_oracle(oracle, n, math.pi)
    layout = scheme_layout(scheme, n)
    xs, y, t = input_qubits(layout, n), layout["y"], layout["t"]
    state, anc = _register(layout, oracle)
    trace = [state] if record else []
    state = apply_circuit(state, _hadamards(range(layout.num_qubits)))
    trace += [state] if record else []
    state = oracle.apply(state, xs, y, anc)
    trace += [state] if record else []
    if scheme is SchemeId.SUBTLE:
        mark = mcrz([t] + xs, y, math.pi)
    else:
        mark = ccz(t, xs[-1], y)
    state = apply_gate(state, mark)
    trace += [state] if record else []
    state = apply_gate(state, diffusion(range(layout.num_qubits)))
    trace += [state] if record else []
    return SchemeRun(scheme, n, oracle, state, layout, 1, trace)


def run_subtle(n: int, oracle: Oracle | AnswerSet, record: bool = False) -> SchemeRun:
    """One tag qubit; pi phase on y controlled by t and every input qubit."""
    return _run_single_tag(SchemeId.SUBTLE, n, oracle, record)


def run_simpler(n: int, oracle: Oracle | AnswerSet, record: bool = False) -> SchemeRun:
    """One tag qubit; CCZ on (t, most significant input, y) regardless of n."""
    return _run_single_tag(SchemeId.SIMPLER, n, oracle, record)


def run_scheme(scheme: SchemeId | str, n: int, oracle: Oracle | AnswerSet,
               record: bool = False, iterations: int | None = None) -> SchemeRun:
    scheme = SchemeId.parse(scheme)
    if scheme is SchemeId.GROVER:
        return run_grover(n, oracle, iterations, record)
    if iterations not in (None, 1):
        raise ConfigurationError("Eigenmarking schemes run a single pass")
    runner = {SchemeId.CONVENTIONAL: run_conventional, SchemeId.SUBTLE: run_subtle,
              SchemeId.SIMPLER: run_simpler}[scheme]
    return runner(n, oracle, record)


def measure_run(run: SchemeRun, shots: int, seed: int) -> dict[str, int]:
    """Sample the scheme register; keys follow the scheme's label order."""
    counts = sample_counts(run.probabilities(), shots, seed)
    return {run.label(i): int(c) for i, c in enumerate(counts) if c}
