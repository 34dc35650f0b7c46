"""Quantum oracles for search.

Two forms are provided. A :class:`PhaseOracle` is a diagonal operator built
straight from an answer set; it is what the two-qubit scenario sweeps use.
A :class:`CompiledOracle` is a reversible X/CX/CCX network computing a
formula into a target qubit, with one work qubit per internal syntax-tree
node, uncomputed by mirroring. :class:`CompiledPhaseOracle` turns the latter
into the former by computing into a flag qubit, applying a controlled phase
onto the search ancilla, and uncomputing.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import logic
from .errors import ConfigurationError
from .logic import And, Formula, Iff, Implies, KnowledgeBase, Not, Or, Var
from .statevector import (
    MAX_QUBITS,
    Circuit,
    Gate,
    QubitLayout,
    StateVector,
    apply_circuit,
    ccx,
    crz,
    cx,
    h,
    x,
)


@dataclass(frozen=True)
class AnswerSet:
    """Input values ``x`` (as integers, bit k = x_k) for which f(x) = 1."""

    n: int
    answers: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError("answer sets need at least one input qubit")
        object.__setattr__(self, "answers", frozenset(int(a) for a in self.answers))
        bad = [a for a in self.answers if not 0 <= a < 1 << self.n]
        if bad:
            raise ConfigurationError(f"answers {bad} do not fit in {self.n} bits")

    @classmethod
    def from_bitstrings(cls, n: int, bitstrings: Iterable[str]) -> "AnswerSet":
        values = []
        for b in bitstrings:
            b = b.strip()
            if len(b) != n or set(b) - {"0", "1"}:
                raise ConfigurationError(f"answer {b!r} is not an {n}-bit bitstring")
            values.append(int(b, 2))
        return cls(n, frozenset(values))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "AnswerSet":
        """Inverse of :attr:`mask`: bit b of ``mask`` set means input b is an answer."""
        if not 0 <= mask < 1 << (1 << n):
            raise ConfigurationError(f"scenario mask {mask} out of range for n={n}")
        return cls(n, frozenset(b for b in range(1 << n) if (mask >> b) & 1))

    @property
    def mask(self) -> int:
        return sum(1 << a for a in self.answers)

    def bitstrings(self) -> list[str]:
        return [format(a, f"0{self.n}b") for a in sorted(self.answers)]

    def __len__(self):
        return len(self.answers)

    def __contains__(self, value):
        return value in self.answers


def _input_values(m: int, x_qubits: Sequence[int]) -> np.ndarray:
    idx = np.arange(1 << m)
    xv = np.zeros_like(idx)
    for k, q in enumerate(x_qubits):
        xv |= ((idx >> q) & 1) << k
    return xv


@dataclass(frozen=True)
class PhaseOracle:
    """Multiplies |x, y=1> by exp(i*theta) for every answer x; identity elsewhere."""

    answers: AnswerSet
    theta: float
    extra_qubits: int = field(default=0, init=False)

    @property
    def n(self) -> int:
        return self.answers.n

    def diagonal(self, m: int, x_qubits: Sequence[int], y: int) -> np.ndarray:
        idx = np.arange(1 << m)
        hit = np.isin(_input_values(m, x_qubits), sorted(self.answers.answers))
        hit &= ((idx >> y) & 1).astype(bool)
        return np.where(hit, np.exp(1j * self.theta), 1.0 + 0j)

    def apply(self, state: StateVector, x_qubits: Sequence[int], y: int,
              ancillas: Sequence[int] = ()) -> StateVector:
        if len(x_qubits) != self.n:
            raise ConfigurationError(f"oracle expects {self.n} input qubits")
        d = self.diagonal(state.num_qubits, x_qubits, y)
        return StateVector(state.num_qubits, state.amplitudes * d)


def phase_oracle(answers: AnswerSet, theta: float) -> PhaseOracle:
    return PhaseOracle(answers, float(theta))


@dataclass(frozen=True)
class CompiledOracle:
    """Reversible circuit mapping |x, y, w=0> to |x, y XOR f(x), w=0>.

    Canonical register: input ``x_k`` on qubit k, target ``y`` on qubit n,
    work qubit ``w_j`` on qubit n+1+j.
    """

    circuit: Circuit
    variables: tuple[str, ...]
    work_count: int
    table: np.ndarray
    formula: Formula

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def num_qubits(self) -> int:
        return self.n + 1 + self.work_count

    @property
    def layout(self) -> QubitLayout:
        return self.circuit.layout

    def answers(self) -> AnswerSet:
        return AnswerSet(self.n, frozenset(np.flatnonzero(self.table).tolist()))

    def remap(self, x_qubits: Sequence[int], target: int,
              work: Sequence[int], num_qubits: int) -> Circuit:
        """The same gates placed on another register."""
        mapping = dict(enumerate(x_qubits))
        mapping[self.n] = target
        for j, q in enumerate(work):
            mapping[self.n + 1 + j] = q
        if len(mapping) != self.num_qubits or len(set(mapping.values())) != self.num_qubits:
            raise ConfigurationError("qubit mapping must be one-to-one over the oracle register")
        gates = [Gate(g.kind, tuple(mapping[q] for q in g.targets),
                      tuple(mapping[q] for q in g.controls), g.theta)
                 for g in self.circuit.gates]
        return Circuit(num_qubits, gates)


class _Compiler:
    def __init__(self, variables: Sequence[str]):
        self.index = {v: k for k, v in enumerate(variables)}
        self.n = len(variables)
        self.gates: list[Gate] = []
        self.work = 0

    def fresh(self) -> int:
        q = self.n + 1 + self.work
        self.work += 1
        return q

    def node(self, f: Formula) -> int:
        """Emit gates leaving the value of ``f`` on the returned qubit."""
        if isinstance(f, Var):
            return self.index[f.name]
        if isinstance(f, Not):
            c = self.node(f.child)
            w = self.fresh()
            self.gates += [cx(c, w), x(w)]
            return w
        if isinstance(f, Iff):
            return self.node(And(Implies(f.left, f.right), Implies(f.right, f.left)))
        a = self.node(f.left)
        b = self.node(f.right)
        w = self.fresh()
        if isinstance(f, And):
            self.gates += [cx(a, w)] if a == b else [ccx(a, b, w)]
        elif isinstance(f, Or):
            if a == b:
                self.gates += [cx(a, w)]
            else:
                # a | b = !(!a & !b)
                self.gates += [x(a), x(b), ccx(a, b, w), x(a), x(b), x(w)]
        elif isinstance(f, Implies):
            if a == b:
                self.gates += [x(w)]
            else:
                # a -> b = !(a & !b)
                self.gates += [x(b), ccx(a, b, w), x(b), x(w)]
        return w


def _count_work(f: Formula) -> int:
    if isinstance(f, Var):
        return 0
    if isinstance(f, Not):
        return 1 + _count_work(f.child)
    if isinstance(f, Iff):
        # rewritten as (l -> r) & (r -> l), which compiles both sides twice
        return 3 + 2 * (_count_work(f.left) + _count_work(f.right))
    return 1 + _count_work(f.left) + _count_work(f.right)


def oracle_layout(n: int, work: int) -> QubitLayout:
    roles = {f"x{k}": k for k in range(n)}
    roles["y"] = n
    roles.update({f"w{j}": n + 1 + j for j in range(work)})
    order = tuple([n] + list(range(n - 1, -1, -1)))
    return QubitLayout(n + 1 + work, roles, order)


def compile_formula(f: Formula, variables: Sequence[str] | None = None,
                    max_qubits: int = MAX_QUBITS) -> CompiledOracle:
    """Compile ``f`` into a reversible circuit writing f(x) onto the target qubit."""
    if variables is None:
        variables = logic.free_variables(f)
    variables = tuple(variables)
    missing = [v for v in logic.free_variables(f) if v not in variables]
    if missing:
        raise ConfigurationError(f"variable list lacks {missing}")
    n = len(variables)
    need = _count_work(f)
    if n + 1 + need > max_qubits:
        raise ConfigurationError(
            f"formula needs {need} work qubits ({n + 1 + need} total), over the cap of {max_qubits}"
        )
    comp = _Compiler(variables)
    root = comp.node(f)
    assert comp.work == need
    y = n
    compute = list(comp.gates)
    gates = compute + [cx(root, y)] + [g.inverse() for g in reversed(compute)]
    circuit = Circuit(n + 1 + need, gates, oracle_layout(n, need))
    return CompiledOracle(circuit, variables, need, logic.truth_table(f, variables), f)


def violation_formula(kb: KnowledgeBase | Formula, query: Formula) -> Formula:
    alpha = kb.formula() if isinstance(kb, KnowledgeBase) else kb
    return And(alpha, Not(query))


def violation_oracle(kb: KnowledgeBase | Formula, query: Formula,
                     variables: Sequence[str] | None = None) -> CompiledOracle:
    """Oracle for f(x) = kb(x) AND NOT query(x); its true rows are the violations."""
    f = violation_formula(kb, query)
    if variables is None:
        variables = logic.free_variables(kb, query)
    return compile_formula(f, variables)


def entailment_probe_circuit(kb: KnowledgeBase | Formula, query: Formula,
                             variables: Sequence[str] | None = None) -> Circuit:
    """H on every input, then (NOT kb OR query) into y.

    Measuring y = 0 on any shot exhibits a violation; y = 1 everywhere means
    the knowledge base entails the query.
    """
    alpha = kb.formula() if isinstance(kb, KnowledgeBase) else kb
    if variables is None:
        variables = logic.free_variables(kb, query)
    compiled = compile_formula(Or(Not(alpha), query), variables)
    gates = [h(k) for k in range(compiled.n)] + list(compiled.circuit.gates)
    return Circuit(compiled.num_qubits, gates, compiled.layout)


@dataclass(frozen=True)
class CompiledPhaseOracle:
    """Phase oracle realized by a compiled circuit on extra flag and work qubits."""

    compiled: CompiledOracle
    theta: float

    @property
    def n(self) -> int:
        return self.compiled.n

    @property
    def extra_qubits(self) -> int:
        return 1 + self.compiled.work_count

    @property
    def answers(self) -> AnswerSet:
        return self.compiled.answers()

    def circuit(self, num_qubits: int, x_qubits: Sequence[int], y: int,
                ancillas: Sequence[int]) -> Circuit:
        if len(ancillas) != self.extra_qubits:
            raise ConfigurationError(f"oracle needs {self.extra_qubits} ancilla qubits")
        flag, work = ancillas[0], ancillas[1:]
        body = self.compiled.remap(x_qubits, flag, work, num_qubits)
        return Circuit(num_qubits, body.gates + [crz(flag, y, self.theta)] + body.gates)

    def apply(self, state: StateVector, x_qubits: Sequence[int], y: int,
              ancillas: Sequence[int] = ()) -> StateVector:
        return apply_circuit(state, self.circuit(state.num_qubits, x_qubits, y, ancillas))


def dump_circuit(circuit: Circuit) -> str:
    """Text dump: header lines then one ``KIND controls -> targets [theta]`` per gate."""
    lines = [f"# qubits: {circuit.num_qubits}"]
    if circuit.layout is not None:
        roles = " ".join(f"{k}={v}" for k, v in sorted(circuit.layout.roles.items(),
                                                      key=lambda kv: kv[1]))
        lines.append(f"# roles: {roles}")
    lines.append(f"# gates: {len(circuit.gates)}")
    lines.extend(str(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


def load_circuit(text: str) -> Circuit:
    """Parse the output of :func:`dump_circuit` back into a circuit."""
    m = None
    roles = {}
    gates = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            key = key.strip()
            if key == "qubits":
                m = int(value)
            elif key == "roles":
                roles = {k: int(v) for k, v in (p.split("=") for p in value.split())}
            continue
        head, _, tail = line.partition("->")
        kind, ctrl = head.split()
        parts = tail.split()
        controls = () if ctrl == "-" else tuple(int(c) for c in ctrl.split(","))
        targets = tuple(int(t) for t in parts[0].split(","))
        theta = float(parts[1]) if len(parts) > 1 else None
        gates.append(Gate(kind, targets, controls, theta))
    if m is None:
        raise ConfigurationError("circuit dump lacks a '# qubits:' header")
    layout = None
    if roles:
        order = tuple(sorted(roles.values(), reverse=True))
        layout = QubitLayout(m, roles, order)
    return Circuit(m, gates, layout)
