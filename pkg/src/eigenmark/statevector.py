"""Dense statevector simulation over an m-qubit register.

Basis convention: bit ``q`` of a basis index is the value of qubit ``q``, so
qubit 0 is the least significant bit. Bitstring labels are written most
significant qubit first unless a layout supplies another order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, GateError

MAX_QUBITS = 24
NORM_ATOL = 1e-10
RNG_ALGORITHM = "numpy.random.PCG64"

_SQRT1_2 = 1.0 / np.sqrt(2.0)


class GateKind(str, enum.Enum):
    X = "X"
    H = "H"
    Z = "Z"
    RZ = "RZ"
    CX = "CX"
    CZ = "CZ"
    CCZ = "CCZ"
    CCX = "CCX"
    CRZ = "CRZ"
    MCRZ = "MCRZ"
    DIFFUSION = "DIFFUSION"


# kind -> (number of controls or None for "one or more", has angle)
_ARITY = {
    GateKind.X: (0, False),
    GateKind.H: (0, False),
    GateKind.Z: (0, False),
    GateKind.RZ: (0, True),
    GateKind.CX: (1, False),
    GateKind.CZ: (1, False),
    GateKind.CCZ: (2, False),
    GateKind.CCX: (2, False),
    GateKind.CRZ: (1, True),
    GateKind.MCRZ: (None, True),
}


@dataclass(frozen=True)
class Gate:
    """One gate application.

    Every kind except ``DIFFUSION`` is a (possibly controlled) single-target
    gate. ``DIFFUSION`` is inversion about the mean over its target qubits.
    """

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if self.kind is GateKind.DIFFUSION:
            if not self.targets or self.controls:
                raise GateError("DIFFUSION takes one or more targets and no controls")
            if len(set(self.targets)) != len(self.targets):
                raise GateError("DIFFUSION targets repeat a qubit")
            return
        ncontrols, has_theta = _ARITY[self.kind]
        if len(self.targets) != 1:
            raise GateError(f"{self.kind.value} takes exactly one target")
        if ncontrols is None:
            if not self.controls:
                raise GateError("MCRZ needs at least one control")
        elif len(self.controls) != ncontrols:
            raise GateError(f"{self.kind.value} takes {ncontrols} control(s)")
        if has_theta and self.theta is None:
            raise GateError(f"{self.kind.value} needs an angle")
        if not has_theta and self.theta is not None:
            raise GateError(f"{self.kind.value} takes no angle")
        qubits = self.controls + self.targets
        if len(set(qubits)) != len(qubits):
            raise GateError("controls and targets must be disjoint")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def matrix(self) -> np.ndarray:
        """2x2 matrix applied to the target when all controls are 1."""
        k = self.kind
        if k in (GateKind.X, GateKind.CX, GateKind.CCX):
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if k is GateKind.H:
            return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
        if k in (GateKind.Z, GateKind.CZ, GateKind.CCZ):
            return np.diag([1, -1]).astype(complex)
        if k in (GateKind.RZ, GateKind.CRZ, GateKind.MCRZ):
            return np.diag([1, np.exp(1j * self.theta)])
        raise GateError(f"{k.value} has no single-target matrix")

    def inverse(self) -> "Gate":
        if self.theta is None:
            return self
        return Gate(self.kind, self.targets, self.controls, -self.theta)

    def __str__(self):
        ctrl = ",".join(map(str, self.controls)) or "-"
        tgt = ",".join(map(str, self.targets))
        line = f"{self.kind.value} {ctrl} -> {tgt}"
        if self.theta is not None:
            line += f" {self.theta!r}"
        return line


# Convenience constructors, mirroring the gate names used in circuit dumps.
def x(q): return Gate(GateKind.X, (q,))
def h(q): return Gate(GateKind.H, (q,))
def z(q): return Gate(GateKind.Z, (q,))
def rz(q, theta): return Gate(GateKind.RZ, (q,), (), float(theta))
def cx(c, t): return Gate(GateKind.CX, (t,), (c,))
def cz(c, t): return Gate(GateKind.CZ, (t,), (c,))
def ccx(c1, c2, t): return Gate(GateKind.CCX, (t,), (c1, c2))
def ccz(c1, c2, t): return Gate(GateKind.CCZ, (t,), (c1, c2))
def crz(c, t, theta): return Gate(GateKind.CRZ, (t,), (c,), float(theta))
def mcrz(controls, t, theta): return Gate(GateKind.MCRZ, (t,), tuple(controls), float(theta))
def diffusion(qubits): return Gate(GateKind.DIFFUSION, tuple(qubits))


@dataclass(frozen=True)
class QubitLayout:
    """Assignment of register indices to named roles.

    ``roles`` maps a role name (``"y"``, ``"t"``, ``"x0"``, ``"w3"``...) to a
    qubit index. ``label_order`` lists the qubits that appear in measured
    bitstrings, leftmost character first.
    """

    num_qubits: int
    roles: Mapping[str, int]
    label_order: tuple[int, ...]

    def __post_init__(self):
        used = sorted(self.roles.values())
        if used != list(range(self.num_qubits)):
            raise ConfigurationError("roles must partition the register exactly")
        if any(q not in used for q in self.label_order):
            raise ConfigurationError("label order names an unassigned qubit")

    def __getitem__(self, role: str) -> int:
        return self.roles[role]

    def role_of(self, qubit: int) -> str:
        for name, q in self.roles.items():
            if q == qubit:
                return name
        raise KeyError(qubit)

    def label(self, index: int) -> str:
        return "".join("1" if (index >> q) & 1 else "0" for q in self.label_order)


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    layout: QubitLayout | None = None

    def append(self, gate: Gate) -> "Circuit":
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        self.gates.extend(gates)
        return self

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)], self.layout)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


@dataclass
class StateVector:
    """Amplitudes of an m-qubit register; length is always ``2**num_qubits``."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ConfigurationError(
                f"expected {1 << self.num_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        m = amps.size.bit_length() - 1
        if m < 1 or amps.size != 1 << m:
            raise ConfigurationError("amplitude count must be a power of two >= 2")
        return cls(m, amps)

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def _check_qubit_count(m: int):
    if not isinstance(m, (int, np.integer)) or m < 1 or m > MAX_QUBITS:
        raise ConfigurationError(f"qubit count must be in 1..{MAX_QUBITS}, got {m!r}")


def new_ground_state(m: int) -> StateVector:
    _check_qubit_count(m)
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(m, amps)


def basis_state(m: int, index: int) -> StateVector:
    _check_qubit_count(m)
    if not 0 <= index < 1 << m:
        raise ConfigurationError(f"basis index {index} out of range for {m} qubits")
    amps = np.zeros(1 << m, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(m, amps)


def _axis(m: int, q: int) -> int:
    # C-order reshape to (2,)*m puts qubit m-1 on axis 0
    return m - 1 - q


def _validate(gate: Gate, m: int, position=None):
    for q in gate.qubits:
        if not 0 <= q < m:
            raise GateError(f"qubit {q} out of range for {m}-qubit register", position)


def _apply_inplace(psi: np.ndarray, m: int, gate: Gate):
    """Apply ``gate`` to the (2,)*m tensor view ``psi`` in place."""
    if gate.kind is GateKind.DIFFUSION:
        axes = tuple(_axis(m, q) for q in gate.targets)
        mean = psi.mean(axis=axes, keepdims=True)
        np.subtract(2.0 * mean, psi, out=psi)
        return

    index = [slice(None)] * m
    for c in gate.controls:
        index[_axis(m, c)] = 1
    t = _axis(m, gate.targets[0])
    index0, index1 = list(index), list(index)
    index0[t], index1[t] = 0, 1
    index0, index1 = tuple(index0), tuple(index1)

    u = gate.matrix()
    if u[0, 1] == 0 and u[1, 0] == 0:
        if u[0, 0] != 1:
            psi[index0] *= u[0, 0]
        psi[index1] *= u[1, 1]
        return
    a0 = psi[index0].copy()
    a1 = psi[index1]
    psi[index0] = u[0, 0] * a0 + u[0, 1] * a1
    psi[index1] = u[1, 0] * a0 + u[1, 1] * a1


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return a new state with ``gate`` applied; the input is left untouched."""
    _validate(gate, state.num_qubits)
    out = state.amplitudes.copy()
    _apply_inplace(out.reshape((2,) * state.num_qubits), state.num_qubits, gate)
    return StateVector(state.num_qubits, out)


def apply_circuit(state: StateVector, circuit: Circuit | Sequence[Gate]) -> StateVector:
    gates = list(circuit)
    m = state.num_qubits
    for i, g in enumerate(gates):
        _validate(g, m, position=i)
    out = state.amplitudes.copy()
    view = out.reshape((2,) * m)
    for g in gates:
        _apply_inplace(view, m, g)
    return StateVector(m, out)


def gate_unitary(gate: Gate, m: int) -> np.ndarray:
    """Materialize ``gate`` as a dense 2^m x 2^m matrix (column j = image of |j>)."""
    _check_qubit_count(m)
    _validate(gate, m)
    dim = 1 << m
    cols = np.empty((dim, dim), dtype=np.complex128)
    for j in range(dim):
        e = np.zeros(dim, dtype=np.complex128)
        e[j] = 1.0
        _apply_inplace(e.reshape((2,) * m), m, gate)
        cols[:, j] = e
    return cols


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Probabilities over the sub-register ``qubits``; ``qubits[k]`` becomes bit k."""
    m = state.num_qubits
    p = probabilities(state).reshape((2,) * m)
    keep = [_axis(m, q) for q in qubits]
    drop = tuple(a for a in range(m) if a not in keep)
    if drop:
        p = p.sum(axis=drop)
    # remaining axes are in increasing axis order; put qubits[k] on bit k
    remaining = sorted(keep)
    order = [remaining.index(_axis(m, q)) for q in reversed(qubits)]
    return np.transpose(p, order).reshape(-1)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample_counts(probs: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Draw ``shots`` independent outcomes; returns the count per basis index."""
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise ConfigurationError(f"shots must be a positive integer, got {shots!r}")
    p = np.clip(np.asarray(probs, dtype=np.float64), 0.0, None)
    total = p.sum()
    if not total > 0:
        raise ConfigurationError("probability vector is identically zero")
    return make_rng(seed).multinomial(shots, p / total)


def counts_to_histogram(counts: np.ndarray, label) -> dict[str, int]:
    return {label(i): int(c) for i, c in enumerate(counts) if c}


def sample_shots(state: StateVector, shots: int, seed: int) -> dict[str, int]:
    """Sample measurement outcomes of every qubit; keys are MSB-first bitstrings."""
    m = state.num_qubits
    counts = sample_counts(probabilities(state), shots, seed)
    return counts_to_histogram(counts, lambda i: format(i, f"0{m}b"))
