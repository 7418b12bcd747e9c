"""Dense statevector circuit engine.

Supports midcircuit measurement, classical feed-forward, qubit reset,
per-gate depolarizing noise with readout flips, shot discarding on heralded
flags, and in-circuit lookup-table decoding of multi-bit logical readouts.
Two evaluation modes exist: Monte Carlo single shots (``run_shot``) and
exact noiseless branch enumeration (``exact_distribution``), which follows
every measurement outcome of nonzero probability and merges branches that
can no longer be distinguished.

Sized for up to 16 qubits; the largest circuit in this package uses 15.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import backend

MAX_QUBITS = 16
_SQ2 = 1.0 / np.sqrt(2.0)

_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def gate_matrix(name: str, params: tuple[float, ...] = ()) -> np.ndarray:
    """Unitary for a named gate.  Two-qubit matrices are in the basis
    |q_first q_second> with the first listed qubit as the high bit."""
    if name == "h":
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if name == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if name == "s":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if name == "sdg":
        return np.array([[1, 0], [0, -1j]], dtype=complex)
    if name == "ry":
        c, s = np.cos(params[0] / 2), np.sin(params[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        p = np.exp(0.5j * params[0])
        return np.array([[np.conj(p), 0], [0, p]], dtype=complex)
    if name == "phase":
        return np.array([[1, 0], [0, np.exp(1j * params[0])]], dtype=complex)
    if name == "cnot":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if name == "rzz":
        p = np.exp(0.5j * params[0])
        return np.diag([np.conj(p), p, p, np.conj(p)]).astype(complex)
    if name == "cphase":
        return np.diag([1, 1, 1, np.exp(1j * params[0])]).astype(complex)
    raise ValueError(f"unknown gate {name!r}")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    condition: tuple[int, int] | None = None  # (classical bit, required value)


@dataclass(frozen=True)
class Measure:
    qubit: int
    cbit: int


@dataclass(frozen=True)
class Reset:
    qubit: int


@dataclass(frozen=True)
class Checkpoint:
    """Position marker; ``qubits`` names the register the label refers to."""

    label: str
    qubits: tuple[int, ...] = ()


@dataclass(frozen=True)
class DiscardIf:
    cbit: int
    value: int
    label: str


@dataclass(frozen=True)
class Decode:
    """Classical lookup decode of a multi-bit readout.

    Writes the decoded logical bit to ``out`` and records a correction
    event under ``label`` when the lookup corrected a flipped bit.
    ``table`` maps the raw bit pattern (bit i of the key = cbits[i]) to
    (logical bit, corrected position or None).
    """

    cbits: tuple[int, ...]
    out: int
    label: str
    table: Mapping[int, tuple[int, int | None]] = field(hash=False)


Instruction = Gate | Measure | Reset | Checkpoint | DiscardIf | Decode


@dataclass(frozen=True)
class Circuit:
    """Ordered instruction list over ``n_qubits`` qubits and ``n_cbits``
    classical bits.  ``result_bits[r]`` is the classical bit carrying weight
    2**r in the assembled result integer."""

    n_qubits: int
    n_cbits: int
    instructions: tuple[Instruction, ...]
    result_bits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"at most {MAX_QUBITS} qubits supported")
        written: set[int] = set()
        for ins in self.instructions:
            if isinstance(ins, Gate):
                if any(q < 0 or q >= self.n_qubits for q in ins.qubits):
                    raise ValueError(f"gate {ins} targets out-of-range qubit")
                if ins.condition is not None and ins.condition[0] not in written:
                    raise ValueError(f"condition on unwritten classical bit: {ins}")
            elif isinstance(ins, Measure):
                if not (0 <= ins.qubit < self.n_qubits and 0 <= ins.cbit < self.n_cbits):
                    raise ValueError(f"measurement out of range: {ins}")
                written.add(ins.cbit)
            elif isinstance(ins, Reset):
                if not 0 <= ins.qubit < self.n_qubits:
                    raise ValueError(f"reset out of range: {ins}")
            elif isinstance(ins, DiscardIf):
                if ins.cbit not in written:
                    raise ValueError(f"discard reads unwritten classical bit: {ins}")
            elif isinstance(ins, Decode):
                if any(b not in written for b in ins.cbits):
                    raise ValueError(f"decode reads unwritten classical bit: {ins}")
                written.add(ins.out)
        for b in self.result_bits:
            if not 0 <= b < self.n_cbits:
                raise ValueError("result bit out of range")

    def result_value(self, bits) -> int:
        return sum(bits[b] << r for r, b in enumerate(self.result_bits))

    def n_outcomes(self) -> int:
        return 1 << len(self.result_bits)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing noise after each gate plus classical readout flips.

    ``p1``/``p2`` are per-touched-qubit probabilities of a uniformly random
    non-identity Pauli after single-/two-qubit gates; ``pm`` flips the
    recorded (not the collapsed) measurement bit.
    """

    p1: float = 3e-5
    p2: float = 1e-3
    pm: float = 1e-3

    def __post_init__(self):
        for v in (self.p1, self.p2, self.pm):
            if not 0.0 <= v <= 1.0:
                raise ValueError("noise probabilities must lie in [0, 1]")

    @property
    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0 and self.pm == 0.0


NOISELESS = NoiseModel(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CircuitOutcome:
    """One shot.  ``bits`` is None when the shot was discarded."""

    bits: tuple[int, ...] | None
    discarded: str | None
    corrections: tuple[tuple[str, int], ...]

    @property
    def accepted(self) -> bool:
        return self.discarded is None


def _zero_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1.0
    return psi


def _apply_gate(psi: np.ndarray, gate: Gate, n: int, k) -> None:
    m = gate_matrix(gate.name, gate.params)
    if len(gate.qubits) == 1:
        k.apply_1q(psi, m, gate.qubits[0], n)
    else:
        k.apply_2q(psi, m, gate.qubits[0], gate.qubits[1], n)


def _decode_key(bits, cbits: tuple[int, ...]) -> int:
    return sum(bits[b] << i for i, b in enumerate(cbits))


def run_shot(circuit: Circuit, noise: NoiseModel = NOISELESS,
             seed=None, rng: np.random.Generator | None = None) -> CircuitOutcome:
    """Simulate a single shot; deterministic for a given seed.

    Measurement collapse and noise draws come from one seeded stream.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    k = backend.kernels()
    n = circuit.n_qubits
    psi = _zero_state(n)
    bits = [0] * circuit.n_cbits
    corrections: list[tuple[str, int]] = []

    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            if ins.condition is not None and bits[ins.condition[0]] != ins.condition[1]:
                continue
            _apply_gate(psi, ins, n, k)
            p_err = noise.p1 if len(ins.qubits) == 1 else noise.p2
            if p_err > 0.0:
                for q in ins.qubits:
                    if rng.random() < p_err:
                        k.apply_1q(psi, _PAULIS[rng.integers(3)], q, n)
        elif isinstance(ins, Measure):
            p1 = k.prob_one(psi, ins.qubit, n)
            outcome = 1 if rng.random() < p1 else 0
            p_sel = p1 if outcome else 1.0 - p1
            if p_sel < 1e-15:
                raise RuntimeError("collapse onto zero-probability branch")
            k.project(psi, ins.qubit, outcome, 1.0 / np.sqrt(p_sel), n)
            recorded = outcome
            if noise.pm > 0.0 and rng.random() < noise.pm:
                recorded ^= 1
            bits[ins.cbit] = recorded
        elif isinstance(ins, Reset):
            p1 = k.prob_one(psi, ins.qubit, n)
            outcome = 1 if rng.random() < p1 else 0
            p_sel = p1 if outcome else 1.0 - p1
            if p_sel < 1e-15:
                raise RuntimeError("collapse onto zero-probability branch")
            k.project(psi, ins.qubit, outcome, 1.0 / np.sqrt(p_sel), n)
            if outcome:
                k.apply_1q(psi, gate_matrix("x"), ins.qubit, n)
        elif isinstance(ins, DiscardIf):
            if bits[ins.cbit] == ins.value:
                return CircuitOutcome(bits=None, discarded=ins.label,
                                      corrections=tuple(corrections))
        elif isinstance(ins, Decode):
            logical, flipped = ins.table[_decode_key(bits, ins.cbits)]
            bits[ins.out] = logical
            if flipped is not None:
                corrections.append((ins.label, flipped))
        # Checkpoint: marker only
    return CircuitOutcome(bits=tuple(bits), discarded=None,
                          corrections=tuple(corrections))


@dataclass
class Branch:
    """One classical branch of a noiseless enumeration."""

    state: np.ndarray
    bits: list[int]
    prob: float
    corrections: list[tuple[str, int]]


def _read_sets(instructions) -> list[frozenset[int]]:
    """For each instruction index, the classical bits read at or after it."""
    live: list[frozenset[int]] = [frozenset()] * (len(instructions) + 1)
    acc: frozenset[int] = frozenset()
    for i in range(len(instructions) - 1, -1, -1):
        ins = instructions[i]
        reads: set[int] = set()
        if isinstance(ins, Gate) and ins.condition is not None:
            reads.add(ins.condition[0])
        elif isinstance(ins, DiscardIf):
            reads.add(ins.cbit)
        elif isinstance(ins, Decode):
            reads.update(ins.cbits)
        acc = acc | frozenset(reads)
        live[i] = acc
    return live


def _merge(branches: list[Branch], live: frozenset[int]) -> list[Branch]:
    groups: dict[tuple[int, ...], list[Branch]] = {}
    for br in branches:
        groups.setdefault(tuple(br.bits[b] for b in sorted(live)), []).append(br)
    merged: list[Branch] = []
    for group in groups.values():
        reps: list[Branch] = []
        for br in group:
            for rep in reps:
                if np.allclose(rep.state, br.state, rtol=0.0, atol=1e-10):
                    rep.prob += br.prob
                    break
            else:
                reps.append(br)
        merged.extend(reps)
    return merged


def enumerate_branches(circuit: Circuit, max_branches: int = 1 << 20) -> list[Branch]:
    """Follow every nonzero-probability measurement outcome, noiselessly.

    Branches that agree on the classical bits still readable downstream
    (including the result bits) and hold identical states are merged; the
    merged branch keeps a representative correction record.
    """
    k = backend.kernels()
    n = circuit.n_qubits
    live = _read_sets(circuit.instructions)
    result_set = frozenset(circuit.result_bits)
    branches = [Branch(state=_zero_state(n), bits=[0] * circuit.n_cbits,
                       prob=1.0, corrections=[])]

    for i, ins in enumerate(circuit.instructions):
        if isinstance(ins, Gate):
            for br in branches:
                if ins.condition is not None and br.bits[ins.condition[0]] != ins.condition[1]:
                    continue
                _apply_gate(br.state, ins, n, k)
        elif isinstance(ins, (Measure, Reset)):
            children: list[Branch] = []
            for br in branches:
                q = ins.qubit
                p1 = k.prob_one(br.state, q, n)
                for outcome, p_out in ((0, 1.0 - p1), (1, p1)):
                    if p_out < 1e-14:
                        continue
                    child_state = br.state.copy()
                    k.project(child_state, q, outcome, 1.0 / np.sqrt(p_out), n)
                    child = Branch(state=child_state, bits=list(br.bits),
                                   prob=br.prob * p_out,
                                   corrections=list(br.corrections))
                    if isinstance(ins, Measure):
                        child.bits[ins.cbit] = outcome
                    elif outcome:
                        k.apply_1q(child_state, gate_matrix("x"), q, n)
                    children.append(child)
            branches = _merge(children, live[i + 1] | result_set)
            if len(branches) > max_branches:
                raise RuntimeError(f"branch count exceeded {max_branches}")
        elif isinstance(ins, DiscardIf):
            branches = [br for br in branches if br.bits[ins.cbit] != ins.value]
        elif isinstance(ins, Decode):
            for br in branches:
                logical, flipped = ins.table[_decode_key(br.bits, ins.cbits)]
                br.bits[ins.out] = logical
                if flipped is not None:
                    br.corrections.append((ins.label, flipped))
            branches = _merge(branches, live[i + 1] | result_set)
        # Checkpoint: marker only
    return branches


def exact_distribution(circuit: Circuit, max_branches: int = 1 << 20) -> np.ndarray:
    """Exact noiseless distribution over the assembled result integer,
    conditioned on non-discarded branches."""
    branches = enumerate_branches(circuit, max_branches=max_branches)
    dist = np.zeros(circuit.n_outcomes())
    total = 0.0
    for br in branches:
        dist[circuit.result_value(br.bits)] += br.prob
        total += br.prob
    if total <= 0.0:
        raise RuntimeError("every branch was discarded")
    return dist / total


def statevector_after(circuit: Circuit) -> np.ndarray:
    """Final state of a measurement-free, unconditioned circuit (test helper)."""
    k = backend.kernels()
    psi = _zero_state(circuit.n_qubits)
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            if ins.condition is not None:
                raise ValueError("conditioned gate in statevector_after")
            _apply_gate(psi, ins, circuit.n_qubits, k)
        elif not isinstance(ins, Checkpoint):
            raise ValueError(f"non-unitary instruction {ins} in statevector_after")
    return psi
