"""QPE sampling circuits over a single-qubit Hamiltonian.

Three builders share one convention: the measured integer j follows the
phase-estimation kernel, i.e. for an eigenstate of energy ``eps`` the
distribution peaks at ``j = (eps - E_orig) * t0  (mod N)``.  The energy
origin enters through phase gates on the control qubits, so only the
traceless part of the Hamiltonian is ever Trotterized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import QubitHamiltonian
from .simulator import Circuit, Gate, Measure, Reset


@dataclass(frozen=True)
class QpeSettings:
    """Grid configuration: N = 2**n_qft points spaced 1/t0 from the shifted
    origin ``E_orig(s) = e_o + s / (n_settings * t0)``."""

    n_qft: int = 3
    t0: float = 5.0
    e_o: float = -0.8
    n_settings: int = 4

    def __post_init__(self):
        if self.n_qft < 1:
            raise ValueError("n_qft must be at least 1")
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.n_settings < 1:
            raise ValueError("n_settings must be at least 1")

    @property
    def n_val(self) -> int:
        return 1 << self.n_qft

    @property
    def grid_spacing(self) -> float:
        return 1.0 / self.t0

    @property
    def period(self) -> float:
        return self.n_val / self.t0

    def e_orig(self, s: int) -> float:
        if not 0 <= s < self.n_settings:
            raise ValueError(f"shift index {s} outside [0, {self.n_settings})")
        return self.e_o + s / (self.n_settings * self.t0)


@dataclass(frozen=True)
class RteMode:
    """Real-time-evolution compilation: closed-form SU(2) rotation, or
    first-order Trotter slices (``steps`` per single RTE application)."""

    kind: str
    steps: int = 1

    def __post_init__(self):
        if self.kind not in ("exact", "trotter"):
            raise ValueError(f"unknown RTE mode {self.kind!r}")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")

    @classmethod
    def exact(cls) -> "RteMode":
        return cls("exact")

    @classmethod
    def trotter(cls, steps: int) -> "RteMode":
        return cls("trotter", steps)

    @classmethod
    def parse(cls, text: str) -> "RteMode":
        if text == "exact":
            return cls.exact()
        if text.startswith("trotter:"):
            return cls.trotter(int(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse RTE mode {text!r}")

    def __str__(self) -> str:
        return self.kind if self.kind == "exact" else f"trotter:{self.steps}"


EXACT = RteMode.exact()


def controlled_rte(h: QubitHamiltonian, settings: QpeSettings, s: int,
                   power: int, mode: RteMode = EXACT,
                   control: int = 1, target: int = 0) -> list[Gate]:
    """Gates for control (x) U**power with
    U = exp(-i 2 pi (H - E_orig(s)) t0 / N).

    The scalar part (h0 - E_orig) becomes a phase gate on the control; the
    traceless part is either one closed-form controlled rotation or a chain
    of controlled X/Z Trotter slices repeated ``power * steps`` times.
    """
    if power < 1 or power & (power - 1):
        raise ValueError("power must be a positive power of two")
    n_val = settings.n_val
    base_angle = 2.0 * math.pi * settings.t0 / n_val
    gates: list[Gate] = []

    if mode.kind == "exact":
        r = math.hypot(h.hx, h.hz)
        if r > 0.0:
            beta = math.atan2(h.hx, h.hz)
            phi = base_angle * r * power
            gates.append(Gate("ry", (target,), (-beta,)))
            gates.append(Gate("rz", (target,), (phi,)))
            gates.append(Gate("rzz", (control, target), (-phi,)))
            gates.append(Gate("ry", (target,), (beta,)))
    else:
        ax = base_angle * h.hx / mode.steps
        az = base_angle * h.hz / mode.steps
        for _ in range(power * mode.steps):
            gates.append(Gate("h", (target,)))
            gates.append(Gate("rz", (target,), (ax,)))
            gates.append(Gate("rzz", (control, target), (-ax,)))
            gates.append(Gate("h", (target,)))
            gates.append(Gate("rz", (target,), (az,)))
            gates.append(Gate("rzz", (control, target), (-az,)))

    scalar = -base_angle * (h.h0 - settings.e_orig(s)) * power
    gates.append(Gate("phase", (control,), (scalar,)))
    return gates


def qft_gates(qubits: tuple[int, ...]) -> list[Gate]:
    """Swapless forward QFT ladder on qubits carrying bit weight 2**index.

    The transform leaves output bit k on ``qubits[n-1-k]``; readers must
    reverse the measured bit order.
    """
    n = len(qubits)
    gates: list[Gate] = []
    for l in range(n - 1, -1, -1):
        gates.append(Gate("h", (qubits[l],)))
        for m in range(l - 1, -1, -1):
            gates.append(Gate("cphase", (qubits[l], qubits[m]),
                              (2.0 * math.pi / (1 << (l + 1 - m)),)))
    return gates


def build_phys3a(h: QubitHamiltonian, settings: QpeSettings, s: int,
                 prep_angle: float, mode: RteMode = EXACT) -> Circuit:
    """All-ancilla QPE circuit: qubit 0 is the system, qubits 1..n_qft the
    control register measured in one final pass."""
    n = settings.n_qft
    anc = tuple(range(1, n + 1))
    ins: list = [Gate("ry", (0,), (2.0 * prep_angle,))]
    ins += [Gate("h", (a,)) for a in anc]
    for k in range(n):
        ins += controlled_rte(h, settings, s, 1 << k, mode,
                              control=anc[k], target=0)
    ins += qft_gates(anc)
    ins += [Measure(anc[i], i) for i in range(n)]
    # output bit k sits on ancilla n-1-k after the swapless ladder
    result_bits = tuple(n - 1 - k for k in range(n))
    return Circuit(n_qubits=n + 1, n_cbits=n, instructions=tuple(ins),
                   result_bits=result_bits)


def phase_correction_gates(round_index: int, ancilla: int,
                           bit_of_round) -> list[Gate]:
    """Semiclassical feed-forward rotations before the closing Hadamard of
    round r: a phase of pi / 2**(r-m) for each earlier round m that read 1."""
    return [
        Gate("phase", (ancilla,), (math.pi / (1 << (round_index - m)),),
             condition=(bit_of_round(m), 1))
        for m in range(round_index)
    ]


def build_phys1a(h: QubitHamiltonian, settings: QpeSettings, s: int,
                 prep_angle: float, mode: RteMode = EXACT) -> Circuit:
    """Single-ancilla semiclassical QPE: qubit 1 is measured and reset once
    per round, with classically conditioned phase corrections replacing the
    inverse-QFT rotations.  Round r uses the power 2**(n-1-r) and yields the
    result bit of weight 2**r, so the first round fixes the least
    significant bit."""
    n = settings.n_qft
    ins: list = [Gate("ry", (0,), (2.0 * prep_angle,))]
    for r in range(n):
        if r > 0:
            ins.append(Reset(1))
        ins.append(Gate("h", (1,)))
        ins += controlled_rte(h, settings, s, 1 << (n - 1 - r), mode,
                              control=1, target=0)
        ins += phase_correction_gates(r, 1, lambda m: m)
        ins.append(Gate("h", (1,)))
        ins.append(Measure(1, r))
    return Circuit(n_qubits=2, n_cbits=n, instructions=tuple(ins),
                   result_bits=tuple(range(n)))
