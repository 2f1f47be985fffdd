"""Step-sequenced scenarios that record accumulated interference.

The accumulated interference after step t is the measure of the *composed*
propagator of steps 1..t, not a sum of per-step values.  The engine keeps a
dense accumulated unitary as long as every step is unitary (gates applied
through the structured kernels in :mod:`ibits.gates`) and switches to a Kraus
set the first time a non-unitary step arrives.

Two variants of the algorithm traces exist: the full operator including the
initial equipartition transform ("potentially available" interference), and
the operator with that transform omitted ("actually used"), which amounts to
starting from the uniform superposition instead of |0...0>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import QuantumChannel, channel_from_kraus, compose, projective_measurement
from .errors import CapacityError, ShapeError, ValidationError
from .gates import GateKind, GateSpec, apply_gate, qft_stages
from .matrixcore import identity
from .measure import ibits, interference_kraus, interference_unitary

__all__ = [
    "TraceRecord",
    "InterferenceTrace",
    "Step",
    "Accumulator",
    "accumulate",
    "teleportation_trace",
    "teleportation_channel",
    "grover_steps",
    "grover_trace",
    "grover_iterations",
    "shor_steps",
    "shor_trace",
]


@dataclass(frozen=True)
class TraceRecord:
    step: int
    label: str
    interference: float
    ibits: float


@dataclass(frozen=True)
class InterferenceTrace:
    records: tuple[TraceRecord, ...]
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Step:
    """One trace step: a gate batch, a channel, or a bare checkpoint."""

    label: str
    gates: tuple[GateSpec, ...] = ()
    channel: QuantumChannel | None = None


class Accumulator:
    """Composed propagator of the steps applied so far.

    Starts on the unitary fast path (a dense accumulated matrix, gates applied
    structurally).  The first channel step converts the matrix into a
    single-Kraus channel and composition continues in operator-sum form.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise ValidationError(f"dimension must be >= 2, got {dim}")
        self.dim = dim
        self._matrix: np.ndarray | None = identity(dim)
        self._channel: QuantumChannel | None = None

    @property
    def on_unitary_path(self) -> bool:
        return self._channel is None

    @property
    def unitary(self) -> np.ndarray | None:
        return self._matrix

    @property
    def channel(self) -> QuantumChannel:
        if self._channel is not None:
            return self._channel
        # product of exact gate constructions: unitary by construction
        return QuantumChannel(dim=self.dim, kraus=(self._matrix,), trace_preserving=True)

    def _qubits(self) -> int:
        n = self.dim.bit_length() - 1
        if self.dim != 1 << n:
            raise ShapeError(f"gate steps need a power-of-two dimension, got {self.dim}")
        return n

    def apply_gates(self, gates) -> None:
        n = self._qubits()
        if self._channel is None:
            for g in gates:
                self._matrix = apply_gate(self._matrix, g, n, overwrite=True)
        else:
            ops = []
            for e in self._channel.kraus:
                out = e.copy()
                for g in gates:
                    out = apply_gate(out, g, n, overwrite=True)
                ops.append(out)
            self._channel = QuantumChannel(
                dim=self.dim, kraus=tuple(ops),
                trace_preserving=self._channel.trace_preserving,
            )

    def apply_channel(self, ch: QuantumChannel) -> None:
        if ch.dim != self.dim:
            raise ShapeError(f"channel dim {ch.dim} does not match trace dim {self.dim}")
        self._channel = compose(ch, self.channel)
        self._matrix = None

    def interference(self) -> float:
        if self._channel is None:
            return interference_unitary(self._matrix, validate=False)
        return interference_kraus(self._channel)


def accumulate(steps, dim: int, params: dict | None = None) -> InterferenceTrace:
    """Run the step sequence and record the measure after every step."""
    acc = Accumulator(dim)
    records = []
    for number, step in enumerate(steps, start=1):
        if step.gates:
            acc.apply_gates(step.gates)
        elif step.channel is not None:
            acc.apply_channel(step.channel)
        value = acc.interference()
        records.append(TraceRecord(number, step.label, value, ibits(value)))
    return InterferenceTrace(records=tuple(records), params=dict(params or {}))


# --------------------------------------------------------------------------
# quantum teleportation (3 qubits; qubit 0 carries the unknown input state,
# qubits 1 and 2 start in |0>, qubit 2 ends up with the state)


def _teleport_prefix_unitary() -> np.ndarray:
    u = identity(8)
    for g in (
        GateSpec(GateKind.H, (2,)),
        GateSpec(GateKind.CNOT, (2, 1)),
        GateSpec(GateKind.CNOT, (0, 1)),
        GateSpec(GateKind.H, (0,)),
    ):
        u = apply_gate(u, g, 3, overwrite=True)
    return u


def _teleport_branches() -> tuple[QuantumChannel, QuantumChannel]:
    """Channels after the measurement step and after the corrections."""
    u = _teleport_prefix_unitary()
    meas = projective_measurement(8, (0, 1))
    measured = channel_from_kraus(p @ u for p in meas.kraus)
    corrected = []
    for outcome, projector in enumerate(meas.kraus):
        m0, m1 = outcome & 1, (outcome >> 1) & 1  # outcomes of qubits 0 and 1
        branch = projector @ u
        if m1:  # X on qubit 2 conditioned on the qubit-1 result
            branch = apply_gate(branch, GateSpec(GateKind.X, (2,)), 3)
        if m0:  # Z on qubit 2 conditioned on the qubit-0 result
            branch = apply_gate(branch, GateSpec(GateKind.Z, (2,)), 3)
        corrected.append(branch)
    return measured, channel_from_kraus(corrected)


def teleportation_trace() -> InterferenceTrace:
    """Six-step teleportation protocol on dimension 8.

    Steps: Hadamard and CNOT preparing the shared pair, Alice's CNOT and
    Hadamard, the two-qubit measurement, and the conditioned Pauli
    corrections merged into the measurement branches.
    """
    gate_steps = [
        Step("H 2", (GateSpec(GateKind.H, (2,)),)),
        Step("CNOT 2 1", (GateSpec(GateKind.CNOT, (2, 1)),)),
        Step("CNOT 0 1", (GateSpec(GateKind.CNOT, (0, 1)),)),
        Step("H 0", (GateSpec(GateKind.H, (0,)),)),
    ]
    acc = Accumulator(8)
    records = []
    for number, step in enumerate(gate_steps, start=1):
        acc.apply_gates(step.gates)
        value = acc.interference()
        records.append(TraceRecord(number, step.label, value, ibits(value)))
    measured, corrected = _teleport_branches()
    for number, (label, ch) in enumerate(
        (("MEASURE 0 1", measured), ("CORRECT", corrected)), start=5
    ):
        value = interference_kraus(ch)
        records.append(TraceRecord(number, label, value, ibits(value)))
    return InterferenceTrace(records=tuple(records), params={"qubits": 3})


def teleportation_channel() -> QuantumChannel:
    """The complete teleportation channel, corrections included."""
    return _teleport_branches()[1]


# --------------------------------------------------------------------------
# Grover search


def grover_iterations(n: int) -> int:
    """Optimal iteration count floor(pi / (4 theta)) with sin^2 theta = 1/N."""
    return int(math.pi / (4.0 * math.asin(1.0 / math.sqrt(1 << n))))


def grover_steps(n: int, marked: int, include_initial_w: bool) -> list[Step]:
    if not 2 <= n <= 10:
        raise ValidationError(f"Grover trace supports 2..10 qubits, got {n}")
    if not 0 <= marked < (1 << n):
        raise ValidationError(f"marked state {marked} out of range for {n} qubits")
    steps = []
    if include_initial_w:
        steps.append(Step("W", tuple(GateSpec(GateKind.H, (q,)) for q in range(n))))
    for _ in range(grover_iterations(n)):
        steps.append(Step("R1", (GateSpec(GateKind.ORACLE, (), (marked,)),)))
        steps.append(Step("D", (GateSpec(GateKind.DIFFUSION),)))
    return steps


def grover_trace(n: int, marked: int, include_initial_w: bool = True) -> InterferenceTrace:
    """Accumulated interference through Grover's search.

    With the initial equipartition transform included the trace has 2k+1
    records (W counts as a single step); without it, 2k records starting at
    the first oracle call.
    """
    return accumulate(
        grover_steps(n, marked, include_initial_w),
        1 << n,
        params={"n": n, "marked": marked, "include_initial_w": include_initial_w},
    )


# --------------------------------------------------------------------------
# order finding / factoring trace


def shor_steps(modulus: int, base: int, include_initial_w: bool) -> tuple[list[Step], int]:
    """Step list and qubit count for the factoring trace of `modulus`."""
    if modulus < 2:
        raise ValidationError(f"modulus must be >= 2, got {modulus}")
    big_l = int(math.log2(modulus)) + 1
    n = 3 * big_l
    if n > 12:
        raise CapacityError(
            f"modulus {modulus} needs {n} qubits; traces are capped at 12 (modulus 15)"
        )
    if not 2 <= base < modulus:
        raise ValidationError(f"base must satisfy 2 <= a < {modulus}, got {base}")
    if math.gcd(base, modulus) != 1:
        raise ValidationError(f"base {base} is not coprime to {modulus}")
    steps = []
    if include_initial_w:
        for q in range(big_l, 3 * big_l):
            steps.append(Step(f"H q{q}", (GateSpec(GateKind.H, (q,)),)))
    for i in range(2 * big_l):
        power = pow(base, 1 << i, modulus)
        steps.append(
            Step(f"modmul {power} c{i}", (GateSpec(GateKind.MODMUL, (i,), (modulus, power)),))
        )
    for stage in qft_stages(big_l, 3 * big_l - 1):
        target = stage[0].qubits[0]
        steps.append(Step(f"qft q{target}", tuple(stage)))
    return steps, n


def shor_trace(modulus: int, base: int, include_initial_w: bool = True) -> InterferenceTrace:
    """Accumulated interference through the order-finding circuit.

    Register layout: the low L qubits hold the work register (initial |1>),
    the high 2L qubits the control register.  Three parts of 2L records each:
    per-qubit Hadamards (omitted for the actually-used variant), controlled
    modular multiplications, and the staged Fourier transform on the control
    register.
    """
    steps, n = shor_steps(modulus, base, include_initial_w)
    return accumulate(
        steps,
        1 << n,
        params={"modulus": modulus, "base": base, "include_initial_w": include_initial_w},
    )
