"""Gate constructors and structured application to accumulated operators.

Qubit 0 is the least significant bit of the basis-state index throughout, so
a single-qubit gate on qubit q is embedded as ``kron(1_hi, kron(g, 1_lo))``
with ``lo = 2^q``.

:func:`apply_gate` left-multiplies an accumulated 2^n x 2^n operator by the
register-wide embedding of a gate *without materializing the embedding* for
the cheap structured kinds (H/X/Z/CNOT/CPHASE/PERM and friends): single-qubit
kinds cost O(4^n) row updates instead of an O(8^n) matrix product, which is
what makes the 4096-dimensional factoring trace feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CapacityError, ShapeError, ValidationError
from .matrixcore import as_matrix, identity, permutation_matrix

__all__ = [
    "GateKind",
    "GateSpec",
    "hadamard",
    "pauli_x",
    "pauli_z",
    "cnot",
    "cphase",
    "walsh",
    "qft",
    "qft_stages",
    "bit_reversal_permutation",
    "grover_oracle",
    "r2",
    "diffusion",
    "modmul_indices",
    "modmul_permutation",
    "validate_gate",
    "apply_gate",
    "gate_matrix",
]

_SQRT1_2 = 1.0 / math.sqrt(2.0)
_KRON_POWER_LIMIT = 12  # 2^12 = 4096, the largest register this library runs


class GateKind(Enum):
    H = "H"
    X = "X"
    Z = "Z"
    CNOT = "CNOT"
    CPHASE = "CPHASE"
    QFT = "QFT"
    ORACLE = "ORACLE"
    R2 = "R2"
    DIFFUSION = "DIFFUSION"
    MODMUL = "MODMUL"
    PERM = "PERM"


@dataclass(frozen=True)
class GateSpec:
    """One gate instance: a kind, the qubits it touches, and parameters.

    params by kind: CPHASE -> (phi,); ORACLE -> (marked,); MODMUL ->
    (modulus, multiplier) with qubits = (control,); PERM -> the full basis
    permutation as an index tuple; QFT -> () with qubits = (lo, hi).
    """

    kind: GateKind
    qubits: tuple[int, ...] = ()
    params: tuple = ()


def hadamard() -> np.ndarray:
    """Entry convention (-1)^(ij) / sqrt(2)."""
    return np.array([[1, 1], [1, -1]], dtype=np.complex128) * _SQRT1_2


def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def pauli_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


def cnot() -> np.ndarray:
    """Two-qubit CNOT with qubit 1 (high bit) as control, qubit 0 as target."""
    m = np.zeros((4, 4), dtype=np.complex128)
    for s in range(4):
        m[s ^ 1 if s & 2 else s, s] = 1.0
    return m


def cphase(phi: float) -> np.ndarray:
    """Two-qubit controlled phase: |11> gains e^{i phi}."""
    if not math.isfinite(phi):
        raise ValidationError("controlled-phase angle must be finite")
    return np.diag([1, 1, 1, np.exp(1j * phi)]).astype(np.complex128)


def walsh(n: int) -> np.ndarray:
    """n-fold Kronecker power of the Hadamard gate."""
    _check_register(n)
    m = hadamard()
    for _ in range(n - 1):
        m = np.kron(m, hadamard())
    return m


def qft(n: int) -> np.ndarray:
    """Fourier matrix with entries omega^(jk)/sqrt(N), omega = e^(2 pi i / N)."""
    _check_register(n)
    size = 1 << n
    j = np.arange(size)
    phases = np.outer(j, j) % size  # exact integer exponents avoid drift
    return np.exp(2j * math.pi * phases / size) / math.sqrt(size)


def qft_stages(lo: int, hi: int) -> list[list[GateSpec]]:
    """Staged Fourier transform on the inclusive qubit range [lo, hi].

    One stage per target qubit, from the most significant down: a Hadamard
    followed by its trailing controlled phases.  The staged product equals
    the closed-form :func:`qft` with bit-reversed rows (no swap network is
    emitted; relabel with :func:`bit_reversal_permutation` when comparing).
    """
    if lo > hi or lo < 0:
        raise ValidationError(f"bad qubit range [{lo}, {hi}]")
    stages = []
    for t in range(hi, lo - 1, -1):
        stage = [GateSpec(GateKind.H, (t,))]
        for m in range(t - 1, lo - 1, -1):
            stage.append(GateSpec(GateKind.CPHASE, (m, t), (math.pi / (1 << (t - m)),)))
        stages.append(stage)
    return stages


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Index permutation reversing the n-bit binary expansion."""
    _check_register(n)
    size = 1 << n
    rev = np.zeros(size, dtype=np.int64)
    for s in range(size):
        r = 0
        for b in range(n):
            r |= ((s >> b) & 1) << (n - 1 - b)
        rev[s] = r
    return rev


def grover_oracle(n: int, marked: int) -> np.ndarray:
    """Diagonal +-1 matrix flipping the sign of the marked state only."""
    _check_register(n)
    if not 0 <= marked < (1 << n):
        raise ValidationError(f"marked state {marked} out of range for {n} qubits")
    d = np.ones(1 << n, dtype=np.complex128)
    d[marked] = -1.0
    return np.diag(d)


def r2(n: int) -> np.ndarray:
    """Diagonal matrix flipping the sign of the all-zeros state only."""
    _check_register(n)
    d = np.ones(1 << n, dtype=np.complex128)
    d[0] = -1.0
    return np.diag(d)


def diffusion(n: int) -> np.ndarray:
    """Inversion about the mean, entries 2/N - delta_ij.

    Equal to walsh @ r2 @ walsh up to a global factor of -1 (the product form
    carries the opposite overall sign; no observable quantity here depends on
    it).
    """
    _check_register(n)
    size = 1 << n
    return (np.full((size, size), 2.0 / size) - np.eye(size)).astype(np.complex128)


def modmul_indices(big_l: int, modulus: int, multiplier: int, control_qubit: int) -> np.ndarray:
    """Basis permutation of the controlled modular multiplication.

    Registers: low big_l qubits hold y, the next 2*big_l qubits hold x (so the
    basis index is x * 2^big_l + y).  When bit `control_qubit` of x is set and
    y < modulus, y maps to y * multiplier mod modulus; every other state is
    fixed, which completes the map to a permutation.
    """
    if big_l < 1 or 3 * big_l > _KRON_POWER_LIMIT:
        raise CapacityError(f"register of 3*{big_l} qubits exceeds the {_KRON_POWER_LIMIT}-qubit guard")
    if math.gcd(multiplier, modulus) != 1:
        raise ValidationError(f"multiplier {multiplier} is not coprime to {modulus}")
    if not 0 <= control_qubit < 2 * big_l:
        raise ValidationError(f"control qubit {control_qubit} outside the 2L-qubit first register")
    size = 1 << (3 * big_l)
    idx = np.arange(size)
    x = idx >> big_l
    y = idx & ((1 << big_l) - 1)
    new_y = y.copy()
    active = (((x >> control_qubit) & 1) == 1) & (y < modulus)
    new_y[active] = (y[active] * multiplier) % modulus
    return (x << big_l) | new_y


def modmul_permutation(big_l: int, modulus: int, multiplier: int, control_qubit: int) -> np.ndarray:
    """Dense matrix form of :func:`modmul_indices`."""
    return permutation_matrix(modmul_indices(big_l, modulus, multiplier, control_qubit))


def validate_gate(gate: GateSpec, n: int) -> None:
    """Check a gate spec against an n-qubit register; raises ValidationError."""
    size = 1 << n
    kind = gate.kind
    arity = {GateKind.H: 1, GateKind.X: 1, GateKind.Z: 1, GateKind.CNOT: 2, GateKind.CPHASE: 2}
    if kind in arity:
        if len(gate.qubits) != arity[kind]:
            raise ValidationError(f"{kind.value} takes {arity[kind]} qubit(s), got {gate.qubits}")
        if len(set(gate.qubits)) != len(gate.qubits):
            raise ValidationError(f"{kind.value} qubits must be distinct: {gate.qubits}")
        for q in gate.qubits:
            if not 0 <= q < n:
                raise ValidationError(f"qubit {q} out of range for {n} qubits")
        if kind is GateKind.CPHASE:
            if len(gate.params) != 1 or not math.isfinite(gate.params[0]):
                raise ValidationError("CPHASE needs one finite angle parameter")
    elif kind is GateKind.QFT:
        if len(gate.qubits) != 2:
            raise ValidationError(f"QFT takes a (lo, hi) qubit range, got {gate.qubits}")
        lo, hi = gate.qubits
        if not (0 <= lo <= hi < n):
            raise ValidationError(f"QFT range [{lo}, {hi}] invalid for {n} qubits")
    elif kind is GateKind.ORACLE:
        if len(gate.params) != 1 or not 0 <= int(gate.params[0]) < size:
            raise ValidationError(f"oracle marked state must be in [0, {size})")
    elif kind is GateKind.MODMUL:
        if n % 3 != 0:
            raise ValidationError("MODMUL needs a register of 3L qubits")
        if len(gate.params) != 2 or len(gate.qubits) != 1:
            raise ValidationError("MODMUL takes (modulus, multiplier) params and one control qubit")
        modulus, multiplier = int(gate.params[0]), int(gate.params[1])
        if math.gcd(multiplier, modulus) != 1:
            raise ValidationError(f"multiplier {multiplier} not coprime to {modulus}")
        if not 0 <= gate.qubits[0] < 2 * (n // 3):
            raise ValidationError("MODMUL control qubit outside the first register")
    elif kind is GateKind.PERM:
        if len(gate.params) != size:
            raise ValidationError(f"PERM needs a full {size}-entry permutation")
    # R2 / DIFFUSION take no arguments


def apply_gate(accumulated, gate: GateSpec, n: int, overwrite: bool = False) -> np.ndarray:
    """Return G @ accumulated for the register-wide embedding G of `gate`.

    The input is never mutated unless ``overwrite=True`` (callers that own the
    array, like the trace engine, opt in to skip a 2^n x 2^n copy).  The
    result may or may not alias the input; always use the return value.
    """
    a = np.asarray(accumulated, dtype=np.complex128)
    size = 1 << n
    if a.shape != (size, size):
        raise ShapeError(f"accumulated operator must be {size}x{size}, got {a.shape}")
    validate_gate(gate, n)
    kind = gate.kind

    if kind is GateKind.H:
        return _rows_hadamard(a, gate.qubits[0], n, overwrite)
    if kind is GateKind.X:
        view = _bit_view(a, gate.qubits[0], n)
        out = a if overwrite else np.empty_like(a)
        ov = _bit_view(out, gate.qubits[0], n)
        tmp = view[:, 0].copy()
        ov[:, 0] = view[:, 1]
        ov[:, 1] = tmp
        return out
    if kind is GateKind.Z:
        out = a if overwrite else a.copy()
        _bit_view(out, gate.qubits[0], n)[:, 1] *= -1.0
        return out
    if kind is GateKind.CNOT:
        control, target = gate.qubits
        idx = np.arange(size)
        sigma = idx ^ (((idx >> control) & 1) << target)
        out = np.empty_like(a)
        out[sigma] = a
        return out
    if kind is GateKind.CPHASE:
        control, target = gate.qubits
        out = a if overwrite else a.copy()
        # both-bits-set rows via two nested bit views (no index temporaries);
        # only the contiguous last axis is ever split, so these stay views
        hi, lo = max(control, target), min(control, target)
        slab = _bit_view(out, hi, n)[:, 1]
        inner = slab.reshape(slab.shape[0], -1, 2, (1 << lo) * out.shape[1])
        inner[:, :, 1] *= np.exp(1j * gate.params[0])
        return out
    if kind in (GateKind.ORACLE, GateKind.R2):
        flip = int(gate.params[0]) if kind is GateKind.ORACLE else 0
        out = a if overwrite else a.copy()
        out[flip] *= -1.0
        return out
    if kind is GateKind.DIFFUSION:
        # (2/N 11^T - 1) @ A: broadcast the column sums, subtract A
        colsum = a.sum(axis=0)
        out = np.negative(a, out=a if overwrite else None)
        out += (2.0 / size) * colsum
        return out
    if kind is GateKind.MODMUL:
        modulus, multiplier = int(gate.params[0]), int(gate.params[1])
        sigma = modmul_indices(n // 3, modulus, multiplier, gate.qubits[0])
        out = np.empty_like(a)
        out[sigma] = a
        return out
    if kind is GateKind.PERM:
        sigma = np.asarray(gate.params, dtype=np.int64)
        out = np.empty_like(a)
        out[sigma] = a
        return out
    if kind is GateKind.QFT:
        lo, hi = gate.qubits
        out = a if overwrite else a.copy()
        for stage in qft_stages(lo, hi):
            for g in stage:
                out = apply_gate(out, g, n, overwrite=True)
        return out
    raise ValidationError(f"unsupported gate kind {kind}")


def gate_matrix(gate: GateSpec, n: int) -> np.ndarray:
    """Dense register-wide embedding of a gate (small n only)."""
    return apply_gate(identity(1 << n), gate, n, overwrite=True)


def _bit_view(a: np.ndarray, q: int, n: int) -> np.ndarray:
    """Reshape rows of a (2^n x M) array to expose bit q: (hi, bit, rest)."""
    rows, cols = a.shape
    return a.reshape(rows >> (q + 1), 2, (1 << q) * cols)


def _rows_hadamard(a: np.ndarray, q: int, n: int, overwrite: bool) -> np.ndarray:
    view = _bit_view(a, q, n)
    if overwrite:
        # temp-free butterfly: (x, y) -> (x + y, x - y)
        view[:, 0] += view[:, 1]
        view[:, 1] *= -2.0
        view[:, 1] += view[:, 0]
        view *= _SQRT1_2
        return a
    out = np.empty_like(a)
    ov = _bit_view(out, q, n)
    np.add(view[:, 0], view[:, 1], out=ov[:, 0])
    np.subtract(view[:, 0], view[:, 1], out=ov[:, 1])
    ov *= _SQRT1_2
    return out


def _check_register(n: int) -> None:
    if n < 1:
        raise ValidationError(f"register size must be >= 1, got {n}")
    if n > _KRON_POWER_LIMIT:
        raise CapacityError(f"register size {n} exceeds the {_KRON_POWER_LIMIT}-qubit guard")
