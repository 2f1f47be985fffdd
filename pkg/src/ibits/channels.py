"""Quantum channels in the operator-sum (Kraus) formalism.

A channel acts on a density matrix as ``rho' = sum_l E_l rho E_l^dag``.  The
channel is trace preserving when ``sum_l E_l^dag E_l = 1``; the flag is
recomputed at construction rather than trusted from the caller.

Superoperators (the full N^2 x N^2 propagator with composite indices
``P[(i*N+j), (k*N+l)]``) are available for small dimensions only: memory grows
as N^4, and nothing in this library needs them beyond N = 64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ShapeError, ValidationError
from .matrixcore import as_matrix, identity, is_unitary, kron

__all__ = [
    "QuantumChannel",
    "Superoperator",
    "SUPEROP_DIM_LIMIT",
    "KRAUS_PRUNE_TOL",
    "channel_from_kraus",
    "unitary_channel",
    "identity_channel",
    "compose",
    "tensor_extend",
    "embed_qubit",
    "bitflip",
    "phaseflip",
    "projective_measurement",
    "kraus_to_superop",
    "apply",
]

SUPEROP_DIM_LIMIT = 64

# compose() drops Kraus operators below this max-norm; projector chains
# produce exact zeros, so the set would otherwise grow without bound.
KRAUS_PRUNE_TOL = 1e-14

_TP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Ordered set of same-shaped square Kraus operators."""

    dim: int
    kraus: tuple[np.ndarray, ...]
    trace_preserving: bool

    def __len__(self) -> int:
        return len(self.kraus)


def channel_from_kraus(ops) -> QuantumChannel:
    """Validate a Kraus list and compute the trace-preservation flag."""
    mats = tuple(as_matrix(op) for op in ops)
    if not mats:
        raise ValidationError("a channel needs at least one Kraus operator")
    dim = mats[0].shape[0]
    for m in mats:
        if m.shape != (dim, dim):
            raise ShapeError(f"Kraus operators must all be {dim}x{dim}, got {m.shape}")
    total = sum(m.conj().T @ m for m in mats)
    tp = bool(np.abs(total - np.eye(dim)).max() <= _TP_TOL)
    return QuantumChannel(dim=dim, kraus=mats, trace_preserving=tp)


def unitary_channel(u) -> QuantumChannel:
    """Single-Kraus channel {u}; rejects non-unitary input."""
    u = as_matrix(u)
    if u.shape[0] != u.shape[1] or not is_unitary(u, 1e-9):
        raise ValidationError("unitary_channel requires a unitary matrix (tol 1e-9)")
    return QuantumChannel(dim=u.shape[0], kraus=(u,), trace_preserving=True)


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel(dim=dim, kraus=(identity(dim),), trace_preserving=True)


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """Channel applying `first` then `second`: Kraus set {F_m E_l}.

    Products with max-norm <= KRAUS_PRUNE_TOL are dropped.
    """
    if second.dim != first.dim:
        raise ShapeError(f"cannot compose dim {second.dim} after dim {first.dim}")
    products = []
    for f in second.kraus:
        for e in first.kraus:
            p = f @ e
            if np.abs(p).max() > KRAUS_PRUNE_TOL:
                products.append(p)
    if not products:
        # fully annihilating composition; keep one zero operator so the
        # channel stays well formed
        products.append(np.zeros((first.dim, first.dim), dtype=np.complex128))
    return channel_from_kraus(products)


def tensor_extend(c: QuantumChannel, m: int) -> QuantumChannel:
    """Adjoin an untouched factor of dimension m: each E_l -> kron(E_l, 1_m)."""
    if m < 1:
        raise ValidationError(f"tensor factor must be >= 1, got {m}")
    if m == 1:
        return c
    eye = identity(m)
    return channel_from_kraus(kron(e, eye) for e in c.kraus)


def embed_qubit(c: QuantumChannel, n_qubits: int, qubit: int) -> QuantumChannel:
    """Lift a single-qubit channel to qubit `qubit` of an n-qubit register.

    Qubit 0 is the least significant bit of the basis index.
    """
    if c.dim != 2:
        raise ShapeError(f"embed_qubit needs a single-qubit channel, got dim {c.dim}")
    if not 0 <= qubit < n_qubits:
        raise ValidationError(f"qubit {qubit} out of range for {n_qubits} qubits")
    hi = identity(1 << (n_qubits - 1 - qubit))
    lo = identity(1 << qubit)
    return channel_from_kraus(kron(hi, kron(e, lo)) for e in c.kraus)


def bitflip(p: float) -> QuantumChannel:
    """Single-qubit bit-flip error channel; p is the no-error probability."""
    _check_probability(p)
    x = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    return channel_from_kraus((np.sqrt(p) * identity(2), np.sqrt(1 - p) * x))


def phaseflip(p: float) -> QuantumChannel:
    """Single-qubit phase-flip error channel; p is the no-error probability."""
    _check_probability(p)
    z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return channel_from_kraus((np.sqrt(p) * identity(2), np.sqrt(1 - p) * z))


def projective_measurement(dim: int, measured_bits) -> QuantumChannel:
    """Computational-basis measurement of the given bit positions.

    dim must be a power of two.  Returns one diagonal 0/1 projector per
    outcome pattern; outcome index m assigns bit j of m to the j-th measured
    bit in ascending position order.
    """
    n = dim.bit_length() - 1
    if dim < 2 or dim != 1 << n:
        raise ValidationError(f"measurement needs a power-of-two dimension, got {dim}")
    bits = sorted(set(int(b) for b in measured_bits))
    if not bits:
        raise ValidationError("measured_bits must be non-empty")
    if bits[0] < 0 or bits[-1] >= n:
        raise ValidationError(f"measured bits {bits} out of range for {n} qubits")
    states = np.arange(dim)
    projectors = []
    for outcome in range(1 << len(bits)):
        mask = np.ones(dim, dtype=bool)
        for j, b in enumerate(bits):
            mask &= ((states >> b) & 1) == ((outcome >> j) & 1)
        projectors.append(np.diag(mask.astype(np.complex128)))
    return channel_from_kraus(projectors)


@dataclass(frozen=True, eq=False)
class Superoperator:
    """Full propagator with entries[(i*N+j), (k*N+l)] = P_{ij,kl}."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.dim > SUPEROP_DIM_LIMIT:
            raise CapacityError(
                f"superoperator dim {self.dim} exceeds the guard {SUPEROP_DIM_LIMIT}"
            )
        n2 = self.dim * self.dim
        if self.entries.shape != (n2, n2):
            raise ShapeError(f"superoperator entries must be {n2}x{n2}")


def kraus_to_superop(c: QuantumChannel) -> Superoperator:
    """P_{ij,km} = sum_l (E_l)_{ik} (E_l^*)_{jm}, i.e. sum_l kron(E_l, E_l^*)."""
    if c.dim > SUPEROP_DIM_LIMIT:
        raise CapacityError(
            f"superoperator form is capped at dim {SUPEROP_DIM_LIMIT}, got {c.dim}"
        )
    total = np.zeros((c.dim * c.dim, c.dim * c.dim), dtype=np.complex128)
    for e in c.kraus:
        total += np.kron(e, e.conj())
    return Superoperator(dim=c.dim, entries=total)


def apply(c: QuantumChannel, rho) -> np.ndarray:
    """Propagate a density matrix: rho' = sum_l E_l rho E_l^dag."""
    rho = as_matrix(rho)
    if rho.shape != (c.dim, c.dim):
        raise ShapeError(f"density matrix shape {rho.shape} does not match dim {c.dim}")
    if np.abs(rho - rho.conj().T).max() > 1e-9:
        raise ValidationError("density matrix must be Hermitian")
    if abs(np.trace(rho) - 1.0) > 1e-9:
        raise ValidationError("density matrix must have unit trace")
    out = np.zeros_like(rho)
    for e in c.kraus:
        out += e @ rho @ e.conj().T
    return out


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability must be in [0, 1], got {p}")
