"""The interference measure of a propagator, in three equivalent forms.

The measure quantifies how strongly the final basis-state probabilities of a
process depend on the initial phases, averaged over a "democratic" input with
equal amplitude 1/sqrt(N) on every basis state.  In superoperator components,

    I(P) = sum_{i,k,l} |P_{ii,kl}|^2  -  sum_{i,k} |P_{ii,kk}|^2 .

For a unitary U this collapses to ``N - sum_{i,k} |U_{ik}|^4`` (N minus the
summed inverse participation ratio of the columns), bounded by 0 and N-1.
For a Kraus set {E_l} the equivalent operator-sum expression is

    I = sum_{i,k,m} |sum_l (E_l)_{ik} (E_l^*)_{im}|^2
        - sum_{i,k} (sum_l |(E_l)_{ik}|^2)^2 .

The first term is evaluated through a row-Gram identity (see
:func:`interference_kraus`), which costs O(L^2 N^2) instead of the naive
O(L N^3) and keeps dimension-4096 evaluations cheap.

The logarithmic unit is the i-bit: ``log2(I + 1)``; a single Hadamard gate
realizes exactly one i-bit.

:func:`phase_sensitivity_estimate` is an independent Monte-Carlo oracle: it
differentiates the actual output probabilities with respect to the input
phases and recovers the same quantity via ``I = (N^2/2) * C`` without ever
touching the formulas above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel, Superoperator
from .errors import CapacityError, ConsistencyError, ValidationError
from .matrixcore import as_matrix, is_unitary

__all__ = [
    "interference_unitary",
    "interference_kraus",
    "interference_superop",
    "ibits",
    "PhaseSensitivityEstimate",
    "phase_sensitivity_estimate",
]

# Results slightly below zero are floating-point dust and clamp to 0; anything
# more negative than the floor indicates a real bug and raises.  The unitary
# form accumulates far less roundoff than the operator-sum forms, hence the
# tighter floor.
_UNITARY_DUST_FLOOR = -1e-12
_KRAUS_DUST_FLOOR = -1e-9

_PHASE_SENSITIVITY_DIM_LIMIT = 16
_FD_STEP = 1e-5


def interference_unitary(u, validate: bool = True) -> float:
    """Interference of a unitary propagator: N - sum |U_ik|^4.

    ``validate=False`` skips the O(N^3) unitarity check; callers that build U
    as a product of unitaries (the trace engine) use it on large matrices.
    """
    u = as_matrix(u)
    if validate and not is_unitary(u, 1e-9):
        raise ValidationError("interference_unitary requires a unitary matrix")
    n = u.shape[0]
    f = np.ascontiguousarray(u).view(np.float64).reshape(n, n, 2)
    m2 = np.einsum("ijk,ijk->ij", f, f)  # |U_ij|^2, single temporary
    value = n - float(np.einsum("ij,ij->", m2, m2))
    return _clamp(value, _UNITARY_DUST_FLOOR)


def interference_kraus(c: QuantumChannel) -> float:
    """Interference of a channel from its Kraus operators.

    The first term of the operator-sum expression is rewritten with the
    row-Gram identity: stacking the i-th rows of all L Kraus operators into
    the L x N matrix B_i,

        sum_{k,m} |(B_i^dag B_i)_{km}|^2 = sum_{l,l'} |(B_i B_i^dag)_{ll'}|^2,

    because both Gram matrices share the squared singular values of B_i.  The
    right-hand side needs only L^2 length-N inner products per row i.
    """
    stack = np.stack(c.kraus)  # (L, N, N); stack[l, i, k] = (E_l)_{ik}
    gram = np.einsum("lik,mik->ilm", stack, stack.conj())
    first = float(np.sum(gram.real**2 + gram.imag**2))
    diag = np.sum(stack.real**2 + stack.imag**2, axis=0)
    second = float(np.sum(diag**2))
    return _clamp(first - second, _KRAUS_DUST_FLOOR)


def interference_superop(p: Superoperator) -> float:
    """Interference from full superoperator components (dim-guarded)."""
    n = p.dim
    if n > 64:
        raise CapacityError(f"superoperator measure capped at dim 64, got {n}")
    blocks = p.entries.reshape(n, n, n, n)
    diag_rows = blocks[np.arange(n), np.arange(n)]  # D[i, k, l] = P_{ii,kl}
    mod2 = diag_rows.real**2 + diag_rows.imag**2
    first = float(np.sum(mod2))
    second = float(np.sum(mod2[:, np.arange(n), np.arange(n)]))
    return _clamp(first - second, _KRAUS_DUST_FLOOR)


def ibits(i_value: float) -> float:
    """Interference bits: log2(I + 1)."""
    if i_value < 0:
        raise ValidationError(f"interference value must be non-negative, got {i_value}")
    return math.log2(i_value + 1.0)


@dataclass(frozen=True)
class PhaseSensitivityEstimate:
    """Monte-Carlo estimate of the phase-averaged sensitivity trace."""

    c_estimate: float
    stderr: float
    samples: int

    def interference(self, dim: int) -> float:
        """Convert to the measure scale: I = (dim^2 / 2) * C."""
        return 0.5 * dim * dim * self.c_estimate

    def interference_stderr(self, dim: int) -> float:
        return 0.5 * dim * dim * self.stderr


def phase_sensitivity_estimate(
    c: QuantumChannel, samples: int, seed: int
) -> PhaseSensitivityEstimate:
    """Estimate C(P): the phase average of tr(S S^T).

    S_il = d p'_i / d phi_l is the sensitivity of the final probabilities to
    the initial phases, evaluated by central finite differences (step 1e-5)
    around uniform random phase draws, with fixed input amplitudes 1/sqrt(N).
    Deterministic for a given (samples, seed) pair.
    """
    n = c.dim
    if n > _PHASE_SENSITIVITY_DIM_LIMIT:
        raise CapacityError(
            f"phase-sensitivity oracle capped at dim {_PHASE_SENSITIVITY_DIM_LIMIT}, got {n}"
        )
    if samples < 100:
        raise ValidationError(f"need at least 100 samples, got {samples}")
    rng = np.random.default_rng(seed)
    amp = 1.0 / math.sqrt(n)
    h = _FD_STEP
    eye = np.eye(n)
    kraus_t = [e.T.copy() for e in c.kraus]
    per_sample = np.empty(samples, dtype=np.float64)
    for s in range(samples):
        phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
        shifted = np.concatenate([phi + h * eye, phi - h * eye], axis=0)  # (2n, n)
        psi = amp * np.exp(1j * shifted)
        probs = np.zeros((2 * n, n))
        for et in kraus_t:
            v = psi @ et  # rows: E_l applied to each shifted state
            probs += v.real**2 + v.imag**2
        sens = (probs[:n] - probs[n:]) / (2.0 * h)  # sens[l, i] = S_il
        per_sample[s] = float(np.sum(sens**2))
    c_est = float(per_sample.mean())
    stderr = float(per_sample.std(ddof=1) / math.sqrt(samples))
    return PhaseSensitivityEstimate(c_estimate=c_est, stderr=stderr, samples=samples)


def _clamp(value: float, floor: float) -> float:
    if value >= 0.0:
        return value
    if value >= floor:
        return 0.0
    raise ConsistencyError(f"interference came out {value}, below the dust floor {floor}")
