"""Quantitative interference of quantum propagators.

Computes the interference measure of unitary, Kraus, and superoperator
propagators, converts it to i-bits, and traces its accumulation step by step
through gate and channel sequences (teleportation, search, factoring, linear
optics).
"""

from .channels import (
    QuantumChannel,
    Superoperator,
    apply,
    bitflip,
    channel_from_kraus,
    compose,
    embed_qubit,
    identity_channel,
    kraus_to_superop,
    phaseflip,
    projective_measurement,
    tensor_extend,
    unitary_channel,
)
from .errors import CapacityError, ConsistencyError, ShapeError, ValidationError
from .measure import (
    PhaseSensitivityEstimate,
    ibits,
    interference_kraus,
    interference_superop,
    interference_unitary,
    phase_sensitivity_estimate,
)
from .protocols import (
    InterferenceTrace,
    Step,
    TraceRecord,
    accumulate,
    grover_trace,
    shor_trace,
    teleportation_trace,
)

__version__ = "0.1.0"

__all__ = [
    "QuantumChannel",
    "Superoperator",
    "apply",
    "bitflip",
    "channel_from_kraus",
    "compose",
    "embed_qubit",
    "identity_channel",
    "kraus_to_superop",
    "phaseflip",
    "projective_measurement",
    "tensor_extend",
    "unitary_channel",
    "CapacityError",
    "ConsistencyError",
    "ShapeError",
    "ValidationError",
    "PhaseSensitivityEstimate",
    "ibits",
    "interference_kraus",
    "interference_superop",
    "interference_unitary",
    "phase_sensitivity_estimate",
    "InterferenceTrace",
    "Step",
    "TraceRecord",
    "accumulate",
    "grover_trace",
    "shor_trace",
    "teleportation_trace",
    "__version__",
]
