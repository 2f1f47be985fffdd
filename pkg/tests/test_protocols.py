import math

import numpy as np
import pytest

from ibits.channels import apply, bitflip, projective_measurement
from ibits.errors import CapacityError, ValidationError
from ibits.gates import GateKind, GateSpec, bit_reversal_permutation
from ibits.measure import ibits
from ibits.protocols import (
    Accumulator,
    Step,
    accumulate,
    grover_iterations,
    grover_steps,
    grover_trace,
    shor_steps,
    shor_trace,
    teleportation_channel,
    teleportation_trace,
)


def h_step(q=0):
    return Step("H", (GateSpec(GateKind.H, (q,)),))


def assert_trace_invariants(trace):
    for i, record in enumerate(trace.records, start=1):
        assert record.step == i
        assert record.interference >= 0.0
        assert abs(record.ibits - math.log2(record.interference + 1.0)) < 1e-12


def test_single_hadamard_trace():
    trace = accumulate([h_step()], 2)
    assert len(trace.records) == 1
    record = trace.records[0]
    assert record.step == 1 and record.label == "H"
    assert abs(record.interference - 1.0) < 1e-9
    assert abs(record.ibits - 1.0) < 1e-9


def test_two_hadamards_cancel():
    trace = accumulate([h_step(), h_step()], 2)
    assert trace.records[-1].interference < 1e-9


def test_permutation_steps_stay_at_zero():
    steps = [
        Step("X", (GateSpec(GateKind.X, (0,)),)),
        Step("CNOT", (GateSpec(GateKind.CNOT, (0, 1)),)),
        Step("X", (GateSpec(GateKind.X, (1,)),)),
    ]
    trace = accumulate(steps, 4)
    assert all(r.interference == 0.0 for r in trace.records)


def test_checkpoint_steps_record_without_change():
    trace = accumulate([h_step(), Step("checkpoint"), h_step()], 2)
    assert len(trace.records) == 3
    assert abs(trace.records[0].interference - trace.records[1].interference) < 1e-15


def test_channel_step_switches_to_kraus_path():
    acc = Accumulator(2)
    assert acc.on_unitary_path
    acc.apply_gates((GateSpec(GateKind.H, (0,)),))
    acc.apply_channel(bitflip(0.25))
    assert not acc.on_unitary_path
    assert abs(acc.interference() - 0.25) < 1e-9  # (1 - 2p)^2 at p = 1/4
    # unitary gates keep working on the Kraus path
    acc.apply_gates((GateSpec(GateKind.H, (0,)),))
    assert acc.channel.trace_preserving


# ------------------------------------------------------------- teleportation


def test_teleportation_trace_values():
    trace = teleportation_trace()
    assert_trace_invariants(trace)
    assert [r.label for r in trace.records] == [
        "H 2",
        "CNOT 2 1",
        "CNOT 0 1",
        "H 0",
        "MEASURE 0 1",
        "CORRECT",
    ]
    values = [r.interference for r in trace.records]
    assert np.allclose(values, [4, 4, 4, 6, 6, 6], atol=1e-9)
    assert abs(max(r.ibits for r in trace.records) - math.log2(7)) < 1e-9


def test_teleportation_channel_is_trace_preserving():
    ch = teleportation_channel()
    assert ch.trace_preserving
    total = sum(k.conj().T @ k for k in ch.kraus)
    assert np.abs(total - np.eye(8)).max() < 1e-9


def test_teleportation_moves_arbitrary_states(rng):
    ch = teleportation_channel()
    for _ in range(20):
        amp = rng.normal(size=2) + 1j * rng.normal(size=2)
        amp /= np.linalg.norm(amp)
        psi = np.zeros(8, dtype=complex)
        psi[0], psi[1] = amp[0], amp[1]  # input state on qubit 0
        out = apply(ch, np.outer(psi, psi.conj()))
        reduced = np.zeros((2, 2), dtype=complex)
        for rest in range(4):
            for b in (0, 1):
                for bp in (0, 1):
                    reduced[b, bp] += out[b * 4 + rest, bp * 4 + rest]
        assert np.abs(reduced - np.outer(amp, amp.conj())).max() < 1e-9


# ------------------------------------------------------------------- search


def test_grover_iteration_count():
    assert grover_iterations(8) == 12
    assert grover_iterations(2) == 1


def test_grover_full_trace_shape_and_endpoints():
    trace = grover_trace(8, marked=3)
    assert_trace_invariants(trace)
    k = grover_iterations(8)
    assert len(trace.records) == 2 * k + 1
    assert abs(trace.records[0].interference - 255.0) < 1e-9
    assert 253.0 <= trace.records[-1].interference <= 255.0


def test_grover_oracle_records_equal_predecessors():
    trace = grover_trace(6, marked=11)
    values = [r.interference for r in trace.records]
    for i, record in enumerate(trace.records):
        if record.label == "R1" and i > 0:
            assert abs(values[i] - values[i - 1]) < 1e-12


def test_grover_trace_independent_of_marked_state():
    a = [r.interference for r in grover_trace(5, marked=0).records]
    b = [r.interference for r in grover_trace(5, marked=19).records]
    assert np.allclose(a, b, atol=1e-9)


def test_grover_used_variant():
    trace = grover_trace(7, marked=0, include_initial_w=False)
    k = grover_iterations(7)
    assert len(trace.records) == 2 * k
    assert trace.records[0].label == "R1"
    assert trace.records[0].interference == 0.0
    first_d = trace.records[1].interference
    assert abs(first_d - (8 - 24 / 128 + 16 / 128**2)) < 1e-9
    # oscillations damp: successive diffusion-record deltas shrink
    d_values = [r.interference for r in trace.records if r.label == "D"]
    deltas = [abs(b - a) for a, b in zip(d_values, d_values[1:])]
    assert all(b <= a + 1e-9 for a, b in zip(deltas[1:], deltas[2:]))


@pytest.mark.parametrize("n", range(4, 11))
def test_grover_concentrates_on_marked_state(n, rng):
    marked = int(rng.integers(1 << n))
    acc = Accumulator(1 << n)
    for step in grover_steps(n, marked, include_initial_w=True):
        acc.apply_gates(step.gates)
    assert abs(acc.unitary[marked, 0]) ** 2 > 0.9


def test_grover_validation():
    with pytest.raises(ValidationError):
        grover_trace(1, 0)
    with pytest.raises(ValidationError):
        grover_trace(11, 0)
    with pytest.raises(ValidationError):
        grover_trace(4, 16)


# ---------------------------------------------------------------- factoring


def test_shor_small_modulus_full_trace():
    # modulus 3: L = 2, n = 6; same structure as the flagship run at 15
    trace = shor_trace(3, 2)
    assert_trace_invariants(trace)
    assert len(trace.records) == 12
    n = 6
    for k in range(1, 5):
        assert abs(trace.records[k - 1].interference - (2**n - 2 ** (n - k))) < 1e-9
    ceiling = 2**n - 2**2
    for record in trace.records[4:8]:
        assert abs(record.interference - ceiling) < 1e-9


def test_shor_small_modulus_used_variant():
    trace = shor_trace(3, 2, include_initial_w=False)
    assert len(trace.records) == 8
    assert all(r.interference == 0.0 for r in trace.records[:4])
    assert abs(trace.records[-1].interference - (2**6 - 2**2)) < 1e-9


def test_shor_validation_and_capacity():
    with pytest.raises(ValidationError):
        shor_trace(15, 6)  # shares a factor with 15
    with pytest.raises(ValidationError):
        shor_trace(15, 1)
    with pytest.raises(CapacityError):
        shor_trace(21, 2)  # would need 15 qubits


def _first_register_distribution(modulus, base):
    steps, n = shor_steps(modulus, base, include_initial_w=True)
    acc = Accumulator(1 << n)
    for step in steps:
        acc.apply_gates(step.gates)
    big_l = n // 3
    final = acc.unitary[:, 1]  # initial state |x=0>|y=1>
    probs = (np.abs(final) ** 2).reshape(1 << (2 * big_l), 1 << big_l).sum(axis=1)
    return probs, big_l


def _order(base, modulus):
    r, y = 1, base % modulus
    while y != 1:
        y = (y * base) % modulus
        r += 1
    return r


@pytest.mark.parametrize("modulus,base", [(3, 2)])
def test_shor_period_peaks_small(modulus, base):
    probs, big_l = _first_register_distribution(modulus, base)
    rev = bit_reversal_permutation(2 * big_l)
    r = _order(base, modulus)
    spacing = (1 << (2 * big_l)) // r
    # staged transform emits bit-reversed register indices
    peak_indices = [j for j in range(len(probs)) if rev[j] % spacing == 0]
    assert probs[peak_indices].sum() > 0.999


@pytest.mark.slow
def test_shor_period_peaks_flagship():
    probs, big_l = _first_register_distribution(15, 7)
    rev = bit_reversal_permutation(2 * big_l)
    spacing = (1 << (2 * big_l)) // _order(7, 15)  # 256 / 4
    peak_indices = [j for j in range(len(probs)) if rev[j] % spacing == 0]
    assert probs[peak_indices].sum() > 0.999


def test_unitary_path_records_respect_dimension_bound():
    trace = grover_trace(4, 5)
    for record in trace.records:
        assert record.interference <= 2**4 - 1 + 1e-9
