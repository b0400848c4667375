import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from pulsarvqc.simulator import (
    Gate,
    Statevector,
    apply_gate,
    parity_probability,
    probabilities,
    run,
    zero_state,
)


def _gates(spec):
    return [Gate(k, q, a) for k, q, a in spec]


def test_zero_state():
    assert np.array_equal(zero_state(1).amplitudes, [1, 0])
    s = zero_state(3)
    assert len(s) == 8 and s.n_qubits == 3
    assert s.amplitudes[0] == 1 and not s.amplitudes[1:].any()


@pytest.mark.parametrize("n", [0, -1, 25])
def test_zero_state_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        zero_state(n)


def test_hadamard():
    s = apply_gate(zero_state(1), Gate("H", (0,)))
    assert np.allclose(s.amplitudes, [1 / math.sqrt(2)] * 2, atol=1e-15)


def test_cnot_truth_table_qubit0_is_lsb():
    # |01> means qubit 0 set -> index 1; CNOT(0 -> 1) gives |11>, index 3
    s = apply_gate(zero_state(2), Gate("X", (0,)))
    assert s.amplitudes[1] == 1
    s = apply_gate(s, Gate("CNOT", (0, 1)))
    assert np.array_equal(np.abs(s.amplitudes), [0, 0, 0, 1])
    # control clear: nothing happens
    s = apply_gate(apply_gate(zero_state(2), Gate("X", (1,))), Gate("CNOT", (0, 1)))
    assert s.amplitudes[2] == 1


def test_phase_two_pi_is_identity():
    rng = np.random.default_rng(3)
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    s = Statevector(amps / np.linalg.norm(amps))
    for q in range(3):
        out = apply_gate(s, Gate("P", (q,), 2 * math.pi))
        assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-12)


def test_apply_gate_does_not_mutate_input():
    s = zero_state(2)
    apply_gate(s, Gate("H", (0,)))
    assert s.amplitudes[0] == 1


@pytest.mark.parametrize(
    "gate",
    [("H", (2,), None), ("CNOT", (0, 5), None)],
)
def test_out_of_range_targets(gate):
    with pytest.raises(ValueError):
        apply_gate(zero_state(2), Gate(*gate))


@pytest.mark.parametrize(
    "kind,qubits,angle",
    [("CNOT", (1, 1), None), ("RY", (0,), None), ("H", (0,), 1.0), ("SWAP", (0, 1), None), ("CNOT", (0,), None)],
)
def test_malformed_gates(kind, qubits, angle):
    with pytest.raises(ValueError):
        Gate(kind, qubits, angle)


def test_gate_matrices_unitary():
    rng = np.random.default_rng(0)
    for kind in ["H", "X", "P", "RY", "RZ", "CNOT"]:
        angle = float(rng.uniform(-7, 7)) if kind in ("P", "RY", "RZ") else None
        qubits = (0, 1) if kind == "CNOT" else (0,)
        m = Gate(kind, qubits, angle).matrix()
        assert np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-12)


def test_probabilities():
    s = Statevector([1 / math.sqrt(2), 1 / math.sqrt(2)])
    assert np.allclose(probabilities(s), [0.5, 0.5])
    assert np.array_equal(probabilities(zero_state(2)), [1, 0, 0, 0])


def test_parity_probability():
    assert parity_probability(zero_state(3)) == (1.0, 0.0)
    assert parity_probability(Statevector([0, 1])) == (0.0, 1.0)
    s = run(_gates([("H", (0,), None), ("H", (1,), None)]), 2)
    # brute force over the four basis states
    probs = np.abs(s.amplitudes) ** 2
    odd = sum(p for i, p in enumerate(probs) if bin(i).count("1") % 2)
    assert parity_probability(s)[1] == pytest.approx(odd) == pytest.approx(0.5)


def test_random_circuit_matches_dense_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        spec = oracle.random_gates(rng, n, 25)
        got = run(_gates(spec), n).amplitudes
        assert np.allclose(got, oracle.run_dense(n, spec), atol=1e-10, rtol=0)
        assert probabilities(run(_gates(spec), n)).sum() == pytest.approx(1, abs=1e-10)


def test_batched_kernel_matches_row_by_row():
    from pulsarvqc.simulator import apply_inplace

    rng = np.random.default_rng(5)
    batch = np.zeros((4, 8), dtype=complex)
    batch[:, 0] = 1
    angles = rng.uniform(0, 3, 4)
    for kind, q in [("H", 0), ("RY", 1), ("CNOT", (1, 2)), ("P", 2), ("RZ", 0)]:
        qubits = q if isinstance(q, tuple) else (q,)
        apply_inplace(batch, 3, kind, qubits, angles if kind in ("P", "RY", "RZ") else None)
    for row, a in zip(batch, angles):
        spec = [("H", (0,), None), ("RY", (1,), a), ("CNOT", (1, 2), None), ("P", (2,), a), ("RZ", (0,), a)]
        assert np.allclose(row, oracle.run_dense(3, spec), atol=1e-12)


angle = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_norm_preserved_over_long_circuits(seed, n):
    rng = np.random.default_rng(seed)
    s = run(_gates(oracle.random_gates(rng, n, 1000)), n)
    assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_involutions(seed):
    rng = np.random.default_rng(seed)
    spec = oracle.random_gates(rng, 3, 10)
    s = run(_gates(spec), 3)
    for g in [Gate("H", (1,)), Gate("X", (2,)), Gate("CNOT", (2, 0))]:
        assert np.allclose(apply_gate(apply_gate(s, g), g).amplitudes, s.amplitudes, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), angle, st.sampled_from(["RY", "RZ", "P"]))
def test_rotation_inverse(seed, theta, kind):
    rng = np.random.default_rng(seed)
    s = run(_gates(oracle.random_gates(rng, 2, 8)), 2)
    out = apply_gate(apply_gate(s, Gate(kind, (1,), theta)), Gate(kind, (1,), -theta))
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-12)
