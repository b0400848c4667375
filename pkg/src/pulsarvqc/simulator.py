"""Dense statevector simulation.

Index convention: qubit 0 is the least-significant bit of a basis-state
index, so on two qubits index 1 is |q1 q0> = |01> (qubit 0 set).

Gate kernels work on amplitude arrays of shape ``(2**n,)`` or
``(batch, 2**n)``; angles may be scalars or length-``batch`` arrays, which
lets the classifier push a whole training set through one circuit at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 24

SINGLE_QUBIT = frozenset({"H", "X", "P", "RY", "RZ"})
PARAMETRIC = frozenset({"P", "RY", "RZ"})
GATE_KINDS = SINGLE_QUBIT | {"CNOT"}

_SQRT1_2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """A concrete gate: kind, target qubits and (for P/RY/RZ) an angle in radians.

    For CNOT, ``qubits`` is ``(control, target)``.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if self.kind == "CNOT" and self.qubits[0] == self.qubits[1]:
            raise ValueError("CNOT control and target must differ")
        if self.kind in PARAMETRIC:
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    def matrix(self) -> np.ndarray:
        """Local unitary (2x2, or 4x4 in the basis |target control> for CNOT)."""
        if self.kind == "CNOT":
            # row/col index = 2*target_bit + control_bit
            m = np.eye(4, dtype=complex)
            m[[1, 3]] = m[[3, 1]]
            return m
        return _single_matrix(self.kind, self.angle)


def _single_matrix(kind: str, angle: float | None) -> np.ndarray:
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "P":
        return np.diag([1.0, np.exp(1j * angle)])
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


@dataclass(frozen=True, eq=False)
class Statevector:
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise ValueError("amplitude vector length must be a power of two >= 2")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def __len__(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


def zero_state(n_qubits: int) -> Statevector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(amps)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Return a new state with ``gate`` applied."""
    n = state.n_qubits
    if any(q >= n for q in gate.qubits):
        raise ValueError(f"gate {gate.kind} on {gate.qubits} out of range for {n} qubits")
    amps = np.array(state.amplitudes)
    apply_inplace(amps, n, gate.kind, gate.qubits, gate.angle)
    return Statevector(amps)


def run(gates: Iterable[Gate], n_qubits: int) -> Statevector:
    """Apply ``gates`` in order to |0...0>."""
    amps = np.array(zero_state(n_qubits).amplitudes)
    for gate in gates:
        if any(q >= n_qubits for q in gate.qubits):
            raise ValueError(f"gate {gate.kind} on {gate.qubits} out of range")
        apply_inplace(amps, n_qubits, gate.kind, gate.qubits, gate.angle)
    return Statevector(amps)


def probabilities(state: Statevector) -> np.ndarray:
    amps = state.amplitudes
    return amps.real**2 + amps.imag**2


def parity_probability(state: Statevector) -> tuple[float, float]:
    """Return ``(p_even, p_odd)`` over the popcount of the basis index."""
    probs = probabilities(state)
    p_odd = float(probs[odd_parity_mask(state.n_qubits)].sum())
    return 1.0 - p_odd, p_odd


@lru_cache(maxsize=None)
def odd_parity_mask(n_qubits: int) -> np.ndarray:
    idx = np.arange(2**n_qubits)
    bits = np.zeros_like(idx)
    for q in range(n_qubits):
        bits ^= (idx >> q) & 1
    mask = bits.astype(bool)
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=None)
def _cnot_indices(n_qubits: int, control: int, target: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(2**n_qubits)
    src = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    return src, src | (1 << target)


def apply_inplace(
    amps: np.ndarray,
    n_qubits: int,
    kind: str,
    qubits: Sequence[int],
    angle: float | np.ndarray | None = None,
) -> None:
    """Apply one gate to ``amps`` (shape ``(..., 2**n)``) in place.

    No validation: callers are expected to have checked qubit ranges.
    """
    if kind == "CNOT":
        src, dst = _cnot_indices(n_qubits, qubits[0], qubits[1])
        tmp = amps[..., src]
        amps[..., src] = amps[..., dst]
        amps[..., dst] = tmp
        return

    if not amps.flags.c_contiguous:
        raise ValueError("amplitude array must be C-contiguous")
    q = qubits[0]
    lead = amps.shape[:-1]
    view = amps.reshape(*lead, 2 ** (n_qubits - q - 1), 2, 2**q)
    a0 = view[..., 0, :]
    a1 = view[..., 1, :]

    if angle is not None and np.ndim(angle):
        # per-row angles broadcast over the two trailing axes
        angle = np.asarray(angle, dtype=float).reshape(*np.shape(angle), 1, 1)

    if kind == "H":
        s = a0 + a1
        a1 -= a0
        a1 *= -_SQRT1_2
        a0[...] = s * _SQRT1_2
    elif kind == "X":
        tmp = a0.copy()
        a0[...] = a1
        a1[...] = tmp
    elif kind == "P":
        a1 *= np.exp(1j * angle)
    elif kind == "RZ":
        a0 *= np.exp(-0.5j * angle)
        a1 *= np.exp(0.5j * angle)
    elif kind == "RY":
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        tmp = a0.copy()
        a0[...] = c * a0 - s * a1
        a1[...] = s * tmp + c * a1
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
