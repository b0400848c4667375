"""Parameterized circuit templates: ZZ / Pauli feature maps and the
RealAmplitudes / EfficientSU2 ansatze over linear, circular and full
entanglement.

A template is a flat instruction list whose angles are small expressions
over two parameter vectors: ``x`` (data, one feature per qubit) and ``w``
(trainable weights).

Dump format, one instruction per line::

    <KIND> <q>[,<q>] [<angle>]

where ``<angle>`` is one of

    <float>                      constant, repr() precision
    <scale>*x[i]  |  <scale>*w[i]
    <scale>*(pi-x[i])*(pi-x[j])  (same with w)

Blank lines and lines starting with ``#`` are ignored by :func:`parse_dump`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .simulator import GATE_KINDS, PARAMETRIC, Gate

DEFAULT_REPS = 2
DEFAULT_PAULIS = ("Z", "ZZ")


class Entanglement(str, Enum):
    LINEAR = "linear"
    CIRCULAR = "circular"
    FULL = "full"

    @classmethod
    def parse(cls, value: "Entanglement | str") -> "Entanglement":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown entanglement scheme {value!r}") from None


class ParamClass(str, Enum):
    DATA = "x"
    TRAIN = "w"


@dataclass(frozen=True)
class ParameterRef:
    cls: ParamClass
    index: int

    def __str__(self) -> str:
        return f"{self.cls.value}[{self.index}]"


@dataclass(frozen=True)
class Angle:
    """Angle expression.

    ``form`` is ``"const"`` (value = scale), ``"linear"``
    (scale * v0) or ``"pair"`` (scale * (pi - v0) * (pi - v1)).
    """

    form: str
    scale: float
    refs: tuple[ParameterRef, ...] = ()

    @classmethod
    def const(cls, value: float) -> "Angle":
        return cls("const", float(value))

    def evaluate(self, data: np.ndarray, weights: np.ndarray) -> float | np.ndarray:
        """Value of the angle. ``data`` may be ``(d,)`` or ``(N, d)``."""
        if self.form == "const":
            return self.scale
        vals = [_lookup(r, data, weights) for r in self.refs]
        if self.form == "linear":
            return self.scale * vals[0]
        return self.scale * (math.pi - vals[0]) * (math.pi - vals[1])

    def partials(self, data: np.ndarray, weights: np.ndarray) -> list[tuple[ParameterRef, float | np.ndarray]]:
        """d(angle)/d(ref) for every ref the angle depends on."""
        if self.form == "const":
            return []
        if self.form == "linear":
            return [(self.refs[0], self.scale)]
        v0, v1 = (_lookup(r, data, weights) for r in self.refs)
        return [
            (self.refs[0], -self.scale * (math.pi - v1)),
            (self.refs[1], -self.scale * (math.pi - v0)),
        ]

    def with_class(self, old: ParamClass, new: ParamClass) -> "Angle":
        refs = tuple(ParameterRef(new, r.index) if r.cls is old else r for r in self.refs)
        return replace(self, refs=refs)

    def __str__(self) -> str:
        if self.form == "const":
            return repr(self.scale)
        s = _fmt_scale(self.scale)
        if self.form == "linear":
            return f"{s}*{self.refs[0]}"
        return f"{s}*(pi-{self.refs[0]})*(pi-{self.refs[1]})"


def _fmt_scale(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(v)


def _lookup(ref: ParameterRef, data: np.ndarray, weights: np.ndarray):
    if ref.cls is ParamClass.DATA:
        return data[..., ref.index]
    return weights[ref.index]


@dataclass(frozen=True)
class Instruction:
    kind: str
    qubits: tuple[int, ...]
    angle: Angle | None = None

    def __str__(self) -> str:
        q = ",".join(map(str, self.qubits))
        return f"{self.kind} {q}" + ("" if self.angle is None else f" {self.angle}")


@dataclass(frozen=True)
class CircuitTemplate:
    """Immutable instruction list plus the descriptor used to rebuild it."""

    n_qubits: int
    instructions: tuple[Instruction, ...]
    name: str = "custom"
    reps: int = DEFAULT_REPS
    entanglement: Entanglement = Entanglement.LINEAR
    paulis: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        for ins in self.instructions:
            if any(q >= self.n_qubits or q < 0 for q in ins.qubits):
                raise ValueError(f"instruction {ins} out of range for {self.n_qubits} qubits")
        for cls in ParamClass:
            used = {r.index for r in self.refs() if r.cls is cls}
            if used != set(range(len(used))):
                raise ValueError(f"{cls.name} parameters are not contiguous: {sorted(used)}")

    def refs(self) -> Iterable[ParameterRef]:
        for ins in self.instructions:
            if ins.angle is not None:
                yield from ins.angle.refs

    @property
    def num_data_params(self) -> int:
        return len({r.index for r in self.refs() if r.cls is ParamClass.DATA})

    @property
    def num_train_params(self) -> int:
        return len({r.index for r in self.refs() if r.cls is ParamClass.TRAIN})

    def dump(self) -> str:
        return "\n".join(str(ins) for ins in self.instructions) + "\n"

    def as_ansatz(self) -> "CircuitTemplate":
        """Reinterpret data parameters as trainable ones, keeping instruction order."""
        if self.num_train_params:
            raise ValueError("template already has trainable parameters")
        instructions = tuple(
            replace(ins, angle=ins.angle.with_class(ParamClass.DATA, ParamClass.TRAIN))
            if ins.angle is not None
            else ins
            for ins in self.instructions
        )
        return replace(self, instructions=instructions, name=f"{self.name}-as-ansatz")


def entanglement_pairs(n_qubits: int, scheme: Entanglement | str) -> list[tuple[int, int]]:
    scheme = Entanglement.parse(scheme)
    if n_qubits < 2:
        raise ValueError("entanglement needs at least two qubits")
    linear = [(i, i + 1) for i in range(n_qubits - 1)]
    if scheme is Entanglement.LINEAR:
        return linear
    if scheme is Entanglement.FULL:
        return [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    wrap = (n_qubits - 1, 0)
    # at n=2 the wrap-around pair is the linear pair again
    if frozenset(wrap) in {frozenset(p) for p in linear}:
        return linear
    return [wrap] + linear


def _check_shape(n_qubits: int, reps: int) -> None:
    if n_qubits < 2:
        raise ValueError(f"need at least 2 qubits, got {n_qubits}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")


def _x(i: int) -> ParameterRef:
    return ParameterRef(ParamClass.DATA, i)


def _basis_change(letter: str, qubit: int, undo: bool) -> list[Instruction]:
    if letter == "X":
        return [Instruction("H", (qubit,))]
    if letter == "Y":
        # S-dagger then H maps the Y eigenbasis onto Z; undo is H then S
        if undo:
            return [Instruction("H", (qubit,)), Instruction("P", (qubit,), Angle.const(math.pi / 2))]
        return [Instruction("P", (qubit,), Angle.const(-math.pi / 2)), Instruction("H", (qubit,))]
    return []


def _validate_paulis(paulis: Sequence[str]) -> tuple[str, ...]:
    labels = tuple(str(p) for p in paulis)
    if not labels:
        raise ValueError("at least one Pauli label is required")
    for label in labels:
        if not 1 <= len(label) <= 2 or set(label) - set("XYZ"):
            raise ValueError(f"invalid Pauli label {label!r}")
    return labels


def build_pauli_feature_map(
    n_qubits: int,
    reps: int = DEFAULT_REPS,
    scheme: Entanglement | str = Entanglement.LINEAR,
    pauli_strings: Sequence[str] = DEFAULT_PAULIS,
) -> CircuitTemplate:
    _check_shape(n_qubits, reps)
    scheme = Entanglement.parse(scheme)
    labels = _validate_paulis(pauli_strings)
    pairs = entanglement_pairs(n_qubits, scheme)

    ins: list[Instruction] = []
    for _ in range(reps):
        ins += [Instruction("H", (q,)) for q in range(n_qubits)]
        for label in labels:
            if len(label) == 1:
                for q in range(n_qubits):
                    ins += _basis_change(label, q, undo=False)
                    ins.append(Instruction("P", (q,), Angle("linear", 2.0, (_x(q),))))
                    ins += _basis_change(label, q, undo=True)
            else:
                for i, j in pairs:
                    pre = _basis_change(label[0], i, False) + _basis_change(label[1], j, False)
                    post = _basis_change(label[0], i, True) + _basis_change(label[1], j, True)
                    ins += pre
                    ins.append(Instruction("CNOT", (i, j)))
                    ins.append(Instruction("P", (j,), Angle("pair", 2.0, (_x(i), _x(j)))))
                    ins.append(Instruction("CNOT", (i, j)))
                    ins += post

    return CircuitTemplate(n_qubits, tuple(ins), "pauli", reps, scheme, labels)


def build_zz_feature_map(
    n_qubits: int,
    reps: int = DEFAULT_REPS,
    scheme: Entanglement | str = Entanglement.LINEAR,
) -> CircuitTemplate:
    fm = build_pauli_feature_map(n_qubits, reps, scheme, DEFAULT_PAULIS)
    return replace(fm, name="zz", paulis=())


def _two_local(n_qubits: int, reps: int, scheme, rotations: Sequence[str], name: str) -> CircuitTemplate:
    _check_shape(n_qubits, reps)
    scheme = Entanglement.parse(scheme)
    pairs = entanglement_pairs(n_qubits, scheme)
    ins: list[Instruction] = []
    k = 0

    def rotation_layer() -> None:
        nonlocal k
        for kind in rotations:
            for q in range(n_qubits):
                ins.append(Instruction(kind, (q,), Angle("linear", 1.0, (ParameterRef(ParamClass.TRAIN, k),))))
                k += 1

    for _ in range(reps):
        rotation_layer()
        ins += [Instruction("CNOT", p) for p in pairs]
    rotation_layer()
    return CircuitTemplate(n_qubits, tuple(ins), name, reps, scheme)


def build_real_amplitudes(
    n_qubits: int, reps: int = DEFAULT_REPS, scheme: Entanglement | str = Entanglement.LINEAR
) -> CircuitTemplate:
    return _two_local(n_qubits, reps, scheme, ("RY",), "real_amplitudes")


def build_efficient_su2(
    n_qubits: int, reps: int = DEFAULT_REPS, scheme: Entanglement | str = Entanglement.LINEAR
) -> CircuitTemplate:
    return _two_local(n_qubits, reps, scheme, ("RY", "RZ"), "efficient_su2")


_BUILDERS = {
    "zz": lambda n, r, s, p: build_zz_feature_map(n, r, s),
    "pauli": lambda n, r, s, p: build_pauli_feature_map(n, r, s, p or DEFAULT_PAULIS),
    "real_amplitudes": lambda n, r, s, p: build_real_amplitudes(n, r, s),
    "efficient_su2": lambda n, r, s, p: build_efficient_su2(n, r, s),
}


def build_template(
    name: str,
    n_qubits: int,
    reps: int = DEFAULT_REPS,
    scheme: Entanglement | str = Entanglement.LINEAR,
    paulis: Sequence[str] = (),
) -> CircuitTemplate:
    """Rebuild a template from its descriptor; ``<name>-as-ansatz`` is honoured."""
    base = name.removesuffix("-as-ansatz")
    if base not in _BUILDERS:
        raise ValueError(f"unknown template {name!r}")
    tpl = _BUILDERS[base](n_qubits, reps, scheme, tuple(paulis))
    return tpl.as_ansatz() if name.endswith("-as-ansatz") else tpl


def bind(template: CircuitTemplate, data: Sequence[float], weights: Sequence[float]) -> list[Gate]:
    data = np.asarray(data, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if data.shape != (template.num_data_params,):
        raise ValueError(f"expected {template.num_data_params} data values, got {data.shape}")
    if weights.shape != (template.num_train_params,):
        raise ValueError(f"expected {template.num_train_params} weights, got {weights.shape}")
    return [
        Gate(ins.kind, ins.qubits, None if ins.angle is None else float(ins.angle.evaluate(data, weights)))
        for ins in template.instructions
    ]


_ANGLE_RE = re.compile(
    r"^(?P<scale>[-+0-9.eE]+)\*(?:(?P<lin>[xw])\[(?P<li>\d+)\]"
    r"|\(pi-(?P<a>[xw])\[(?P<ai>\d+)\]\)\*\(pi-(?P<b>[xw])\[(?P<bi>\d+)\]\))$"
)


def _parse_angle(text: str) -> Angle:
    m = _ANGLE_RE.match(text)
    if m is None:
        return Angle.const(float(text))
    scale = float(m["scale"])
    if m["lin"]:
        return Angle("linear", scale, (ParameterRef(ParamClass(m["lin"]), int(m["li"])),))
    return Angle(
        "pair",
        scale,
        (ParameterRef(ParamClass(m["a"]), int(m["ai"])), ParameterRef(ParamClass(m["b"]), int(m["bi"]))),
    )


def parse_dump(text: str, n_qubits: int) -> CircuitTemplate:
    """Inverse of :meth:`CircuitTemplate.dump`."""
    ins = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3) or parts[0] not in GATE_KINDS:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
        qubits = tuple(int(q) for q in parts[1].split(","))
        angle = _parse_angle(parts[2]) if len(parts) == 3 else None
        if (parts[0] in PARAMETRIC) != (angle is not None):
            raise ValueError(f"line {lineno}: angle/gate mismatch in {line!r}")
        ins.append(Instruction(parts[0], qubits, angle))
    return CircuitTemplate(n_qubits, tuple(ins))
