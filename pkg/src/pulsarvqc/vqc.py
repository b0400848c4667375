"""Variational quantum classifier: feature map + ansatz, parity readout,
clamped cross-entropy loss and exact parameter-shift gradients.

Samples are simulated as a batch, so one circuit pass covers the whole
training set. ``p1`` is the probability of measuring an odd-parity
bitstring, which is read as class 1 (pulsar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import optim
from .circuits import CircuitTemplate, Entanglement, build_template
from .simulator import apply_inplace, odd_parity_mask

EPS = 1e-10
SHIFT = math.pi / 2
MODEL_FORMAT = "pulsarvqc-model/1"


class InitializationError(RuntimeError):
    """Loss is not finite at the initial weights."""


@dataclass(frozen=True, eq=False)
class VqcModel:
    feature_map: CircuitTemplate
    ansatz: CircuitTemplate
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.feature_map.n_qubits != self.ansatz.n_qubits:
            raise ValueError("feature map and ansatz act on different qubit counts")
        if self.feature_map.num_train_params:
            raise ValueError("feature map must not have trainable parameters")
        if self.ansatz.num_data_params:
            raise ValueError("ansatz must not have data parameters; use as_ansatz()")
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size != self.ansatz.num_train_params:
            raise ValueError(f"expected {self.ansatz.num_train_params} weights, got {w.size}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n_qubits(self) -> int:
        return self.ansatz.n_qubits

    def with_weights(self, weights) -> "VqcModel":
        return replace(self, weights=weights)


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 200
    loss_tolerance: float = 1e-6
    seed: int = 0
    optimizer: str = "gd"
    init_strategy: str = "uniform"

    def __post_init__(self) -> None:
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if not self.loss_tolerance > 0:
            raise ValueError("loss_tolerance must be > 0")
        if self.optimizer not in optim.OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}; choose from {sorted(optim.OPTIMIZERS)}")
        if self.init_strategy not in ("uniform", "zeros"):
            raise ValueError(f"unknown init strategy {self.init_strategy!r}")


@dataclass
class TrainReport:
    final_weights: np.ndarray
    loss_history: list[float]
    iterations_used: int
    converged: bool
    model: VqcModel = field(repr=False)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1]


def _as_matrix(model: VqcModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.feature_map.num_data_params:
        raise ValueError(f"expected {model.feature_map.num_data_params} features per sample, got shape {X.shape}")
    return X


def _labels(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != n:
        raise ValueError(f"{n} samples but {y.size} labels")
    if n == 0:
        raise ValueError("empty sample set")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    return y


def encode(feature_map: CircuitTemplate, X: np.ndarray) -> np.ndarray:
    """Batch of feature-map states, shape ``(N, 2**n)``."""
    n = feature_map.n_qubits
    amps = np.zeros((X.shape[0], 2**n), dtype=np.complex128)
    amps[:, 0] = 1.0
    no_weights = np.empty(0)
    for ins in feature_map.instructions:
        angle = None if ins.angle is None else ins.angle.evaluate(X, no_weights)
        apply_inplace(amps, n, ins.kind, ins.qubits, angle)
    return amps


class _Objective:
    """Loss/gradient of one model structure on a fixed sample set.

    Feature-map states are computed once; every evaluation only replays
    the ansatz.
    """

    def __init__(self, model: VqcModel, X, y):
        X = _as_matrix(model, X)
        self.y = _labels(y, X.shape[0])
        self.ansatz = model.ansatz
        self.n = model.n_qubits
        self.states = encode(model.feature_map, X)
        self.odd = odd_parity_mask(self.n)
        no_data = np.empty(0)
        self._angles = lambda w: [
            None if ins.angle is None else float(ins.angle.evaluate(no_data, w)) for ins in self.ansatz.instructions
        ]
        self._partials = lambda w: [
            [] if ins.angle is None else [(r.index, float(d)) for r, d in ins.angle.partials(no_data, w)]
            for ins in self.ansatz.instructions
        ]

    def _replay(self, amps: np.ndarray, angles, start: int = 0) -> np.ndarray:
        for ins, a in zip(self.ansatz.instructions[start:], angles[start:]):
            apply_inplace(amps, self.n, ins.kind, ins.qubits, a)
        return amps

    def _p1(self, amps: np.ndarray) -> np.ndarray:
        probs = amps.real**2 + amps.imag**2
        return probs[:, self.odd].sum(axis=1)

    def p1(self, w: np.ndarray) -> np.ndarray:
        return self._p1(self._replay(self.states.copy(), self._angles(w)))

    def loss(self, w: np.ndarray) -> float:
        return _xent(self.p1(w), self.y)

    def p1_jacobian(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``p1`` (N,) and d p1 / d w (N, n_weights) by parameter shift."""
        angles = self._angles(w)
        partials = self._partials(w)
        jac = np.zeros((self.states.shape[0], w.size))
        cur = self.states.copy()
        for g, ins in enumerate(self.ansatz.instructions):
            if partials[g]:
                shifted = []
                for delta in (SHIFT, -SHIFT):
                    amps = cur.copy()
                    apply_inplace(amps, self.n, ins.kind, ins.qubits, angles[g] + delta)
                    shifted.append(self._p1(self._replay(amps, angles, g + 1)))
                d_gate = 0.5 * (shifted[0] - shifted[1])
                for k, d_angle in partials[g]:
                    jac[:, k] += d_angle * d_gate
            apply_inplace(cur, self.n, ins.kind, ins.qubits, angles[g])
        return self._p1(cur), jac

    def loss_and_grad(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        p1, jac = self.p1_jacobian(w)
        y = self.y
        pc = np.clip(p1, EPS, 1 - EPS)
        inside = (p1 > EPS) & (p1 < 1 - EPS)
        dl_dp = np.where(inside, (-y / pc + (1 - y) / (1 - pc)), 0.0) / y.size
        return _xent(p1, y), dl_dp @ jac


def _xent(p1: np.ndarray, y: np.ndarray) -> float:
    pc = np.clip(p1, EPS, 1 - EPS)
    return float(np.mean(-(y * np.log(pc) + (1 - y) * np.log(1 - pc))))


def predict_proba(model: VqcModel, X) -> np.ndarray:
    """Odd-parity probability for each row of ``X``."""
    X = _as_matrix(model, X)
    obj = _Objective(model, X, np.zeros(X.shape[0]))
    return np.clip(obj.p1(model.weights), 0.0, 1.0)


def forward(model: VqcModel, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_qubits,):
        raise ValueError(f"expected a vector of {model.n_qubits} features, got shape {x.shape}")
    return float(predict_proba(model, x)[0])


def predict(model: VqcModel, X) -> np.ndarray:
    """Class labels; ``p1 == 0.5`` falls to class 0."""
    return (predict_proba(model, X) > 0.5).astype(int)


def cross_entropy_loss(model: VqcModel, X, y) -> float:
    return _Objective(model, X, y).loss(model.weights)


def gradient(model: VqcModel, X, y) -> np.ndarray:
    return _Objective(model, X, y).loss_and_grad(model.weights)[1]


def initial_weights(n: int, cfg: TrainConfig) -> np.ndarray:
    if cfg.init_strategy == "zeros":
        return np.zeros(n)
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(-math.pi, math.pi, size=n)


def train(model: VqcModel, X, y, cfg: TrainConfig = TrainConfig()) -> TrainReport:
    """Fit the ansatz weights, starting from ``cfg``'s seeded initialization.

    The incoming ``model.weights`` only fix the shape; the returned report
    carries a new model with the trained weights installed.
    """
    obj = _Objective(model, X, y)
    w0 = initial_weights(model.ansatz.num_train_params, cfg)
    f0 = obj.loss(w0)
    if not np.isfinite(f0):
        raise InitializationError(f"initial loss is {f0}")
    result = optim.OPTIMIZERS[cfg.optimizer](obj.loss_and_grad, w0, cfg.max_iterations, cfg.loss_tolerance)
    return TrainReport(
        final_weights=result.x.copy(),
        loss_history=[float(v) for v in result.history],
        iterations_used=result.iterations,
        converged=result.converged,
        model=model.with_weights(result.x),
    )


def make_model(
    feature_map: CircuitTemplate, ansatz: CircuitTemplate, weights: Sequence[float] | None = None
) -> VqcModel:
    if weights is None:
        weights = np.zeros(ansatz.num_train_params)
    return VqcModel(feature_map, ansatz, weights)


def _descriptor(prefix: str, tpl: CircuitTemplate) -> list[str]:
    return [
        f"{prefix}.name = {tpl.name}",
        f"{prefix}.n_qubits = {tpl.n_qubits}",
        f"{prefix}.reps = {tpl.reps}",
        f"{prefix}.entanglement = {tpl.entanglement.value}",
        f"{prefix}.paulis = {','.join(tpl.paulis)}",
    ]


def dumps_model(model: VqcModel) -> str:
    lines = [f"format = {MODEL_FORMAT}", f"n_qubits = {model.n_qubits}"]
    lines += _descriptor("feature_map", model.feature_map)
    lines += _descriptor("ansatz", model.ansatz)
    lines.append("weights = " + ",".join(repr(float(v)) for v in model.weights))
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> VqcModel:
    kv = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        kv[key.strip()] = value.strip()
    if kv.get("format") != MODEL_FORMAT:
        raise ValueError(f"unsupported model format {kv.get('format')!r}")

    def template(prefix: str) -> CircuitTemplate:
        paulis = [p for p in kv[f"{prefix}.paulis"].split(",") if p]
        return build_template(
            kv[f"{prefix}.name"],
            int(kv[f"{prefix}.n_qubits"]),
            int(kv[f"{prefix}.reps"]),
            Entanglement.parse(kv[f"{prefix}.entanglement"]),
            paulis,
        )

    weights = [float(v) for v in kv["weights"].split(",") if v]
    return VqcModel(template("feature_map"), template("ansatz"), np.array(weights))


def save_model(model: VqcModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model))


def load_model(path: str | Path) -> VqcModel:
    return loads_model(Path(path).read_text())
