"""Variational quantum classifier engine and experiment harness for HTRU-2 pulsar screening."""

from .circuits import (
    CircuitTemplate,
    Entanglement,
    bind,
    build_efficient_su2,
    build_pauli_feature_map,
    build_real_amplitudes,
    build_zz_feature_map,
    entanglement_pairs,
)
from .dataio import Dataset, load_csv, minmax_scale, split
from .featselect import rank, select
from .metrics import ConfusionCounts, MetricsReport, confusion, report
from .simulator import Gate, Statevector, apply_gate, parity_probability, probabilities, zero_state
from .vqc import TrainConfig, VqcModel, cross_entropy_loss, forward, gradient, predict, train

__version__ = "0.1.0"
