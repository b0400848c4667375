import math
from pathlib import Path

import numpy as np
import pytest

import oracle
from pulsarvqc.circuits import (
    Entanglement,
    bind,
    build_efficient_su2,
    build_pauli_feature_map,
    build_real_amplitudes,
    build_template,
    build_zz_feature_map,
    entanglement_pairs,
    parse_dump,
)
from pulsarvqc.simulator import run

GOLDEN = Path(__file__).parent / "golden"
SCHEMES = list(Entanglement)


def _dense_state(template, data, weights):
    gates = [(g.kind, g.qubits, g.angle) for g in bind(template, data, weights)]
    return oracle.run_dense(template.n_qubits, gates)


@pytest.mark.parametrize(
    "n,scheme,expected",
    [
        (4, "linear", [(0, 1), (1, 2), (2, 3)]),
        (4, "circular", [(3, 0), (0, 1), (1, 2), (2, 3)]),
        (4, "full", [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        (2, "circular", [(0, 1)]),
    ],
)
def test_entanglement_pairs(n, scheme, expected):
    assert entanglement_pairs(n, scheme) == expected


def test_entanglement_rejects_single_qubit():
    with pytest.raises(ValueError):
        entanglement_pairs(1, "linear")
    with pytest.raises(ValueError):
        entanglement_pairs(3, "star")


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("scheme", SCHEMES)
def test_pair_counts_and_uniqueness(n, scheme):
    pairs = entanglement_pairs(n, scheme)
    assert len({frozenset(p) for p in pairs}) == len(pairs)
    expected = {"linear": n - 1, "circular": n if n >= 3 else 1, "full": n * (n - 1) // 2}[scheme.value]
    assert len(pairs) == expected


def test_zz_instruction_count():
    # 3 H + 3 P + 2 pairs x (CNOT, P, CNOT)
    fm = build_zz_feature_map(3, 1, "linear")
    assert len(fm.instructions) == 12
    assert fm.num_data_params == 3 and fm.num_train_params == 0


def test_zz_golden_dump():
    assert build_zz_feature_map(3, 1, "linear").dump() == (GOLDEN / "zz_3q_linear_reps1.txt").read_text()
    assert build_efficient_su2(2, 1, "circular").dump() == (
        GOLDEN / "efficient_su2_2q_circular_reps1.txt"
    ).read_text()


@pytest.mark.parametrize("scheme", SCHEMES)
def test_dump_roundtrip(scheme):
    for tpl in [build_pauli_feature_map(3, 2, scheme, ["X", "YZ", "ZZ"]), build_real_amplitudes(4, 1, scheme)]:
        back = parse_dump(tpl.dump(), tpl.n_qubits)
        assert back.instructions == tpl.instructions


def test_parse_dump_rejects_garbage():
    with pytest.raises(ValueError, match="line 2"):
        parse_dump("H 0\nFOO 1\n", 2)
    with pytest.raises(ValueError):
        parse_dump("RY 0\n", 2)


def test_zz_at_pi_returns_to_zero_state():
    fm = build_zz_feature_map(2, 2, "linear")
    psi = _dense_state(fm, [math.pi, math.pi], [])
    assert np.allclose(psi, [1, 0, 0, 0], atol=1e-10)
    assert np.allclose(run(bind(fm, [math.pi, math.pi], []), 2).amplitudes, [1, 0, 0, 0], atol=1e-10)


@pytest.mark.parametrize("reps", [1, 2, 3])
def test_data_param_count_is_qubit_count(reps):
    assert build_zz_feature_map(5, reps).num_data_params == 5


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("reps", [1, 2, 3])
@pytest.mark.parametrize("scheme", SCHEMES)
def test_default_pauli_equals_zz(n, reps, scheme):
    assert build_pauli_feature_map(n, reps, scheme).instructions == build_zz_feature_map(n, reps, scheme).instructions


def test_first_order_pauli_has_no_entanglers():
    fm = build_pauli_feature_map(2, 1, "linear", ["Z"])
    assert [i.kind for i in fm.instructions] == ["H", "H", "P", "P"]
    assert [str(i.angle) for i in fm.instructions[2:]] == ["2*x[0]", "2*x[1]"]


@pytest.mark.parametrize("labels", [["W"], [], ["XYZ"], ["Zx"]])
def test_pauli_label_validation(labels):
    with pytest.raises(ValueError):
        build_pauli_feature_map(2, 1, "linear", labels)


def test_non_default_pauli_maps_are_valid_unitaries():
    rng = np.random.default_rng(2)
    fm = build_pauli_feature_map(3, 2, "full", ["X", "Y", "XY", "YY", "ZX"])
    x = rng.uniform(0, math.pi, 3)
    psi = run(bind(fm, x, []), 3).amplitudes
    assert np.allclose(psi, _dense_state(fm, x, []), atol=1e-10)
    assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n,reps,expected", [(3, 2, 9), (4, 2, 12)])
def test_real_amplitudes_param_count(n, reps, expected):
    assert build_real_amplitudes(n, reps).num_train_params == expected


@pytest.mark.parametrize("n,reps,expected", [(3, 2, 18), (2, 1, 8)])
def test_efficient_su2_param_count(n, reps, expected):
    assert build_efficient_su2(n, reps).num_train_params == expected


@pytest.mark.parametrize("builder", [build_real_amplitudes, build_efficient_su2])
@pytest.mark.parametrize("scheme", SCHEMES)
def test_zero_weights_fix_zero_state(builder, scheme):
    for n in (2, 3, 4):
        tpl = builder(n, 2, scheme)
        psi = run(bind(tpl, [], np.zeros(tpl.num_train_params)), n).amplitudes
        assert abs(psi[0]) == pytest.approx(1, abs=1e-12)


def test_bind_zz_pair_angle():
    gates = bind(build_zz_feature_map(2, 1, "linear"), [0, 0], [])
    phases = [g.angle for g in gates if g.kind == "P"]
    assert phases[:2] == [0, 0]
    assert phases[2] == pytest.approx(2 * math.pi**2)


def test_bind_real_amplitudes_structure():
    gates = bind(build_real_amplitudes(2, 1, "linear"), [], [0, 0, 0, 0])
    assert [(g.kind, g.qubits, g.angle) for g in gates] == [
        ("RY", (0,), 0.0),
        ("RY", (1,), 0.0),
        ("CNOT", (0, 1), None),
        ("RY", (0,), 0.0),
        ("RY", (1,), 0.0),
    ]


def test_bind_length_checks():
    with pytest.raises(ValueError):
        bind(build_zz_feature_map(2, 1), [0.1], [])
    with pytest.raises(ValueError):
        bind(build_real_amplitudes(2, 1), [], [0.0] * 3)


@pytest.mark.parametrize("reps,n", [(0, 3), (2, 1)])
def test_builders_validate(reps, n):
    for builder in (build_zz_feature_map, build_real_amplitudes, build_efficient_su2):
        with pytest.raises(ValueError):
            builder(n, reps)


def test_feature_map_as_ansatz():
    fm = build_zz_feature_map(3, 2, "circular")
    an = fm.as_ansatz()
    assert an.num_train_params == 3 and an.num_data_params == 0
    assert [(i.kind, i.qubits) for i in an.instructions] == [(i.kind, i.qubits) for i in fm.instructions]
    x = np.array([0.3, 1.2, 2.9])
    assert np.allclose(_dense_state(fm, x, []), _dense_state(an, [], x), atol=1e-12)
    with pytest.raises(ValueError):
        build_real_amplitudes(2).as_ansatz()


def test_build_template_descriptors():
    assert build_template("zz-as-ansatz", 3, 2, "full").num_train_params == 3
    assert build_template("pauli", 2, 1, "linear", ["Z"]).paulis == ("Z",)
    with pytest.raises(ValueError):
        build_template("qaoa", 2)
