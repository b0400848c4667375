"""Reference implementations used only by the tests.

Everything here is built independently of the package internals: gate
matrices are written out by hand and embedded as full 2**n x 2**n
operators with Kronecker products.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def local(kind, angle=None):
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "P":
        return np.array([[1, 0], [0, np.exp(1j * angle)]])
    if kind == "RY":
        # exp(-i angle Y / 2)
        Y = np.array([[0, -1j], [1j, 0]])
        return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * Y
    if kind == "RZ":
        Z = np.diag([1, -1]).astype(complex)
        return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * Z
    raise ValueError(kind)


def _kron_chain(ops_by_qubit):
    # qubit 0 is the least-significant bit, i.e. the rightmost factor
    out = np.array([[1.0 + 0j]])
    for op in reversed(ops_by_qubit):
        out = np.kron(out, op)
    return out


def dense(n, kind, qubits, angle=None):
    if kind == "CNOT":
        c, t = qubits
        a = [I2] * n
        a[c] = P0
        b = [I2] * n
        b[c] = P1
        b[t] = local("X")
        return _kron_chain(a) + _kron_chain(b)
    ops = [I2] * n
    ops[qubits[0]] = local(kind, angle)
    return _kron_chain(ops)


def run_dense(n, gates):
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for kind, qubits, angle in gates:
        psi = dense(n, kind, qubits, angle) @ psi
    return psi


def random_gates(rng, n, count):
    kinds = ["H", "X", "P", "RY", "RZ"] + (["CNOT"] if n > 1 else [])
    gates = []
    for _ in range(count):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "CNOT":
            c, t = rng.choice(n, size=2, replace=False)
            gates.append((kind, (int(c), int(t)), None))
        else:
            angle = float(rng.uniform(-2 * np.pi, 2 * np.pi)) if kind in ("P", "RY", "RZ") else None
            gates.append((kind, (int(rng.integers(n)),), angle))
    return gates


def central_difference(f, w, h=1e-5):
    g = np.zeros_like(w)
    for k in range(w.size):
        e = np.zeros_like(w)
        e[k] = h
        g[k] = (f(w + e) - f(w - e)) / (2 * h)
    return g


def invert_metrics(acc, prec, rec, f1, mcc, max_total=400, tol=5e-4 + 1e-9):
    """All integer confusion matrices (tp, fp, fn, tn) with total <= max_total whose
    five metrics round to the given 3-decimal values.

    Pruned by precision and recall first; tn is then scanned as an array.
    Zero-denominator cases are excluded since the reported values are all positive.
    """
    close = lambda a, b: np.abs(a - b) <= tol  # noqa: E731
    sols = []
    for tp in range(1, max_total + 1):
        for fp in range(0, max_total + 1 - tp):
            if not close(tp / (tp + fp), prec):
                continue
            for fn in range(0, max_total + 1 - tp - fp):
                if not close(tp / (tp + fn), rec):
                    continue
                tn = np.arange(1, max_total + 1 - tp - fp - fn)
                if tn.size == 0:
                    continue
                total = tp + fp + fn + tn
                a = (tp + tn) / total
                p, r = tp / (tp + fp), tp / (tp + fn)
                f = 2 * p * r / (p + r)
                m = (tp * tn - fp * fn) / np.sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn))
                ok = close(a, acc) & close(f, f1) & close(m, mcc)
                sols += [(tp, fp, fn, int(t)) for t in tn[ok]]
    return sols
