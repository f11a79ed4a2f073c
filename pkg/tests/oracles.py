"""Independent reference implementations used only by the tests.

Nothing here imports the simulator's matrix or application code: gates are
written out from their textbook formulas and embedded with np.kron.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def u3(t, b, g):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -np.exp(1j * g) * s], [np.exp(1j * b) * s, np.exp(1j * (b + g)) * c]])


H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)

SINGLE = {"Rx": rx, "Ry": ry, "Rz": rz, "U": u3, "H": lambda: H, "X": lambda: X}
CONTROLLED = {"CNOT": "X", "CRz": "Rz", "CU": "U"}


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(m, n, target, control=None):
    """Full 2^n matrix of a 2x2 ``m`` on ``target`` (wire 0 = leftmost factor)."""
    if control is None:
        return kron_all([m if w == target else I2 for w in range(n)])
    off = kron_all([P0 if w == control else I2 for w in range(n)])
    on = kron_all([P1 if w == control else (m if w == target else I2) for w in range(n)])
    return off + on


def layer_gates(kind, n, p):
    """(name, target, control, params) list of one layer, written from the figures."""
    g = []
    if kind == "C1":
        g += [("Rx", i, None, (p[i],)) for i in range(n)]
        g += [("Ry", i, None, (p[n + i],)) for i in range(n)]
    elif kind == "C2":
        g += [("Ry", i, None, (p[i],)) for i in range(n)]
        g += [("X", i + 1, i, ()) for i in range(n - 1)]
    elif kind == "C3":
        g += [("Ry", i, None, (p[i],)) for i in range(n)]
        g += [("Rz", i + 1, i, (p[n + i],)) for i in range(n - 1)]
    elif kind == "ZZFM":
        g += [("H", i, None, ()) for i in range(n)]
        g += [("Rz", i, None, (p[i],)) for i in range(n)]
        for i in range(n - 1):
            g += [("X", i + 1, i, ()), ("Rz", i + 1, None, (p[n + i],)), ("X", i + 1, i, ())]
    elif kind == "Circular":
        pairs = [(n - 1, 0)] + [(i, i + 1) for i in range(n - 1)]
        for k, (c, t) in enumerate(pairs):
            g.append(("U", t, c, tuple(p[3 * k: 3 * k + 3])))
    elif kind == "Full":
        k = 0
        for t in range(1, n):
            for c in range(t):
                g.append(("U", t, c, tuple(p[3 * k: 3 * k + 3])))
                k += 1
    return g


def circuit_unitary(kind, n, n_layers, theta):
    per = len(theta) // n_layers
    U = np.eye(2**n, dtype=complex)
    for layer in range(n_layers):
        for name, t, c, prm in layer_gates(kind, n, theta[layer * per:(layer + 1) * per]):
            U = embed(SINGLE[name](*prm), n, t, c) @ U
    return U


def z_expectation(psi, wire=0):
    """Brute-force sum over all basis outcomes."""
    n = int(np.log2(len(psi)))
    total = 0.0
    for b in range(len(psi)):
        bit = (b >> (n - 1 - wire)) & 1
        total += (1 - 2 * bit) * abs(psi[b]) ** 2
    return total


def loo_1nn_error(X, y):
    """Leave-one-out 1NN error with explicit loops; ties to the lowest index."""
    n = len(X)
    wrong = 0
    for i in range(n):
        best, best_j = np.inf, -1
        for j in range(n):
            if j == i:
                continue
            d = np.sqrt(np.sum((X[i] - X[j]) ** 2))
            if d < best:
                best, best_j = d, j
        wrong += y[best_j] != y[i]
    return wrong / n
