"""Compiled training kernels for small circuits.

The numpy simulator in :mod:`qarp.qsim` pays a fixed interpreter cost per
gate application, which dominates at three qubits or fewer.  These kernels
loop over (repetition, class, sample, gate) in compiled code.  They follow
the same conventions (wire 0 is the most significant bit, ``<Z>`` on wire 0,
adjoint differentiation) and are checked against :mod:`qarp.qsim` in tests.
"""

from __future__ import annotations

import numpy as np

from .qsim import CircuitSpec, circuit_template

try:
    import numba
except ImportError:  # pragma: no cover - the numpy engine is used instead
    numba = None

KIND_CODE = {"H": 0, "X": 1, "Rx": 2, "Ry": 3, "Rz": 4, "U": 5}


def encode(spec: CircuitSpec) -> np.ndarray:
    """Gate table, one row per gate: kind code, target, control, three slots (-1 = none)."""
    rows = []
    for g in circuit_template(spec):
        slots = list(g.slots) + [-1] * (3 - len(g.slots))
        control = g.controls[0] if g.controls else -1
        rows.append([KIND_CODE[g.base_kind], g.targets[0], control] + slots)
    return np.array(rows, dtype=np.int64).reshape(-1, 6)


def _fill_matrix(kind, p0, p1, p2, m):
    if kind == 0:
        h = 1.0 / np.sqrt(2.0)
        m[0, 0] = h
        m[0, 1] = h
        m[1, 0] = h
        m[1, 1] = -h
    elif kind == 1:
        m[0, 0] = 0.0
        m[0, 1] = 1.0
        m[1, 0] = 1.0
        m[1, 1] = 0.0
    elif kind == 2:
        c, s = np.cos(p0 / 2), np.sin(p0 / 2)
        m[0, 0] = c
        m[0, 1] = -1j * s
        m[1, 0] = -1j * s
        m[1, 1] = c
    elif kind == 3:
        c, s = np.cos(p0 / 2), np.sin(p0 / 2)
        m[0, 0] = c
        m[0, 1] = -s
        m[1, 0] = s
        m[1, 1] = c
    elif kind == 4:
        m[0, 0] = np.exp(-0.5j * p0)
        m[0, 1] = 0.0
        m[1, 0] = 0.0
        m[1, 1] = np.exp(0.5j * p0)
    else:
        c, s = np.cos(p0 / 2), np.sin(p0 / 2)
        eb, eg = np.exp(1j * p1), np.exp(1j * p2)
        m[0, 0] = c
        m[0, 1] = -eg * s
        m[1, 0] = eb * s
        m[1, 1] = eb * eg * c


def _fill_derivative(kind, which, p0, p1, p2, m):
    """d(matrix)/d(parameter ``which``) for the parametrised kinds."""
    if kind == 2:
        c, s = np.cos(p0 / 2), np.sin(p0 / 2)
        m[0, 0] = -0.5 * s
        m[0, 1] = -0.5j * c
        m[1, 0] = -0.5j * c
        m[1, 1] = -0.5 * s
    elif kind == 3:
        c, s = np.cos(p0 / 2), np.sin(p0 / 2)
        m[0, 0] = -0.5 * s
        m[0, 1] = -0.5 * c
        m[1, 0] = 0.5 * c
        m[1, 1] = -0.5 * s
    elif kind == 4:
        m[0, 0] = -0.5j * np.exp(-0.5j * p0)
        m[0, 1] = 0.0
        m[1, 0] = 0.0
        m[1, 1] = 0.5j * np.exp(0.5j * p0)
    else:
        c, s = np.cos(p0 / 2), np.sin(p0 / 2)
        eb, eg = np.exp(1j * p1), np.exp(1j * p2)
        if which == 0:
            m[0, 0] = -0.5 * s
            m[0, 1] = -0.5 * eg * c
            m[1, 0] = 0.5 * eb * c
            m[1, 1] = -0.5 * eb * eg * s
        elif which == 1:
            m[0, 0] = 0.0
            m[0, 1] = 0.0
            m[1, 0] = 1j * eb * s
            m[1, 1] = 1j * eb * eg * c
        else:
            m[0, 0] = 0.0
            m[0, 1] = -1j * eg * s
            m[1, 0] = 0.0
            m[1, 1] = 1j * eb * eg * c


def _apply(psi, out, n, m, target, control, project):
    """``out = G psi`` for a 2x2 ``m`` on ``target``, optionally controlled."""
    tbit = 1 << (n - 1 - target)
    cbit = 0 if control < 0 else 1 << (n - 1 - control)
    for i in range(psi.shape[0]):
        if i & tbit:
            continue
        j = i | tbit
        if cbit and not (i & cbit):
            if project:
                out[i] = 0.0
                out[j] = 0.0
            else:
                out[i] = psi[i]
                out[j] = psi[j]
            continue
        a0, a1 = psi[i], psi[j]
        out[i] = m[0, 0] * a0 + m[0, 1] * a1
        out[j] = m[1, 0] * a0 + m[1, 1] * a1


def _gate_mats(gates, theta_rc, mats, dmats):
    for k in range(gates.shape[0]):
        kind = gates[k, 0]
        p = np.zeros(3)
        for q in range(3):
            if gates[k, 3 + q] >= 0:
                p[q] = theta_rc[gates[k, 3 + q]]
        _fill_matrix(kind, p[0], p[1], p[2], mats[k])
        for q in range(3):
            if gates[k, 3 + q] >= 0:
                _fill_derivative(kind, q, p[0], p[1], p[2], dmats[k, q])


def _forward(amps, gates, n, mats, psi, tmp):
    psi[:] = amps
    for k in range(gates.shape[0]):
        _apply(psi, tmp, n, mats[k], gates[k, 1], gates[k, 2], False)
        psi[:] = tmp


def _score(psi, n):
    half = psi.shape[0] >> 1
    s = 0.0
    for i in range(psi.shape[0]):
        p = psi[i].real ** 2 + psi[i].imag ** 2
        s += p if i < half else -p
    return s


def _scores_kernel(theta, amps, gates, n):
    """theta (R, C, P), amps (R, B, d) -> scores (R, C, B)."""
    R, C = theta.shape[0], theta.shape[1]
    B, d = amps.shape[1], amps.shape[2]
    G = gates.shape[0]
    out = np.empty((R, C, B))
    mats = np.zeros((G, 2, 2), dtype=np.complex128)
    dmats = np.zeros((G, 3, 2, 2), dtype=np.complex128)
    psi = np.empty(d, dtype=np.complex128)
    tmp = np.empty(d, dtype=np.complex128)
    for r in range(R):
        for c in range(C):
            _gate_mats(gates, theta[r, c], mats, dmats)
            for b in range(B):
                _forward(amps[r, b], gates, n, mats, psi, tmp)
                out[r, c, b] = _score(psi, n)
    return out


def _loss_grad_kernel(theta, amps, y, margin, gates, n):
    """Margin loss per repetition and its gradient, adjoint method."""
    R, C, P = theta.shape
    B, d = amps.shape[1], amps.shape[2]
    G = gates.shape[0]
    mats = np.zeros((R, C, G, 2, 2), dtype=np.complex128)
    dmats = np.zeros((R, C, G, 3, 2, 2), dtype=np.complex128)
    finals = np.empty((R, C, B, d), dtype=np.complex128)
    S = np.empty((R, C, B))
    tmp = np.empty(d, dtype=np.complex128)
    for r in range(R):
        for c in range(C):
            _gate_mats(gates, theta[r, c], mats[r, c], dmats[r, c])
            for b in range(B):
                _forward(amps[r, b], gates, n, mats[r, c], finals[r, c, b], tmp)
                S[r, c, b] = _score(finals[r, c, b], n)
    loss = np.zeros(R)
    cot = np.zeros((R, C, B))
    for r in range(R):
        for b in range(B):
            yb = y[r, b]
            for j in range(C):
                if j == yb:
                    continue
                h = margin - S[r, yb, b] + S[r, j, b]
                if h > 0:
                    loss[r] += h / B
                    cot[r, j, b] += 1.0 / B
                    cot[r, yb, b] -= 1.0 / B
    grad = np.zeros((R, C, P))
    half = d >> 1
    psi = np.empty(d, dtype=np.complex128)
    lam = np.empty(d, dtype=np.complex128)
    phi = np.empty(d, dtype=np.complex128)
    mdag = np.empty((2, 2), dtype=np.complex128)
    for r in range(R):
        for c in range(C):
            for b in range(B):
                w = cot[r, c, b]
                if w == 0.0:
                    continue
                psi[:] = finals[r, c, b]
                for i in range(d):
                    lam[i] = w * psi[i] if i < half else -w * psi[i]
                for k in range(G - 1, -1, -1):
                    m = mats[r, c, k]
                    mdag[0, 0] = np.conj(m[0, 0])
                    mdag[0, 1] = np.conj(m[1, 0])
                    mdag[1, 0] = np.conj(m[0, 1])
                    mdag[1, 1] = np.conj(m[1, 1])
                    tg, ct = gates[k, 1], gates[k, 2]
                    _apply(psi, tmp, n, mdag, tg, ct, False)
                    psi[:] = tmp
                    for q in range(3):
                        slot = gates[k, 3 + q]
                        if slot < 0:
                            continue
                        _apply(psi, phi, n, dmats[r, c, k, q], tg, ct, True)
                        acc = 0.0
                        for i in range(d):
                            acc += (np.conj(lam[i]) * phi[i]).real
                        grad[r, c, slot] += 2.0 * acc
                    _apply(lam, tmp, n, mdag, tg, ct, False)
                    lam[:] = tmp
    return loss, grad


if numba is not None:
    _jit = numba.njit(cache=True)
    _fill_matrix = _jit(_fill_matrix)
    _fill_derivative = _jit(_fill_derivative)
    _apply = _jit(_apply)
    _gate_mats = _jit(_gate_mats)
    _forward = _jit(_forward)
    _score = _jit(_score)
    _scores_kernel = _jit(_scores_kernel)
    _loss_grad_kernel = _jit(_loss_grad_kernel)

AVAILABLE = numba is not None


def _amplitudes(X, n_qubits):
    X = np.asarray(X, dtype=float)
    dim = 2**n_qubits
    out = np.zeros(X.shape[:-1] + (dim,), dtype=np.complex128)
    out[..., : X.shape[-1]] = X / np.linalg.norm(X, axis=-1, keepdims=True)
    return out


def scores(spec: CircuitSpec, theta, X) -> np.ndarray:
    """theta (R, C, P), X (R, B, d) -> ``<Z_0>`` scores (R, C, B)."""
    return _scores_kernel(np.ascontiguousarray(theta, dtype=float), _amplitudes(X, spec.n_qubits),
                          encode(spec), spec.n_qubits)


def loss_grad(spec: CircuitSpec, theta, X, y, margin: float):
    """Per-repetition batch margin loss (R,) and its gradient (R, C, P)."""
    return _loss_grad_kernel(np.ascontiguousarray(theta, dtype=float), _amplitudes(X, spec.n_qubits),
                             np.ascontiguousarray(y, dtype=np.int64), float(margin),
                             encode(spec), spec.n_qubits)
