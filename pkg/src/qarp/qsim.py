"""Dense statevector simulator for the parametric layers.

Wire 0 is the most significant bit of the basis index, so ``|ab>`` is stored
at index ``2*a + b``.  All routines accept arbitrary leading batch axes on the
state (``(..., 2**n)``) and on the gate parameters, which is what the trainer
relies on to run several circuits in lockstep.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

LAYER_KINDS = ("C1", "C2", "C3", "ZZFM", "Circular", "Full")
LAYER_COUNTS = (1, 2, 3, 4, 8, 16)
MAX_QUBITS = 12

# number of real parameters per gate kind
GATE_ARITY = {
    "I": 0, "X": 0, "H": 0, "Z": 0,
    "Rx": 1, "Ry": 1, "Rz": 1, "U": 3,
    "CNOT": 0, "CRz": 1, "CU": 3,
}
# controlled kind -> single-qubit kind applied on the target
_BASE_KIND = {"CNOT": "X", "CRz": "Rz", "CU": "U"}

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_FIXED = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class GateError(ValueError):
    """Invalid gate kind, arity or wire assignment."""


class EmbeddingError(ValueError):
    """Input vector cannot be amplitude-embedded."""


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    params: tuple[float, ...] = ()
    # positions of ``params`` inside the flat circuit parameter vector
    slots: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise GateError(f"unknown gate kind {self.kind!r}")
        if set(self.targets) & set(self.controls):
            raise GateError(f"{self.kind}: controls and targets overlap")
        if len(self.targets) != 1:
            raise GateError(f"{self.kind}: exactly one target wire expected")
        want_controls = 1 if self.kind in _BASE_KIND else 0
        if len(self.controls) != want_controls:
            raise GateError(f"{self.kind}: expected {want_controls} control wire(s)")

    @property
    def wires(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def base_kind(self) -> str:
        return _BASE_KIND.get(self.kind, self.kind)


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape[-1] != 2**self.n_qubits:
            raise GateError("amplitude vector length does not match qubit count")

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class CircuitSpec:
    layer_kind: str
    n_qubits: int
    n_layers: int = 1

    def __post_init__(self):
        if self.layer_kind not in LAYER_KINDS:
            raise GateError(f"unknown layer kind {self.layer_kind!r}")
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise GateError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        if self.layer_kind in ("Circular", "Full") and self.n_qubits < 2:
            raise GateError(f"layer {self.layer_kind} needs at least 2 qubits")
        if self.n_layers < 1:
            raise GateError("n_layers must be positive")

    @property
    def params_per_layer(self) -> int:
        return params_per_layer(self.layer_kind, self.n_qubits)

    @property
    def n_params(self) -> int:
        return self.n_layers * self.params_per_layer


def params_per_layer(layer_kind: str, n_qubits: int) -> int:
    n = n_qubits
    counts = {
        "C1": 2 * n,
        "C2": n,
        "C3": 2 * n - 1,
        "ZZFM": 2 * n - 1,
        "Circular": 3 * n,
        "Full": 3 * n * (n - 1) // 2,
    }
    return counts[layer_kind]


def qubit_count(n_features: int, min_qubits: int = 1) -> int:
    """Qubits needed to amplitude-embed ``n_features`` values."""
    if n_features < 1:
        raise EmbeddingError("need at least one feature")
    return max(math.ceil(math.log2(n_features)), min_qubits, 1)


# ---------------------------------------------------------------- matrices

def _as_params(params):
    return tuple(np.asarray(p, dtype=float) for p in params)


def base_matrix(kind: str, params=()) -> np.ndarray:
    """2x2 matrix of a single-qubit kind, broadcasting over parameter arrays."""
    if kind in _FIXED:
        if params:
            raise GateError(f"{kind} takes no parameters")
        return _FIXED[kind]
    params = _as_params(params)
    if len(params) != GATE_ARITY[kind]:
        raise GateError(f"{kind} expects {GATE_ARITY[kind]} parameter(s), got {len(params)}")
    if kind == "U":
        theta, beta, gamma = np.broadcast_arrays(*params)
        out = np.empty(theta.shape + (2, 2), dtype=complex)
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        out[..., 0, 0] = c
        out[..., 0, 1] = -np.exp(1j * gamma) * s
        out[..., 1, 0] = np.exp(1j * beta) * s
        out[..., 1, 1] = np.exp(1j * (beta + gamma)) * c
        return out
    theta = params[0]
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    if kind == "Rx":
        out[..., 0, 0] = c
        out[..., 1, 1] = c
        out[..., 0, 1] = -1j * s
        out[..., 1, 0] = -1j * s
    elif kind == "Ry":
        out[..., 0, 0] = c
        out[..., 1, 1] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
    elif kind == "Rz":
        out[..., 0, 0] = np.exp(-0.5j * theta)
        out[..., 1, 1] = np.exp(0.5j * theta)
    return out


def base_matrix_grad(kind: str, params) -> list[np.ndarray]:
    """Partial derivatives of :func:`base_matrix` w.r.t. each parameter."""
    params = _as_params(params)
    if kind == "U":
        theta, beta, gamma = np.broadcast_arrays(*params)
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        eb, eg = np.exp(1j * beta), np.exp(1j * gamma)
        d_theta = np.empty(theta.shape + (2, 2), dtype=complex)
        d_theta[..., 0, 0] = -0.5 * s
        d_theta[..., 0, 1] = -0.5 * eg * c
        d_theta[..., 1, 0] = 0.5 * eb * c
        d_theta[..., 1, 1] = -0.5 * eb * eg * s
        d_beta = np.zeros(theta.shape + (2, 2), dtype=complex)
        d_beta[..., 1, 0] = 1j * eb * s
        d_beta[..., 1, 1] = 1j * eb * eg * c
        d_gamma = np.zeros(theta.shape + (2, 2), dtype=complex)
        d_gamma[..., 0, 1] = -1j * eg * s
        d_gamma[..., 1, 1] = 1j * eb * eg * c
        return [d_theta, d_beta, d_gamma]
    theta = params[0]
    # every rotation is exp(-i theta P / 2), so dR = -i/2 P R
    pauli = {"Rx": _FIXED["X"], "Ry": np.array([[0, -1j], [1j, 0]]), "Rz": _FIXED["Z"]}[kind]
    return [-0.5j * pauli @ base_matrix(kind, (theta,))]


def gate_matrix(kind: str, params=()) -> np.ndarray:
    """Full unitary of a gate kind; controlled kinds are 4x4 with the control first."""
    if kind not in GATE_ARITY:
        raise GateError(f"unknown gate kind {kind!r}")
    if kind in _BASE_KIND:
        base = base_matrix(_BASE_KIND[kind], params)
        if kind == "CNOT" and params:
            raise GateError("CNOT takes no parameters")
        out = np.zeros(base.shape[:-2] + (4, 4), dtype=complex)
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = 1.0
        out[..., 2:, 2:] = base
        return out
    return base_matrix(kind, params)


# ------------------------------------------------------------- application

@functools.lru_cache(maxsize=None)
def _control_mask(n_qubits: int, target: int, controls: tuple) -> np.ndarray | None:
    """Boolean (2**target, 2**(n-1-target)) grid: all controls are |1>."""
    if not controls:
        return None
    hi = np.arange(2**target)[:, None]
    lo = np.arange(2 ** (n_qubits - 1 - target))[None, :]
    mask = np.ones((hi.size, lo.size), dtype=bool)
    for c in controls:
        if c < target:
            mask &= ((hi >> (target - 1 - c)) & 1).astype(bool)
        else:
            mask &= ((lo >> (n_qubits - 1 - c)) & 1).astype(bool)
    return mask


def _apply_local(amps, n_qubits, mat, target, controls=(), project=False):
    """Apply a 2x2 ``mat`` on ``target`` where all ``controls`` are |1>.

    Leading axes of ``mat`` broadcast against the leading axes of ``amps``.
    With ``project`` the control-|0> block is zeroed rather than left as is,
    which is what the derivative of a controlled gate does.
    """
    mat = np.asarray(mat)
    a = amps.reshape(amps.shape[:-1] + (2**target, 2, 2 ** (n_qubits - 1 - target)))
    a0, a1 = a[..., 0, :], a[..., 1, :]
    m = mat[..., None, None, :, :]
    new0 = m[..., 0, 0] * a0 + m[..., 0, 1] * a1
    new1 = m[..., 1, 0] * a0 + m[..., 1, 1] * a1
    mask = _control_mask(n_qubits, target, tuple(controls))
    if mask is not None:
        keep0, keep1 = (0.0, 0.0) if project else (a0, a1)
        new0 = np.where(mask, new0, keep0)
        new1 = np.where(mask, new1, keep1)
    out = np.stack(np.broadcast_arrays(new0, new1), axis=-2)
    return out.reshape(out.shape[:-3] + (-1,))


def _check_wires(gate: Gate, n_qubits: int):
    for w in gate.wires:
        if not 0 <= w < n_qubits:
            raise GateError(f"wire {w} out of range for {n_qubits} qubit(s)")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    _check_wires(gate, state.n_qubits)
    mat = base_matrix(gate.base_kind, gate.params)
    amps = _apply_local(state.amplitudes, state.n_qubits, mat, gate.targets[0], gate.controls)
    return StateVector(state.n_qubits, amps)


def amplitude_embed(x, n_qubits: int) -> StateVector:
    """Zero-pad ``x`` to ``2**n_qubits`` entries and normalize it (works row-wise)."""
    x = np.asarray(x, dtype=float)
    dim = 2**n_qubits
    if x.shape[-1] > dim:
        raise EmbeddingError(f"{x.shape[-1]} values do not fit into {n_qubits} qubit(s)")
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise EmbeddingError("cannot embed an all-zero vector")
    amps = np.zeros(x.shape[:-1] + (dim,), dtype=complex)
    amps[..., : x.shape[-1]] = x / norm
    return StateVector(n_qubits, amps)


def expectation_z(state: StateVector, wire: int = 0) -> float | np.ndarray:
    """<psi| Z_wire |psi>, batched over leading axes."""
    n = state.n_qubits
    if not 0 <= wire < n:
        raise GateError(f"wire {wire} out of range for {n} qubit(s)")
    probs = np.abs(state.amplitudes) ** 2
    probs = probs.reshape(probs.shape[:-1] + (2**wire, 2, -1))
    diff = probs[..., 0, :].sum(axis=(-1, -2)) - probs[..., 1, :].sum(axis=(-1, -2))
    return float(diff) if np.ndim(diff) == 0 else diff


def _z_sign(n_qubits: int, wire: int) -> np.ndarray:
    bits = (np.arange(2**n_qubits) >> (n_qubits - 1 - wire)) & 1
    return 1.0 - 2.0 * bits


# ----------------------------------------------------------------- layers

def layer_template(spec: CircuitSpec, layer_index: int = 0) -> list[Gate]:
    """Gates of one layer with parameter ``slots`` pointing into the flat theta."""
    n = spec.n_qubits
    off = layer_index * spec.params_per_layer
    kind = spec.layer_kind
    gates: list[Gate] = []
    if kind == "C1":
        gates += [Gate("Rx", (i,), slots=(off + i,)) for i in range(n)]
        gates += [Gate("Ry", (i,), slots=(off + n + i,)) for i in range(n)]
    elif kind == "C2":
        gates += [Gate("Ry", (i,), slots=(off + i,)) for i in range(n)]
        gates += [Gate("CNOT", (i + 1,), (i,)) for i in range(n - 1)]
    elif kind == "C3":
        gates += [Gate("Ry", (i,), slots=(off + i,)) for i in range(n)]
        gates += [Gate("CRz", (i + 1,), (i,), slots=(off + n + i,)) for i in range(n - 1)]
    elif kind == "ZZFM":
        gates += [Gate("H", (i,)) for i in range(n)]
        gates += [Gate("Rz", (i,), slots=(off + i,)) for i in range(n)]
        for i in range(n - 1):
            gates += [
                Gate("CNOT", (i + 1,), (i,)),
                Gate("Rz", (i + 1,), slots=(off + n + i,)),
                Gate("CNOT", (i + 1,), (i,)),
            ]
    elif kind == "Circular":
        # closing link first: last wire controls wire 0, then a forward chain
        pairs = [(n - 1, 0)] + [(i, i + 1) for i in range(n - 1)]
        for k, (c, t) in enumerate(pairs):
            gates.append(Gate("CU", (t,), (c,), slots=tuple(off + 3 * k + j for j in range(3))))
    elif kind == "Full":
        k = 0
        for t in range(1, n):
            for c in range(t):
                gates.append(Gate("CU", (t,), (c,), slots=tuple(off + 3 * k + j for j in range(3))))
                k += 1
    return gates


def circuit_template(spec: CircuitSpec) -> list[Gate]:
    gates = []
    for layer in range(spec.n_layers):
        gates += layer_template(spec, layer)
    return gates


def build_layer(spec: CircuitSpec, layer_index: int, params_slice) -> list[Gate]:
    """Concrete gates of one layer bound to ``params_slice``."""
    params_slice = np.asarray(params_slice, dtype=float)
    if params_slice.shape != (spec.params_per_layer,):
        raise GateError(
            f"layer {spec.layer_kind} on {spec.n_qubits} qubit(s) takes "
            f"{spec.params_per_layer} parameters, got {params_slice.shape}"
        )
    out = []
    for g in layer_template(spec, 0):
        vals = tuple(float(params_slice[s]) for s in g.slots)
        out.append(Gate(g.kind, g.targets, g.controls, vals, g.slots))
    return out


def _bind(gate: Gate, theta: np.ndarray) -> np.ndarray:
    """Base matrix of ``gate`` with parameters gathered from ``theta[..., slots]``."""
    if not gate.slots:
        return base_matrix(gate.base_kind)
    return base_matrix(gate.base_kind, [theta[..., s] for s in gate.slots])


def _check_theta(spec: CircuitSpec, theta: np.ndarray):
    if theta.shape[-1] != spec.n_params:
        raise GateError(
            f"circuit {spec} expects {spec.n_params} parameters, got {theta.shape[-1]}"
        )


def run_circuit(spec: CircuitSpec, theta, x) -> StateVector:
    """Embed ``x`` and apply ``spec.n_layers`` layers.

    ``theta`` has shape ``(..., n_params)``; its leading axes broadcast
    against the leading axes of ``x`` the usual numpy way, so ``theta`` of
    shape ``(C, 1, P)`` with ``x`` of shape ``(B, d)`` gives ``C x B`` states.
    """
    theta = np.asarray(theta, dtype=float)
    _check_theta(spec, theta)
    state = amplitude_embed(x, spec.n_qubits)
    amps = state.amplitudes
    n = spec.n_qubits
    for gate in circuit_template(spec):
        amps = _apply_local(amps, n, _bind(gate, theta), gate.targets[0], gate.controls)
    return StateVector(n, amps)


def _dagger(mat: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(mat, -1, -2))


def _sum_to_shape(arr: np.ndarray, shape: tuple) -> np.ndarray:
    """Undo numpy broadcasting by summing ``arr`` down to ``shape``."""
    extra = arr.ndim - len(shape)
    if extra:
        arr = arr.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and arr.shape[i] != 1)
    if axes:
        arr = arr.sum(axis=axes, keepdims=True)
    return arr


def expectation_vjp(spec: CircuitSpec, theta, x, cotangent, wire: int = 0):
    """Scores ``<Z_wire>`` and ``sum(cotangent * d score / d theta)``.

    Adjoint differentiation: the final state is un-computed gate by gate
    while the cotangent state is pulled back alongside it, so memory stays at
    two statevectors regardless of depth.  Returns ``(scores, grad)`` with
    ``grad.shape == theta.shape``.  ``cotangent`` may be a callable taking
    the scores, so a loss can be differentiated in a single forward pass.
    """
    theta = np.asarray(theta, dtype=float)
    _check_theta(spec, theta)
    n = spec.n_qubits
    gates = circuit_template(spec)
    mats = [_bind(g, theta) for g in gates]

    psi = amplitude_embed(x, n).amplitudes
    for g, m in zip(gates, mats):
        psi = _apply_local(psi, n, m, g.targets[0], g.controls)
    zsign = _z_sign(n, wire)
    scores = np.sum(zsign * np.abs(psi) ** 2, axis=-1)

    if callable(cotangent):
        cotangent = cotangent(scores)
    cot = np.broadcast_to(np.asarray(cotangent, dtype=float), scores.shape)
    lam = cot[..., None] * zsign * psi
    grad = np.zeros(theta.shape)
    for g, m in zip(reversed(gates), reversed(mats)):
        mdag = _dagger(m)
        psi = _apply_local(psi, n, mdag, g.targets[0], g.controls)
        if g.slots:
            dmats = base_matrix_grad(g.base_kind, [theta[..., s] for s in g.slots])
            for slot, dm in zip(g.slots, dmats):
                phi = _apply_local(psi, n, dm, g.targets[0], g.controls, project=True)
                contrib = 2.0 * np.real(np.sum(np.conj(lam) * phi, axis=-1))
                grad[..., slot] += _sum_to_shape(contrib, theta.shape[:-1])
        lam = _apply_local(lam, n, mdag, g.targets[0], g.controls)
    return scores, grad


def dense_unitary(spec: CircuitSpec, theta) -> np.ndarray:
    """Explicit ``2**n x 2**n`` circuit unitary (reference path, small n only)."""
    theta = np.asarray(theta, dtype=float)
    _check_theta(spec, theta)
    n = spec.n_qubits
    u = np.eye(2**n, dtype=complex)
    for g in circuit_template(spec):
        u = _apply_local(u.T, n, _bind(g, theta), g.targets[0], g.controls).T
    return u
