"""Dense statevector simulation with exact expectations and adjoint gradients.

Conventions, fixed for bit-exact test vectors:

* qubit 0 is the most significant bit of the basis-state index;
* a parametrized gate applies ``exp(-i * scale * theta * G)`` for a
  Hermitian ``PauliSum`` generator G;
* generators whose words pairwise commute are applied as a product of
  single-word exponentials; non-commuting generators fall back to a dense
  exponential on their support (at most 4 qubits), realized through a
  cached eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .paulis import PauliSum, dense_matrix

NORM_TOL = 1e-10
MAX_EXP_SUPPORT = 4


class StateVector:
    """2^n complex amplitudes of an n-qubit pure state."""

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes: np.ndarray | None = None):
        self.n = int(n)
        dim = 1 << self.n
        if amplitudes is None:
            amplitudes = np.zeros(dim, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.asarray(amplitudes, dtype=complex).reshape(dim)
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls(n)

    @classmethod
    def plus(cls, n: int) -> "StateVector":
        amps = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def check_norm(self, tol: float = NORM_TOL) -> None:
        if abs(self.norm_sq() - 1.0) > tol:
            raise ValueError(f"state norm^2 deviates by {self.norm_sq() - 1.0:.3e}")

    def __repr__(self):
        return f"StateVector(n={self.n})"


# ---------------------------------------------------------------------------
# Compiled Pauli-word action: P|psi> = phase_out * psi[index ^ mask]
# ---------------------------------------------------------------------------


class _CompiledWord:
    """Precomputed action of a letters-only Pauli word on index arrays."""

    __slots__ = ("mask", "idx", "phase", "real_sign")

    def __init__(self, word: str, n: int):
        dim = 1 << n
        mask = 0
        for q, c in enumerate(word):
            if c in "XY":
                mask |= 1 << (n - 1 - q)
        j = np.arange(dim)
        phase_in = np.ones(dim, dtype=complex)
        for q, c in enumerate(word):
            bit = (j >> (n - 1 - q)) & 1
            if c == "Z":
                phase_in *= 1.0 - 2.0 * bit
            elif c == "Y":
                # Y|0> = i|1>, Y|1> = -i|0>
                phase_in *= 1j * (1.0 - 2.0 * bit)
        self.mask = mask
        self.idx = j ^ mask if mask else None
        # (P psi)[i] = phase_in[i ^ mask] * psi[i ^ mask]
        phase_out = phase_in if mask == 0 else phase_in[self.idx]
        if np.allclose(phase_out.imag, 0.0):
            self.phase = None
            self.real_sign = phase_out.real
        else:
            self.phase = phase_out
            self.real_sign = None

    def apply(self, psi: np.ndarray) -> np.ndarray:
        src = psi if self.idx is None else psi[self.idx]
        if self.phase is not None:
            return self.phase * src
        if self.real_sign is not None and not np.all(self.real_sign == 1.0):
            return self.real_sign * src
        return src.copy() if src is psi else src


class CompiledPauliSum:
    """A PauliSum compiled to fast statevector application."""

    __slots__ = ("n", "coeffs", "words")

    def __init__(self, op: PauliSum, n: int | None = None):
        self.n = op.n if n is None else n
        if self.n != op.n:
            raise ValueError("qubit count mismatch")
        items = list(op.items())
        self.coeffs = np.array([c for _, c in items])
        self.words = [_CompiledWord(w, self.n) for w, _ in items]

    def apply(self, psi: np.ndarray) -> np.ndarray:
        out = np.zeros_like(psi)
        for c, w in zip(self.coeffs, self.words):
            out += c * w.apply(psi)
        return out


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


def _apply_dense(matrix: np.ndarray, qubits: Sequence[int], psi: np.ndarray, n: int) -> np.ndarray:
    """Apply a dense 2^k x 2^k matrix to the listed qubits of an n-qubit state."""
    k = len(qubits)
    tensor = psi.reshape((2,) * n)
    rest = [q for q in range(n) if q not in qubits]
    perm = list(qubits) + rest
    tensor = np.transpose(tensor, perm).reshape(1 << k, -1)
    tensor = matrix @ tensor
    tensor = tensor.reshape((2,) * n)
    inv = np.argsort(perm)
    return np.transpose(tensor, inv).reshape(-1)


@dataclass
class Gate:
    """A circuit element: either a fixed unitary or a generated rotation.

    Fixed gates carry a dense unitary acting on ``qubits``. Parametrized
    gates carry a Hermitian generator, the index of the parameter slot they
    read (slots may be shared between gates), and a scale multiplying the
    angle.
    """

    kind: str  # "fixed" | "param"
    qubits: tuple[int, ...] = ()
    matrix: np.ndarray | None = None
    generator: PauliSum | None = None
    slot: int | None = None
    scale: float = 1.0
    label: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def fixed(cls, matrix: np.ndarray, qubits: Sequence[int], label: str = "") -> "Gate":
        matrix = np.asarray(matrix, dtype=complex)
        k = len(qubits)
        if matrix.shape != (1 << k, 1 << k):
            raise ValueError("matrix shape does not match qubit count")
        if not np.allclose(matrix @ matrix.conj().T, np.eye(1 << k), atol=NORM_TOL):
            raise ValueError("fixed gate matrix is not unitary within 1e-10")
        return cls(kind="fixed", qubits=tuple(qubits), matrix=matrix, label=label)

    @classmethod
    def parametrized(
        cls, generator: PauliSum, slot: int, scale: float = 1.0, label: str = ""
    ) -> "Gate":
        if not generator:
            raise ValueError("empty generator")
        support = generator.support()
        if not generator.terms_commute() and len(support) > MAX_EXP_SUPPORT:
            raise ValueError(
                "non-commuting generator with support "
                f"{len(support)} > {MAX_EXP_SUPPORT} qubits"
            )
        return cls(
            kind="param",
            qubits=tuple(support),
            generator=generator,
            slot=int(slot),
            scale=float(scale),
            label=label,
        )

    # -- compiled helpers ---------------------------------------------------

    def _compiled_terms(self, n: int):
        key = ("terms", n)
        if key not in self._cache:
            items = list(self.generator.items())
            self._cache[key] = [
                (c, _CompiledWord(w, n)) for w, c in items
            ]
        return self._cache[key]

    def _eigen(self, n: int):
        key = ("eigen", n)
        if key not in self._cache:
            support = self.qubits
            small = self.generator.restricted_to(support)
            h = dense_matrix(small)
            evals, evecs = np.linalg.eigh(h)
            self._cache[key] = (evals, evecs)
        return self._cache[key]

    def _strategy(self) -> str:
        if self.kind == "fixed":
            return "fixed"
        if "strategy" not in self._cache:
            self._cache["strategy"] = (
                "product" if self.generator.terms_commute() else "eigen"
            )
        return self._cache["strategy"]

    def apply(self, psi: np.ndarray, theta: float, n: int, dagger: bool = False) -> np.ndarray:
        if self.kind == "fixed":
            m = self.matrix.conj().T if dagger else self.matrix
            return _apply_dense(m, self.qubits, psi, n)
        angle = self.scale * theta
        if dagger:
            angle = -angle
        if self._strategy() == "product":
            out = psi
            for c, word in self._compiled_terms(n):
                a = angle * c
                if word.mask == 0 and word.phase is None:
                    # diagonal word: elementwise complex phase
                    out = (np.cos(a) - 1j * np.sin(a) * word.real_sign) * out
                else:
                    out = np.cos(a) * out - 1j * np.sin(a) * word.apply(out)
            return out
        evals, evecs = self._eigen(n)
        u = (evecs * np.exp(-1j * angle * evals)) @ evecs.conj().T
        return _apply_dense(u, self.qubits, psi, n)

    def apply_generator(self, psi: np.ndarray, n: int) -> np.ndarray:
        """G|psi> for the gate's generator (adjoint differentiation)."""
        out = np.zeros_like(psi)
        for c, word in self._compiled_terms(n):
            out += c * word.apply(psi)
        return out


def rotation_matrix(axis: str, angle: float) -> np.ndarray:
    """exp(-i*angle*A/2) for a single-qubit Pauli axis A."""
    from .paulis import _PAULI_MATRICES

    a = _PAULI_MATRICES[axis]
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * a


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------


@dataclass
class Circuit:
    """An ordered gate list over n qubits with a shared parameter table.

    ``param_count`` independent parameters feed the gates' slots; several
    gates may read the same slot (parameter sharing).
    """

    n: int
    gates: list[Gate] = field(default_factory=list)
    param_count: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for g in self.gates:
            if any(q >= self.n or q < 0 for q in g.qubits):
                raise ValueError(f"gate {g.label or g.kind} touches qubit outside 0..{self.n - 1}")
            if g.kind == "param" and not (0 <= g.slot < self.param_count):
                raise ValueError(
                    f"slot {g.slot} out of range for param_count={self.param_count}"
                )

    def add(self, gate: Gate) -> None:
        self.gates.append(gate)

    def new_slot(self) -> int:
        self.param_count += 1
        return self.param_count - 1


def apply_gate(
    state: StateVector, gate: Gate, params: Sequence[float] | None = None
) -> StateVector:
    """Apply one gate, reading the gate's slot from ``params`` if needed."""
    theta = 0.0
    if gate.kind == "param":
        if params is None or gate.slot >= len(params):
            raise ValueError("missing parameter for slot")
        theta = float(params[gate.slot])
    out = gate.apply(state.amplitudes, theta, state.n)
    return StateVector(state.n, out)


def run_circuit(
    circuit: Circuit,
    params: Sequence[float],
    initial: StateVector | None = None,
    check_norm: bool = False,
) -> StateVector:
    """Run the full gate list from |0...0> or a supplied initial state."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.param_count,):
        raise ValueError(
            f"expected {circuit.param_count} parameters, got {params.shape}"
        )
    if initial is None:
        psi = StateVector.zero(circuit.n).amplitudes
    else:
        if initial.n != circuit.n:
            raise ValueError("initial state size mismatch")
        psi = initial.amplitudes.copy()
    for g in circuit.gates:
        theta = params[g.slot] if g.kind == "param" else 0.0
        psi = g.apply(psi, theta, circuit.n)
        if check_norm:
            StateVector(circuit.n, psi).check_norm()
    return StateVector(circuit.n, psi)


def expectation(state: StateVector, obs: PauliSum) -> float:
    """<psi|O|psi>, asserting the imaginary residue is below 1e-10."""
    if obs.n != state.n:
        raise ValueError("dimension mismatch")
    val = np.vdot(state.amplitudes, CompiledPauliSum(obs).apply(state.amplitudes))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {val.imag:.3e}")
    return float(val.real)


def _adjoint_sweep(
    circuit: Circuit,
    params: np.ndarray,
    psi_final: np.ndarray,
    lam: np.ndarray,
) -> np.ndarray:
    """Accumulate 2*scale*Im(<lam_k|G_k|psi_k>) into the parameter slots.

    ``lam`` must be (O |psi_final>) for a gradient of <O>; more generally any
    cost-side vector whose inner products realize d(cost)/d(gate angle).
    """
    grad = np.zeros(circuit.param_count)
    phi = psi_final
    n = circuit.n
    for g in reversed(circuit.gates):
        theta = params[g.slot] if g.kind == "param" else 0.0
        if g.kind == "param":
            gphi = g.apply_generator(phi, n)
            grad[g.slot] += 2.0 * g.scale * float(np.imag(np.vdot(lam, gphi)))
        phi = g.apply(phi, theta, n, dagger=True)
        lam = g.apply(lam, theta, n, dagger=True)
    return grad


def value_and_gradient(
    circuit: Circuit,
    params: Sequence[float],
    obs: PauliSum,
    initial: StateVector | None = None,
) -> tuple[float, np.ndarray]:
    """Exact <O> and d<O>/dtheta via one reverse (adjoint) sweep.

    Shared slots accumulate contributions from every gate bound to them;
    fixed gates contribute zero gradient.
    """
    params = np.asarray(params, dtype=float)
    state = run_circuit(circuit, params, initial=initial)
    psi = state.amplitudes
    lam = CompiledPauliSum(obs).apply(psi)
    value = np.vdot(psi, lam)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    grad = _adjoint_sweep(circuit, params, psi, lam)
    return float(value.real), grad


def gradient_adjoint(
    circuit: Circuit,
    params: Sequence[float],
    obs: PauliSum,
    initial: StateVector | None = None,
) -> np.ndarray:
    """Exact gradient of <O> with respect to every parameter slot."""
    return value_and_gradient(circuit, params, obs, initial=initial)[1]


def finite_difference_gradient(
    circuit: Circuit,
    params: Sequence[float],
    obs: PauliSum,
    initial: StateVector | None = None,
    step: float = 1e-5,
) -> np.ndarray:
    """Central finite differences; the independent check for the adjoint path."""
    params = np.asarray(params, dtype=float)
    grad = np.zeros_like(params)
    for k in range(len(params)):
        up = params.copy()
        up[k] += step
        down = params.copy()
        down[k] -= step
        e_up = expectation(run_circuit(circuit, up, initial=initial), obs)
        e_dn = expectation(run_circuit(circuit, down, initial=initial), obs)
        grad[k] = (e_up - e_dn) / (2 * step)
    return grad


def circuit_unitary(circuit: Circuit, params: Sequence[float]) -> np.ndarray:
    """Dense unitary of the whole circuit (small n; used by verifiers/oracles)."""
    params = np.asarray(params, dtype=float)
    n = circuit.n
    if n > 10:
        raise ValueError("dense circuit unitary limited to n <= 10")
    dim = 1 << n
    cols = np.eye(dim, dtype=complex)
    out = np.empty_like(cols)
    for j in range(dim):
        psi = cols[:, j].copy()
        for g in circuit.gates:
            theta = params[g.slot] if g.kind == "param" else 0.0
            psi = g.apply(psi, theta, n)
        out[:, j] = psi
    return out
