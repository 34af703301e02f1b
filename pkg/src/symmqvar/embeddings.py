"""Equivariant data-encoding circuit builders and a numeric equivariance check.

An encoding U(x) is equivariant with respect to a data symmetry V_s when
U(V_s[x]) = U_s U(x) U_s^dagger for a unitary U_s; the verifier samples
random inputs and compares both sides as dense matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .paulis import _PAULI_MATRICES
from .sim import Gate, rotation_matrix
from .symmetry import CliffordElement, DenseElement, GroupElement


@dataclass(frozen=True)
class EmbeddingSpec:
    """Which encoding circuit to emit.

    kinds:
      * ``featurewise``: one single-qubit rotation exp(-i*scale*x_i*A/2) per
        feature on qubit i (axis A, requires feature_dim <= n);
      * ``so3``: exp(-i/2 <x, sigma>) on qubit 0 (feature_dim = 3);
      * ``o3``: exp(-i/2 <x, sigma> (x) X) on qubits 0,1 (feature_dim = 3),
        whose extra qubit realizes the inflection x -> -x as conjugation
        with I (x) Z.
    """

    kind: str
    n: int
    feature_dim: int
    axis: str = "Z"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("featurewise", "so3", "o3"):
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if self.kind == "featurewise":
            if self.axis not in "XYZ":
                raise ValueError("axis must be X, Y or Z")
            if self.feature_dim > self.n:
                raise ValueError("featurewise embedding needs feature_dim <= n")
        elif self.kind == "so3":
            if self.feature_dim != 3 or self.n < 1:
                raise ValueError("so3 embedding needs d=3 and n >= 1")
        elif self.kind == "o3":
            if self.feature_dim != 3 or self.n < 2:
                raise ValueError("o3 embedding needs d=3 and n >= 2")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "feature_dim": self.feature_dim,
            "axis": self.axis,
            "scale": self.scale,
        }

    @classmethod
    def from_json(cls, data: dict) -> "EmbeddingSpec":
        return cls(
            kind=data["kind"],
            n=data["n"],
            feature_dim=data["feature_dim"],
            axis=data.get("axis", "Z"),
            scale=data.get("scale", 1.0),
        )


def _bloch_exponential(x: np.ndarray) -> np.ndarray:
    """exp(-i/2 (x1 X + x2 Y + x3 Z)) in closed form."""
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return np.eye(2, dtype=complex)
    axis = (
        x[0] * _PAULI_MATRICES["X"]
        + x[1] * _PAULI_MATRICES["Y"]
        + x[2] * _PAULI_MATRICES["Z"]
    ) / r
    return np.cos(r / 2) * np.eye(2) - 1j * np.sin(r / 2) * axis


def encode(spec: EmbeddingSpec, x: Sequence[float]) -> list[Gate]:
    """Emit the encoding circuit segment for one data point."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.feature_dim,):
        raise ValueError(f"expected {spec.feature_dim} features, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    if spec.kind == "featurewise":
        return [
            Gate.fixed(
                rotation_matrix(spec.axis, spec.scale * xi),
                (q,),
                label=f"enc{spec.axis}{q}",
            )
            for q, xi in enumerate(x)
        ]
    if spec.kind == "so3":
        return [Gate.fixed(_bloch_exponential(x), (0,), label="encSO3")]
    # o3: generator (x . sigma) (x) X has square |x|^2 * I, so the
    # exponential has the same closed form on the doubled space
    r = float(np.linalg.norm(x))
    m = np.eye(4, dtype=complex)
    if r > 0:
        axis = (
            x[0] * _PAULI_MATRICES["X"]
            + x[1] * _PAULI_MATRICES["Y"]
            + x[2] * _PAULI_MATRICES["Z"]
        ) / r
        big = np.kron(axis, _PAULI_MATRICES["X"])
        m = np.cos(r / 2) * np.eye(4) - 1j * np.sin(r / 2) * big
    return [Gate.fixed(m, (0, 1), label="encO3")]


def segment_unitary(gates: Sequence[Gate], n: int) -> np.ndarray:
    """Dense unitary of a fixed-gate segment via a Kronecker/tensor build."""
    dim = 1 << n
    # fast path: disjoint single-qubit gates are a pure Kronecker product
    if all(g.kind == "fixed" and len(g.qubits) == 1 for g in gates):
        touched = [g.qubits[0] for g in gates]
        if len(set(touched)) == len(touched):
            factors = [np.eye(2, dtype=complex)] * n
            for g in gates:
                factors[g.qubits[0]] = g.matrix
            out = factors[0]
            for f in factors[1:]:
                out = np.kron(out, f)
            return out
    out = np.eye(dim, dtype=complex)
    for g in gates:
        if g.kind != "fixed":
            raise ValueError("segment_unitary expects fixed gates")
        k = len(g.qubits)
        tensor = out.reshape((2,) * n + (dim,))
        perm = list(g.qubits) + [q for q in range(n) if q not in g.qubits] + [n]
        tensor = np.transpose(tensor, perm).reshape(1 << k, -1)
        tensor = g.matrix @ tensor
        tensor = tensor.reshape([2] * n + [dim])
        inv = np.argsort(perm)
        out = np.transpose(tensor, inv).reshape(dim, dim)
    return out


@dataclass
class EquivarianceResult:
    ok: bool
    max_deviation: float
    samples: int

    def __bool__(self):
        return self.ok


def verify_equivariance(
    spec: EmbeddingSpec,
    data_action: Callable[[np.ndarray], np.ndarray],
    induced: GroupElement,
    samples: int = 50,
    tol: float = 1e-9,
    seed: int = 0,
) -> EquivarianceResult:
    """Sample random inputs and compare U(V_s[x]) with U_s U(x) U_s^dagger.

    Inputs are drawn from Uniform[-pi, pi]^d; the comparison is entrywise on
    dense matrices. Random points suffice in practice because the identity is
    linear in the trigonometric monomials of the encoding.
    """
    rng = np.random.default_rng(seed)
    if induced.n != spec.n:
        raise ValueError("induced element acts on the wrong qubit count")
    worst = 0.0
    for _ in range(samples):
        x = rng.uniform(-np.pi, np.pi, size=spec.feature_dim)
        lhs = segment_unitary(encode(spec, np.asarray(data_action(x), dtype=float)), spec.n)
        u_x = segment_unitary(encode(spec, x), spec.n)
        rhs = _conjugate_matrix(induced, u_x)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return EquivarianceResult(worst < tol, worst, samples)


def _conjugate_matrix(element: GroupElement, m: np.ndarray) -> np.ndarray:
    if isinstance(element, CliffordElement):
        idx, phase = element.state_arrays()
        out = np.empty_like(m)
        # (U M U^dagger)[idx[i], idx[j]] = phase[i] * conj(phase[j]) * M[i, j]
        scaled = (phase[:, None] * phase.conj()[None, :]) * m
        out[np.ix_(idx, idx)] = scaled
        return out
    u = element.matrix()
    return u @ m @ u.conj().T


# -- standard data actions ---------------------------------------------------


def permutation_action(perm: Sequence[int]) -> Callable[[np.ndarray], np.ndarray]:
    """Feature permutation matching a qubit permutation: out[perm[i]] = x[i]."""
    perm = tuple(perm)

    def act(x: np.ndarray) -> np.ndarray:
        out = np.empty_like(np.asarray(x, dtype=float))
        for i, xi in enumerate(np.asarray(x, dtype=float)):
            out[perm[i]] = xi
        return out

    return act


def sign_flip_action(x: np.ndarray) -> np.ndarray:
    return -np.asarray(x, dtype=float)


def rot_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def euler_rotation(psi: float, theta: float, phi: float) -> np.ndarray:
    """r(psi, theta, phi) = r_z(psi) r_x(theta) r_z(phi)."""
    return rot_z(psi) @ rot_x(theta) @ rot_z(phi)


def so3_induced_element(psi: float, theta: float, phi: float, n: int = 1) -> DenseElement:
    """The qubit-side image of the Euler rotation for the Bloch encoding.

    With R_A(a) = exp(-i a A/2) the induced unitary is R_Z(psi) R_X(theta)
    R_Z(phi), acting on qubit 0 (identity on any further qubits).
    """
    u = (
        rotation_matrix("Z", psi)
        @ rotation_matrix("X", theta)
        @ rotation_matrix("Z", phi)
    )
    full = u
    for _ in range(n - 1):
        full = np.kron(full, np.eye(2))
    return DenseElement(full, name="so3")


def o3_inflection_element() -> CliffordElement:
    """Conjugation by I (x) Z realizes x -> -x for the two-qubit encoding."""
    return CliffordElement((0, 1), "IZ", name="inflection")
