"""Finite-group and local-Haar twirling, equivariant gatesets, commutant checks.

A group element is held either in Clifford form (a qubit permutation plus a
per-qubit signed Pauli frame, acting by conjugation) or as a dense unitary.
All built-in representations are Clifford-form, so twirls over them are
symbolic and coefficient-exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .paulis import (
    LETTERS,
    PauliString,
    PauliSum,
    _MUL_TABLE,
    dense_matrix,
    pauli_decompose,
)

UNITARY_TOL = 1e-10


class GroupElement:
    """A unitary symmetry operation on n qubits."""

    def conjugate_pauli(self, s: PauliString) -> PauliString:
        raise NotImplementedError

    def conjugate_sum(self, op: PauliSum) -> PauliSum:
        out = PauliSum(op.n)
        for word, coeff in op.items():
            img = self.conjugate_pauli(PauliString(word))
            out.add_string(img, coeff)
        return out

    def matrix(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def n(self) -> int:
        raise NotImplementedError


class CliffordElement(GroupElement):
    """U = P_perm * (tensor of signed Pauli letters), acting by conjugation.

    ``perm[q]`` is the image of qubit q. The per-letter signs contribute only
    a global factor to U, which cancels under conjugation; they are kept so
    serialized elements round-trip faithfully.
    """

    def __init__(
        self,
        perm: Sequence[int],
        frame: str | None = None,
        signs: Sequence[int] | None = None,
        name: str = "",
    ):
        self.perm = tuple(int(p) for p in perm)
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError("perm is not a permutation")
        self.frame = frame if frame is not None else "I" * n
        if len(self.frame) != n or set(self.frame) - set(LETTERS):
            raise ValueError("invalid frame")
        self.signs = tuple(int(s) for s in (signs if signs is not None else (1,) * n))
        if len(self.signs) != n or set(self.signs) - {1, -1}:
            raise ValueError("signs must be +-1 per qubit")
        self.name = name

    @property
    def n(self) -> int:
        return len(self.perm)

    def conjugate_pauli(self, s: PauliString) -> PauliString:
        if s.n != self.n:
            raise ValueError("qubit count mismatch")
        # frame conjugation: F L F = -L when F, L differ and neither is I
        phase = s.phase
        letters = list(s.letters)
        for q, (f, letter) in enumerate(zip(self.frame, letters)):
            if f != "I" and letter != "I" and f != letter:
                phase = -phase
        # permutation: letter at q moves to perm[q]
        out = ["I"] * self.n
        for q, letter in enumerate(letters):
            out[self.perm[q]] = letter
        return PauliString("".join(out), phase)

    def state_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(index, phase) with U|j> = phase[j] |index[j]>."""
        n = self.n
        dim = 1 << n
        j = np.arange(dim)
        mask = 0
        phase = np.ones(dim, dtype=complex)
        for q, f in enumerate(self.frame):
            bit = (j >> (n - 1 - q)) & 1
            if f in "XY":
                mask |= 1 << (n - 1 - q)
            if f == "Z":
                phase = phase * (1.0 - 2.0 * bit)
            elif f == "Y":
                phase = phase * (1j * (1.0 - 2.0 * bit))
            if self.signs[q] == -1:
                phase = -phase
        j_after_frame = j ^ mask
        # permutation on bit positions: bit q of the input becomes bit perm[q]
        idx = np.zeros(dim, dtype=np.int64)
        for q in range(n):
            bit = (j_after_frame >> (n - 1 - q)) & 1
            idx |= bit << (n - 1 - self.perm[q])
        return idx, phase

    def matrix(self) -> np.ndarray:
        idx, phase = self.state_arrays()
        dim = 1 << self.n
        m = np.zeros((dim, dim), dtype=complex)
        m[idx, np.arange(dim)] = phase
        return m

    def compose(self, other: "CliffordElement") -> "CliffordElement":
        """self * other (other applied first); exact up to global phase."""
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        perm = tuple(self.perm[other.perm[q]] for q in range(self.n))
        # self.frame conjugated through other's permutation, times other.frame
        frame = []
        for q in range(self.n):
            moved = self.frame[other.perm[q]]
            _, letter = _MUL_TABLE[(moved, other.frame[q])]
            frame.append(letter)
        return CliffordElement(perm, "".join(frame))

    def action_key(self) -> tuple:
        """Fingerprint of the conjugation action (images of X_q and Z_q)."""
        images = []
        for q in range(self.n):
            for letter in "XZ":
                word = "I" * q + letter + "I" * (self.n - q - 1)
                img = self.conjugate_pauli(PauliString(word))
                images.append((img.letters, img.phase))
        return tuple(images)

    def to_json(self) -> dict:
        return {
            "form": "clifford",
            "perm": list(self.perm),
            "frame": self.frame,
            "signs": list(self.signs),
            "name": self.name,
        }

    def __repr__(self):
        return f"CliffordElement(perm={self.perm}, frame={self.frame!r}, name={self.name!r})"


class DenseElement(GroupElement):
    """A dense unitary symmetry operation."""

    def __init__(self, matrix: np.ndarray, name: str = ""):
        matrix = np.asarray(matrix, dtype=complex)
        dim = matrix.shape[0]
        n = int(np.log2(dim))
        if matrix.shape != (dim, dim) or 1 << n != dim:
            raise ValueError("matrix must be square with power-of-two dimension")
        if not np.allclose(matrix @ matrix.conj().T, np.eye(dim), atol=UNITARY_TOL):
            raise ValueError("matrix is not unitary within 1e-10")
        self._matrix = matrix
        self._n = n
        self.name = name

    @property
    def n(self) -> int:
        return self._n

    def matrix(self) -> np.ndarray:
        return self._matrix

    def conjugate_pauli(self, s: PauliString) -> PauliString:
        raise TypeError("dense elements conjugate via matrices, not symbolically")

    def conjugate_sum(self, op: PauliSum) -> PauliSum:
        m = self._matrix @ dense_matrix(op) @ self._matrix.conj().T
        return pauli_decompose(m, op.n)

    def to_json(self) -> dict:
        return {
            "form": "dense",
            "matrix": [[[z.real, z.imag] for z in row] for row in self._matrix],
            "name": self.name,
        }


def element_from_json(data: dict) -> GroupElement:
    if data["form"] == "clifford":
        return CliffordElement(data["perm"], data["frame"], data.get("signs"), data.get("name", ""))
    m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
    return DenseElement(m, data.get("name", ""))


@dataclass
class SymmetryRep:
    """A finite unitary representation: a list of elements including identity."""

    elements: list[GroupElement]
    name: str = ""

    def __post_init__(self):
        if not self.elements:
            raise ValueError("empty representation")
        ns = {e.n for e in self.elements}
        if len(ns) != 1:
            raise ValueError("elements act on different qubit counts")
        if not any(_is_identity(e) for e in self.elements):
            raise ValueError("representation must contain the identity")

    @property
    def n(self) -> int:
        return self.elements[0].n

    @property
    def order(self) -> int:
        return len(self.elements)

    def all_clifford(self) -> bool:
        return all(isinstance(e, CliffordElement) for e in self.elements)

    def verify_closure(self) -> bool:
        """Composition of any two elements matches a listed element's action."""
        if not self.all_clifford():
            mats = [e.matrix() for e in self.elements]
            for a in mats:
                for b in mats:
                    prod = a @ b
                    if not any(
                        _equal_up_to_phase(prod, m) for m in mats
                    ):
                        return False
            return True
        keys = {e.action_key() for e in self.elements}
        for a in self.elements:
            for b in self.elements:
                if a.compose(b).action_key() not in keys:
                    return False
        return True

    def twirl(self, op: PauliSum) -> PauliSum:
        return twirl_finite(self, op)

    def data_permutations(self) -> list[tuple[int, ...]]:
        """Qubit permutations of the Clifford elements (the data-side action)."""
        return [e.perm for e in self.elements if isinstance(e, CliffordElement)]

    def to_json(self) -> dict:
        return {"name": self.name, "elements": [e.to_json() for e in self.elements]}

    @classmethod
    def from_json(cls, data: dict) -> "SymmetryRep":
        return cls([element_from_json(e) for e in data["elements"]], data.get("name", ""))


def _is_identity(e: GroupElement) -> bool:
    if isinstance(e, CliffordElement):
        return e.perm == tuple(range(e.n)) and set(e.frame) <= {"I"} and set(e.signs) <= {1}
    return np.allclose(e.matrix(), np.eye(1 << e.n), atol=UNITARY_TOL)


def _equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) < tol:
        return np.allclose(a, b, atol=tol)
    phase = a[k] / b[k]
    if abs(abs(phase) - 1) > tol:
        return False
    return np.allclose(a, phase * b, atol=tol)


# ---------------------------------------------------------------------------
# Twirling
# ---------------------------------------------------------------------------


def twirl_finite(rep: SymmetryRep, op: PauliSum) -> PauliSum:
    """Group-averaged conjugation (1/|S|) sum_s U_s op U_s^dagger.

    A projector onto the commutant: the output commutes with every element,
    and twirling twice equals twirling once.
    """
    if rep.n != op.n:
        raise ValueError("qubit count mismatch")
    acc = PauliSum(op.n)
    for e in rep.elements:
        conj = e.conjugate_sum(op)
        for w, c in conj.items():
            acc.add_term(w, c / rep.order)
    return acc


@dataclass
class HaarTwirlSpec:
    """Joint single-qubit Haar twirl V^{otimes n} over all n qubits."""

    n: int

    def twirl(self, op: PauliSum) -> PauliSum:
        return twirl_haar_local(self, op)


def twirl_haar_local(spec: HaarTwirlSpec, op: PauliSum) -> PauliSum:
    """Closed-form local 2-design twirl of an operator with weight <= 2 terms.

    Weight-1 words average to zero; a weight-2 word A_i B_j becomes
    (X_iX_j + Y_iY_j + Z_iZ_j)/3 when A == B and zero otherwise (the
    Weingarten identity/SWAP decomposition with the identity component
    dropped, as it only generates a global phase). Identity terms in the
    input are dropped for the same reason.
    """
    if op.n != spec.n:
        raise ValueError("qubit count mismatch")
    out = PauliSum(op.n)
    for word, coeff in op.items():
        support = [(q, c) for q, c in enumerate(word) if c != "I"]
        if len(support) == 0:
            continue  # pure phase
        if len(support) == 1:
            continue  # Tr(P)/2 * I = 0 up to the dropped identity
        if len(support) > 2:
            raise ValueError(f"term {word} has weight {len(support)} > 2")
        (qi, a), (qj, b) = support
        if a != b:
            continue
        for letter in "XYZ":
            w = ["I"] * op.n
            w[qi] = letter
            w[qj] = letter
            out.add_term("".join(w), coeff / 3.0)
    return out


def haar_twirl_monte_carlo(
    op: PauliSum, samples: int, seed: int = 0
) -> np.ndarray:
    """Monte-Carlo estimate of the V^{otimes n} Haar twirl as a dense matrix.

    Kept as an independent oracle for the closed-form path (n <= 3).
    """
    if op.n > 3:
        raise ValueError("Monte-Carlo oracle limited to n <= 3")
    rng = np.random.default_rng(seed)
    dim = 1 << op.n
    target = dense_matrix(op)
    # Haar single-qubit unitaries via QR of Ginibre matrices
    g = rng.normal(size=(samples, 2, 2)) + 1j * rng.normal(size=(samples, 2, 2))
    q, r = np.linalg.qr(g)
    d = np.einsum("sii->si", r)
    q = q * (d / np.abs(d))[:, None, :]
    vs = q
    while vs.shape[1] < dim:
        vs = np.einsum("sab,scd->sacbd", vs, q).reshape(
            samples, vs.shape[1] * 2, vs.shape[1] * 2
        )
    conj = np.einsum("sab,bc,sdc->sad", vs, target, vs.conj())
    return conj.mean(axis=0)


# ---------------------------------------------------------------------------
# Gateset symmetrization
# ---------------------------------------------------------------------------


@dataclass
class GatesetReport:
    """What symmetrization did to each input generator."""

    generators: list[PauliSum] = field(default_factory=list)
    #: indices of inputs whose twirl vanished
    trivialized: list[int] = field(default_factory=list)
    #: (input index, output index, ratio): twirl equals ratio * kept generator
    merged: list[tuple[int, int, float]] = field(default_factory=list)
    #: input index -> output index for survivors
    kept: dict[int, int] = field(default_factory=dict)

    def summary(self) -> str:
        lines = [f"{len(self.generators)} generator(s) survive"]
        if self.trivialized:
            lines.append(f"trivialized inputs: {self.trivialized}")
        for i, j, ratio in self.merged:
            tag = "negative-proportional" if ratio < 0 else "proportional"
            lines.append(f"input {i} merged into output {j} ({tag}, ratio {ratio:g})")
        return "; ".join(lines)


def _proportionality(a: PauliSum, b: PauliSum) -> float | None:
    """ratio with a == ratio * b, or None; cosine similarity > 1 - 1e-10."""
    words = sorted(set(a.terms) | set(b.terms))
    va = np.array([a[w] for w in words])
    vb = np.array([b[w] for w in words])
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 or nb == 0:
        return None
    cos = float(np.dot(va, vb) / (na * nb))
    if abs(cos) > 1 - 1e-10:
        return float(np.sign(cos) * na / nb)
    return None


def symmetrize_gateset(
    gateset: Sequence[PauliSum],
    rep: "SymmetryRep | HaarTwirlSpec",
) -> tuple[list[PauliSum], GatesetReport]:
    """Twirl every generator; drop vanished ones and merge proportional ones.

    Generators equal up to a positive scalar are redundant (the scale is
    absorbed by the trainable angle); negative-proportional ones are merged
    too, since the angle's sign absorbs the flip, and the report notes it.
    """
    report = GatesetReport()
    for i, g in enumerate(gateset):
        t = rep.twirl(g)
        if not t:
            report.trivialized.append(i)
            continue
        ratio = None
        match = None
        for j, kept in enumerate(report.generators):
            ratio = _proportionality(t, kept)
            if ratio is not None:
                match = j
                break
        if match is not None:
            report.merged.append((i, match, ratio))
        else:
            report.kept[i] = len(report.generators)
            report.generators.append(t)
    return report.generators, report


# ---------------------------------------------------------------------------
# Commutant membership
# ---------------------------------------------------------------------------


@dataclass
class CommuteReport:
    ok: bool
    max_violation: float
    worst_element: int = -1

    def __bool__(self):
        return self.ok


def check_commutes(op: PauliSum, rep: SymmetryRep, tol: float = 1e-10) -> CommuteReport:
    """Whether op commutes with every element of the representation.

    Clifford elements are checked symbolically (U op U^dagger == op,
    coefficient-wise); dense elements numerically via the max-entry norm of
    the commutator. Both vanish exactly iff the operator is in the commutant.
    """
    worst = 0.0
    worst_idx = -1
    for i, e in enumerate(rep.elements):
        if op.n != e.n:
            raise ValueError("qubit count mismatch")
        if isinstance(e, CliffordElement):
            dev = e.conjugate_sum(op).max_coeff_diff(op)
        else:
            m = dense_matrix(op)
            u = e.matrix()
            dev = float(np.max(np.abs(m @ u - u @ m)))
        if dev > worst:
            worst, worst_idx = dev, i
    return CommuteReport(worst < tol, worst, worst_idx)


# ---------------------------------------------------------------------------
# Built-in representations
# ---------------------------------------------------------------------------

#: Ring-plus-center board layout: corners 0,2,4,6; edges 1,3,5,7; center 8.
RING_CORNERS = (0, 2, 4, 6)
RING_EDGES = (1, 3, 5, 7)
CENTER = 8

ROTATION_PERM = tuple([(i + 2) % 8 for i in range(8)] + [8])
FLIP_PERM = (2, 1, 0, 7, 6, 5, 4, 3, 8)


def _perm_power(perm: tuple[int, ...], k: int) -> tuple[int, ...]:
    out = tuple(range(len(perm)))
    for _ in range(k):
        out = tuple(perm[q] for q in out)
    return out


def _perm_compose(p1: tuple[int, ...], p2: tuple[int, ...]) -> tuple[int, ...]:
    """p1 after p2."""
    return tuple(p1[p2[q]] for q in range(len(p1)))


def make_d4_rep() -> SymmetryRep:
    """The 8 square symmetries as permutations of the ring-plus-center board."""
    elements = []
    for k in range(4):
        rot = _perm_power(ROTATION_PERM, k)
        elements.append(CliffordElement(rot, name=f"r{k}"))
        elements.append(CliffordElement(_perm_compose(FLIP_PERM, rot), name=f"fr{k}"))
    return SymmetryRep(elements, name="d4")


def make_z4_rep() -> SymmetryRep:
    """The rotation subgroup of the square symmetries."""
    elements = [
        CliffordElement(_perm_power(ROTATION_PERM, k), name=f"r{k}") for k in range(4)
    ]
    return SymmetryRep(elements, name="z4")


def make_klein_rep() -> SymmetryRep:
    """{I, SWAP, X(x)X, SWAP*(X(x)X)} on two qubits."""
    identity = CliffordElement((0, 1), name="e")
    swap = CliffordElement((1, 0), name="swap")
    flip = CliffordElement((0, 1), "XX", name="xx")
    both = CliffordElement((1, 0), "XX", name="swap*xx")
    return SymmetryRep([identity, swap, flip, both], name="klein")


def make_exchange_rep() -> SymmetryRep:
    """{I, SWAP} on two qubits (the exchange subgroup)."""
    return SymmetryRep(
        [CliffordElement((0, 1), name="e"), CliffordElement((1, 0), name="swap")],
        name="exchange",
    )


def make_signflip_rep() -> SymmetryRep:
    """{I, X(x)X} on two qubits (the simultaneous sign-flip subgroup)."""
    return SymmetryRep(
        [CliffordElement((0, 1), name="e"), CliffordElement((0, 1), "XX", name="xx")],
        name="signflip",
    )


def make_parity_rep(n: int) -> SymmetryRep:
    """{I, X^{otimes n}}: the spin-flip symmetry of transverse-field models."""
    identity = CliffordElement(tuple(range(n)), name="e")
    parity = CliffordElement(tuple(range(n)), "X" * n, name="parity")
    return SymmetryRep([identity, parity], name=f"parity{n}")


def make_trivial_rep(n: int) -> SymmetryRep:
    return SymmetryRep([CliffordElement(tuple(range(n)), name="e")], name="trivial")


BUILTIN_REPS: dict[str, Callable[[], SymmetryRep]] = {
    "klein": make_klein_rep,
    "d4": make_d4_rep,
    "z4": make_z4_rep,
    "exchange": make_exchange_rep,
    "signflip": make_signflip_rep,
}
