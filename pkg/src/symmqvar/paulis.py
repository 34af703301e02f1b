"""Pauli-string operator algebra.

Operators are represented as real-weighted sums of Pauli words. Qubit 0 is
the most significant bit of the basis-state index, and letter i of a word
acts on qubit i; this ordering is fixed so dense test vectors are bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

LETTERS = "IXYZ"

#: Coefficients below this magnitude are treated as exact zeros when
#: assembling a PauliSum; separates genuine twirl zeros from float residue.
COEFF_TOL = 1e-12

#: Memory guard for dense materialization.
MAX_DENSE_QUBITS = 12

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# Single-qubit products: (a, b) -> (phase, letter) with a.b = phase * letter.
_MUL_TABLE: dict[tuple[str, str], tuple[complex, str]] = {}
for _a in LETTERS:
    for _b in LETTERS:
        _m = _PAULI_MATRICES[_a] @ _PAULI_MATRICES[_b]
        for _c in LETTERS:
            for _ph in (1, -1, 1j, -1j):
                if np.allclose(_m, _ph * _PAULI_MATRICES[_c]):
                    _MUL_TABLE[(_a, _b)] = (_ph, _c)
del _a, _b, _c, _m, _ph


def _check_word(word: str) -> None:
    bad = set(word) - set(LETTERS)
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)} in {word!r}")


@dataclass(frozen=True)
class PauliString:
    """A Pauli word with a phase from {+1, -1, +i, -i}.

    The product of two PauliStrings is again a PauliString; the word is
    Hermitian iff the phase is real.
    """

    letters: str
    phase: complex = 1 + 0j

    def __post_init__(self):
        _check_word(self.letters)
        if self.phase not in (1, -1, 1j, -1j):
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.letters if c != "I")

    def support(self) -> tuple[int, ...]:
        return tuple(q for q, c in enumerate(self.letters) if c != "I")

    def is_hermitian(self) -> bool:
        return self.phase.imag == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __repr__(self):
        pre = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return f"{pre}{self.letters}"


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Multiply two Pauli strings, tracking the accumulated phase."""
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} vs {b.n}")
    phase = a.phase * b.phase
    out = []
    for ca, cb in zip(a.letters, b.letters):
        ph, c = _MUL_TABLE[(ca, cb)]
        phase *= ph
        out.append(c)
    return PauliString("".join(out), phase)


def commutes(a: str, b: str) -> bool:
    """Whether two Pauli words (letters only) commute as operators.

    They commute iff they anticommute on an even number of qubits.
    """
    if len(a) != len(b):
        raise ValueError("length mismatch")
    anti = sum(
        1 for ca, cb in zip(a, b) if ca != "I" and cb != "I" and ca != cb
    )
    return anti % 2 == 0


class PauliSum:
    """A Hermitian operator: real-weighted sum of Pauli words.

    Terms map letters-only words to real coefficients; terms whose magnitude
    falls below ``COEFF_TOL`` are dropped on construction and mutation, and
    qubit count is fixed so all keys share one length.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[str, float] | None = None):
        if n < 0:
            raise ValueError("qubit count must be non-negative")
        self.n = int(n)
        self._terms: dict[str, float] = {}
        if terms:
            for word, coeff in terms.items():
                self.add_term(word, coeff)

    @classmethod
    def from_word(cls, word: str, coeff: float = 1.0) -> "PauliSum":
        return cls(len(word), {word: coeff})

    @classmethod
    def single(cls, n: int, letter: str, qubit: int, coeff: float = 1.0) -> "PauliSum":
        """One single-qubit Pauli letter embedded in an n-qubit word."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        word = "I" * qubit + letter + "I" * (n - qubit - 1)
        return cls(n, {word: coeff})

    @classmethod
    def two(cls, n: int, la: str, qa: int, lb: str, qb: int, coeff: float = 1.0) -> "PauliSum":
        """A two-letter word such as Z_i Z_j embedded in n qubits."""
        if qa == qb:
            raise ValueError("qubits must differ")
        word = ["I"] * n
        word[qa], word[qb] = la, lb
        return cls(n, {"".join(word): coeff})

    def add_term(self, word: str, coeff: float) -> None:
        _check_word(word)
        if len(word) != self.n:
            raise ValueError(f"word length {len(word)} != n={self.n}")
        if abs(complex(coeff).imag) > 1e-14:
            raise ValueError("coefficients must be real (Hermiticity)")
        new = self._terms.get(word, 0.0) + float(np.real(coeff))
        if abs(new) < COEFF_TOL:
            self._terms.pop(word, None)
        else:
            self._terms[word] = new

    def add_string(self, s: PauliString, coeff: float = 1.0) -> None:
        """Add coeff * s, folding the string's (real) phase into the weight."""
        if s.n != self.n:
            raise ValueError("qubit count mismatch")
        if not s.is_hermitian():
            raise ValueError("cannot add a string with imaginary phase to a Hermitian sum")
        self.add_term(s.letters, coeff * s.phase.real)

    @property
    def terms(self) -> dict[str, float]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[str, float]]:
        return iter(sorted(self._terms.items()))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __getitem__(self, word: str) -> float:
        return self._terms.get(word, 0.0)

    def copy(self) -> "PauliSum":
        return PauliSum(self.n, self._terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        out = self.copy()
        for w, c in other._terms.items():
            out.add_term(w, c)
        return out

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (other * -1.0)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self.n, {w: c * scalar for w, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSum)
            and self.n == other.n
            and self._terms == other._terms
        )

    def allclose(self, other: "PauliSum", tol: float = 1e-10) -> bool:
        if self.n != other.n:
            return False
        words = set(self._terms) | set(other._terms)
        return all(abs(self[w] - other[w]) <= tol for w in words)

    def max_coeff_diff(self, other: "PauliSum") -> float:
        words = set(self._terms) | set(other._terms)
        if not words:
            return 0.0
        return max(abs(self[w] - other[w]) for w in words)

    def support(self) -> tuple[int, ...]:
        qubits = set()
        for w in self._terms:
            qubits.update(q for q, c in enumerate(w) if c != "I")
        return tuple(sorted(qubits))

    def max_weight(self) -> int:
        return max((sum(1 for c in w if c != "I") for w in self._terms), default=0)

    def terms_commute(self) -> bool:
        """Whether all stored words pairwise commute as operators."""
        words = list(self._terms)
        return all(
            commutes(words[i], words[j])
            for i in range(len(words))
            for j in range(i + 1, len(words))
        )

    def coeff_norm(self) -> float:
        return float(np.sqrt(sum(c * c for c in self._terms.values())))

    def restricted_to(self, qubits: Iterable[int]) -> "PauliSum":
        """The same operator rewritten on the given qubit subset.

        Every term must be supported inside ``qubits``.
        """
        qubits = list(qubits)
        pos = {q: i for i, q in enumerate(qubits)}
        out = PauliSum(len(qubits))
        for w, c in self._terms.items():
            small = ["I"] * len(qubits)
            for q, letter in enumerate(w):
                if letter != "I":
                    if q not in pos:
                        raise ValueError(f"term {w} not supported on {qubits}")
                    small[pos[q]] = letter
            out.add_term("".join(small), c)
        return out

    def to_json(self) -> dict:
        return {w: c for w, c in self.items()}

    @classmethod
    def from_json(cls, n: int, data: Mapping[str, float]) -> "PauliSum":
        return cls(n, dict(data))

    def __repr__(self):
        if not self._terms:
            return f"PauliSum(n={self.n}, 0)"
        body = " + ".join(f"{c:g}*{w}" for w, c in self.items())
        return f"PauliSum(n={self.n}, {body})"


def word_matrix(word: str) -> np.ndarray:
    """Dense matrix of a letters-only Pauli word (qubit 0 = leftmost factor)."""
    _check_word(word)
    m = np.array([[1.0 + 0j]])
    for c in word:
        m = np.kron(m, _PAULI_MATRICES[c])
    return m


def pauli_matrix(s: PauliString) -> np.ndarray:
    return s.phase * word_matrix(s.letters)


def dense_matrix(op: PauliSum, n: int | None = None) -> np.ndarray:
    """Materialize a PauliSum as a dense Hermitian 2^n x 2^n matrix.

    Guarded at ``MAX_DENSE_QUBITS`` qubits against memory blowup.
    """
    if n is None:
        n = op.n
    if n != op.n:
        raise ValueError(f"qubit count mismatch: op has n={op.n}, asked for n={n}")
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"n={n} exceeds dense limit of {MAX_DENSE_QUBITS} qubits")
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for w, c in op.items():
        out += c * word_matrix(w)
    return out


def pauli_decompose(matrix: np.ndarray, n: int, tol: float = 1e-12) -> PauliSum:
    """Project a Hermitian matrix onto the Pauli word basis (small n only)."""
    if n > 6:
        raise ValueError("pauli_decompose supports n <= 6")
    if matrix.shape != (2**n, 2**n):
        raise ValueError("shape mismatch")
    out = PauliSum(n)
    from itertools import product

    for combo in product(LETTERS, repeat=n):
        word = "".join(combo)
        coeff = np.trace(word_matrix(word).conj().T @ matrix) / 2**n
        if abs(coeff.imag) > 1e-9:
            raise ValueError(f"matrix is not Hermitian: word {word} has complex weight")
        if abs(coeff.real) > tol:
            out.add_term(word, coeff.real)
    return out
