"""Invariant and free re-uploading model builders with parameter sharing.

Layout strings describe trainable blocks over the 9-qubit ring-plus-center
board: t = data encoding, c/e/m = single-qubit layers on corners/edges/
middle, o/i/d = controlled-rotation layers corner->edge, edge->middle and
middle->corner. Invariant models share one parameter per symmetry class;
free models give every qubit and every directed pair its own parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingSpec, encode
from .paulis import PauliSum
from .sim import Circuit, CompiledPauliSum, Gate, _adjoint_sweep, run_circuit
from .symmetry import (
    CENTER,
    RING_CORNERS,
    RING_EDGES,
    SymmetryRep,
    make_d4_rep,
    make_z4_rep,
)

LAYOUT_ALPHABET = set("tcemoid")

#: directed entangler pairs (control, target); the control is listed first
O_PAIRS_CLOCKWISE = ((0, 1), (2, 3), (4, 5), (6, 7))
O_PAIRS_COUNTER = ((0, 7), (2, 1), (4, 3), (6, 5))
I_PAIRS = ((1, 8), (3, 8), (5, 8), (7, 8))
D_PAIRS = ((8, 0), (8, 2), (8, 4), (8, 6))

SINGLE_QUBIT_CLASSES = {
    "c": RING_CORNERS,
    "e": RING_EDGES,
    "m": (CENTER,),
}

TTT_ENCODING_SCALE = 2 * np.pi / 3


def validate_layout(layout: str) -> str:
    if not layout:
        raise ValueError("empty layout")
    bad = set(layout) - LAYOUT_ALPHABET
    if bad:
        raise ValueError(f"layout letters {sorted(bad)} not in {sorted(LAYOUT_ALPHABET)}")
    return layout


def random_layout(seed: int) -> str:
    """'t' plus three random orderings of cemoid, no contiguous repetitions.

    Letters inside one ordering are already distinct, so only the seams
    between consecutive orderings need rejection.
    """
    rng = np.random.default_rng(seed)
    letters = list("cemoid")
    segments: list[str] = []
    last = "t"
    for _ in range(3):
        while True:
            perm = "".join(rng.permutation(letters))
            if perm[0] != last:
                break
        segments.append(perm)
        last = perm[-1]
    return "t" + "".join(segments)


def _controlled_rotation_gate(control: int, target: int, axis: str, slot: int, n: int = 9) -> Gate:
    """CR_A(theta) = exp(-i theta/2 |1><1|_control A_target)."""
    gen = PauliSum(n)
    gen.add_term("I" * target + axis + "I" * (n - target - 1), 0.5)
    word = ["I"] * n
    word[control] = "Z"
    word[target] = axis
    gen.add_term("".join(word), -0.5)
    return Gate.parametrized(gen, slot, scale=0.5, label=f"CR{axis}({control}->{target})")


def ttt_observables() -> list[PauliSum]:
    """Class observables in (circle, draw, cross) order; all D4-invariant."""
    circle = PauliSum(9)
    for q in RING_CORNERS:
        circle.add_term("I" * q + "Z" + "I" * (8 - q), 0.25)
    draw = PauliSum.single(9, "Z", CENTER)
    cross = PauliSum(9)
    for q in RING_EDGES:
        cross.add_term("I" * q + "Z" + "I" * (8 - q), 0.25)
    return [circle, draw, cross]


def driving_observable() -> list[PauliSum]:
    return [PauliSum.single(9, "Z", CENTER)]


@dataclass
class ReuploadModel:
    """A data re-uploading circuit plus observables and symmetry bookkeeping.

    ``template`` interleaves the marker "encode" with trainable gates; bind()
    substitutes the encoding gates for a concrete input.
    """

    task: str
    n: int
    l: int
    p: int
    layout: str
    invariant: bool
    entangler: str
    embedding: EmbeddingSpec
    observables: list[PauliSum]
    symmetry: SymmetryRep
    template: list = field(default_factory=list)
    param_count: int = 0
    slot_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._compiled_obs = [CompiledPauliSum(o) for o in self.observables]

    # -- construction helpers -------------------------------------------

    def _new_slot(self, label: str) -> int:
        self.slot_labels.append(label)
        self.param_count += 1
        return self.param_count - 1

    def _add_single_qubit_layer(self, letter: str, occurrence: int) -> None:
        qubits = SINGLE_QUBIT_CLASSES[letter]
        if self.invariant:
            slots = [self._new_slot(f"{letter}{occurrence}.{ax}") for ax in "zyz"]
            for q in qubits:
                for axis, slot in zip("ZYZ", slots):
                    gen = PauliSum.single(self.n, axis, q, 1.0)
                    self.template.append(
                        Gate.parametrized(gen, slot, scale=0.5, label=f"R{axis}{q}")
                    )
        else:
            for q in qubits:
                for k, axis in enumerate("ZYZ"):
                    slot = self._new_slot(f"{letter}{occurrence}.q{q}.{'zyz'[k]}")
                    gen = PauliSum.single(self.n, axis, q, 1.0)
                    self.template.append(
                        Gate.parametrized(gen, slot, scale=0.5, label=f"R{axis}{q}")
                    )

    def _entangler_classes(self, letter: str) -> list[tuple[str, tuple]]:
        if letter == "o":
            if self.symmetry.name == "z4":
                return [("o.cw", O_PAIRS_CLOCKWISE), ("o.ccw", O_PAIRS_COUNTER)]
            return [("o", O_PAIRS_CLOCKWISE + O_PAIRS_COUNTER)]
        if letter == "i":
            return [("i", I_PAIRS)]
        return [("d", D_PAIRS)]

    def _add_entangler_layer(self, letter: str, occurrence: int) -> None:
        for cls_name, pairs in self._entangler_classes(letter):
            if self.invariant:
                slot = self._new_slot(f"{cls_name}{occurrence}")
                for control, target in pairs:
                    self.template.append(
                        _controlled_rotation_gate(control, target, self.entangler, slot, self.n)
                    )
            else:
                for control, target in pairs:
                    slot = self._new_slot(f"{cls_name}{occurrence}.{control}-{target}")
                    self.template.append(
                        _controlled_rotation_gate(control, target, self.entangler, slot, self.n)
                    )

    def _build(self) -> None:
        block = self.layout if "t" in self.layout else "t" + self.layout * self.p
        full = (block * self.p if "t" in self.layout else block) * self.l
        occurrence = 0
        for letter in full:
            if letter == "t":
                self.template.append("encode")
                continue
            occurrence += 1
            if letter in SINGLE_QUBIT_CLASSES:
                self._add_single_qubit_layer(letter, occurrence)
            else:
                self._add_entangler_layer(letter, occurrence)

    # -- execution -------------------------------------------------------

    def bind(self, x: Sequence[float]) -> Circuit:
        """The concrete circuit for one data point."""
        enc = encode(self.embedding, x)
        gates: list[Gate] = []
        for entry in self.template:
            if entry == "encode":
                gates.extend(enc)
            else:
                gates.append(entry)
        return Circuit(self.n, gates, self.param_count)

    def predict(self, params: Sequence[float], x: Sequence[float]) -> np.ndarray:
        circuit = self.bind(x)
        state = run_circuit(circuit, params)
        psi = state.amplitudes
        vals = np.array(
            [float(np.real(np.vdot(psi, c.apply(psi)))) for c in self._compiled_obs]
        )
        if self.task == "driving":
            return (vals + 1.0) / 2.0
        return vals

    def loss_and_grad(
        self, params: Sequence[float], xs: np.ndarray, ys: np.ndarray
    ) -> tuple[float, np.ndarray]:
        """Mean squared-error loss and its exact gradient over a batch.

        Per-sample gradients are stacked and summed in index order, so the
        result is bit-identical however samples are scheduled.
        """
        params = np.asarray(params, dtype=float)
        per_loss = np.zeros(len(xs))
        per_grad = np.zeros((len(xs), self.param_count))
        for i, (x, y) in enumerate(zip(xs, np.atleast_2d(ys.T).T)):
            circuit = self.bind(x)
            state = run_circuit(circuit, params)
            psi = state.amplitudes
            obs_psi = [c.apply(psi) for c in self._compiled_obs]
            raw = np.array([float(np.real(np.vdot(psi, v))) for v in obs_psi])
            if self.task == "driving":
                yhat = (raw + 1.0) / 2.0
                residual = yhat - np.atleast_1d(y)
                # d yhat / d raw = 1/2
                weights = residual
            else:
                residual = raw - np.asarray(y, dtype=float)
                weights = 2.0 * residual
            lam = np.zeros_like(psi)
            for w, v in zip(weights, obs_psi):
                lam += w * v
            per_loss[i] = float(np.dot(residual, residual))
            per_grad[i] = _adjoint_sweep(circuit, params, psi, lam)
        return float(per_loss.mean()), per_grad.mean(axis=0)

    def slot_generators(self) -> dict[int, PauliSum]:
        """Effective generator per slot: sum of scale * G over bound gates."""
        out: dict[int, PauliSum] = {}
        for entry in self.template:
            if entry == "encode":
                continue
            acc = out.setdefault(entry.slot, PauliSum(self.n))
            for w, c in entry.generator.items():
                acc.add_term(w, c * entry.scale)
        return out

    def describe(self) -> dict:
        return {
            "task": self.task,
            "n": self.n,
            "l": self.l,
            "p": self.p,
            "layout": self.layout,
            "invariant": self.invariant,
            "entangler": self.entangler,
            "symmetry": self.symmetry.name,
            "param_count": self.param_count,
            "parameter_sharing": "symmetry-classes" if self.invariant else "none",
            "embedding": self.embedding.to_json(),
            "conventions": {
                "rotation": "R_A(theta) = exp(-i theta A / 2)",
                "controlled_rotation": "CR_A(theta) = exp(-i theta/2 |1><1| (x) A)",
                "encoding_angle": "scale * feature, scale = 2*pi/3",
                "qubit_order": "qubit 0 is the most significant basis-state bit",
            },
        }


def build_ttt_model(
    l: int,
    p: int,
    layout: str = "cemoid",
    invariant: bool = True,
    entangler: str = "Y",
) -> ReuploadModel:
    """Board classifier: D4 symmetry, CR_Y entanglers, three Z observables."""
    validate_layout(layout)
    if l < 1 or p < 1:
        raise ValueError("l and p must be >= 1")
    if entangler not in "XYZ":
        raise ValueError("entangler axis must be X, Y or Z")
    model = ReuploadModel(
        task="ttt",
        n=9,
        l=l,
        p=p,
        layout=layout,
        invariant=invariant,
        entangler=entangler,
        embedding=EmbeddingSpec("featurewise", n=9, feature_dim=9, axis="X", scale=TTT_ENCODING_SCALE),
        observables=ttt_observables(),
        symmetry=make_d4_rep(),
    )
    model._build()
    return model


def build_driving_model(
    l: int,
    p: int,
    layout: str = "cemoid",
    invariant: bool = True,
) -> ReuploadModel:
    """Difficulty regressor: Z4 symmetry, CR_Z entanglers, center observable.

    Under rotations-only symmetry the corner->edge layer splits into
    clockwise and counter-clockwise sub-layers with separate shared angles.
    """
    validate_layout(layout)
    if l < 1 or p < 1:
        raise ValueError("l and p must be >= 1")
    model = ReuploadModel(
        task="driving",
        n=9,
        l=l,
        p=p,
        layout=layout,
        invariant=invariant,
        entangler="Z",
        embedding=EmbeddingSpec("featurewise", n=9, feature_dim=9, axis="X", scale=TTT_ENCODING_SCALE),
        observables=driving_observable(),
        symmetry=make_z4_rep(),
    )
    model._build()
    return model


def predict(model: ReuploadModel, params: Sequence[float], x: Sequence[float]) -> np.ndarray:
    """Soft prediction vector: class expectations (board) or [difficulty]."""
    return model.predict(params, x)


def hard_prediction(model: ReuploadModel, soft: np.ndarray):
    """argmax class index (ties to the lowest index) or the nearest
    difficulty level (ties to the smaller value)."""
    if model.task == "ttt":
        return int(np.argmax(soft))
    yhat = float(np.clip(soft[0], 0.0, 1.0))
    return float(np.ceil(yhat * 5 - 0.5) / 5)


def check_model_invariance(
    model: ReuploadModel,
    params: Sequence[float],
    inputs: Sequence[Sequence[float]],
    rep: SymmetryRep | None = None,
) -> float:
    """Max prediction deviation under the symmetry's data-side action."""
    from .datasets import apply_board_permutation

    rep = rep or model.symmetry
    worst = 0.0
    for x in inputs:
        base = model.predict(params, x)
        for perm in rep.data_permutations():
            moved = model.predict(params, apply_board_permutation(tuple(x), perm))
            worst = max(worst, float(np.max(np.abs(moved - base))))
    return worst
