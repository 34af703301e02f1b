"""Hamiltonians, equivariant and free ansaetze, energy minimization and the
gradient-variance (barren plateau) experiment.

Site indices are 0-based; the spin-chain models are periodic, and the
9-site lattice model reuses the ring-plus-center board indexing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.sparse.linalg import LinearOperator, eigsh

from .paulis import PauliSum, dense_matrix
from .sim import Circuit, CompiledPauliSum, Gate, StateVector, value_and_gradient
from .symmetry import (
    CENTER,
    RING_CORNERS,
    RING_EDGES,
    HaarTwirlSpec,
    SymmetryRep,
    make_d4_rep,
    make_parity_rep,
)

FAMILIES = (
    "QAOA",
    "QAOAPrime",
    "HeisFree",
    "HeisEquivariant",
    "LTFIMFree",
    "LTFIMEquivariant",
)

#: lattice edges of the 9-site model, by coupling class
LTFIM_CONTOUR = tuple((i, (i + 1) % 8) for i in range(8))
LTFIM_INSIDE = tuple((q, CENTER) for q in RING_EDGES)
LTFIM_DIAG = tuple((q, CENTER) for q in RING_CORNERS)


@dataclass
class Hamiltonian:
    """A Hermitian operator with model metadata and a cached ground energy."""

    op: PauliSum
    model: str
    N: int
    couplings: dict = field(default_factory=dict)
    _ground: float | None = None

    @property
    def n(self) -> int:
        return self.op.n

    def ground_energy(self) -> float:
        if self._ground is None:
            self._ground = exact_ground_energy(self)
        return self._ground


def _chain_bonds(N: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % N) for i in range(N)]


def build_hamiltonian(model: str, N: int, g: float | None = None) -> Hamiltonian:
    """Assemble one of the three studied Hamiltonians.

    The periodic bond sum is kept literal, so at N=2 the single physical
    bond appears with doubled coefficient.
    """
    model = model.lower()
    if model == "tfim":
        if N < 2:
            raise ValueError("tfim needs N >= 2")
        g = 1.0 if g is None else float(g)
        op = PauliSum(N)
        for i, j in _chain_bonds(N):
            op.add_term(_two_word(N, "Z", i, "Z", j), -1.0)
        for i in range(N):
            op.add_term(_one_word(N, "X", i), -g)
        return Hamiltonian(op, "tfim", N, {"g": g})
    if model == "heisenberg":
        if N < 2 or N % 2:
            raise ValueError("heisenberg needs an even N >= 2")
        op = PauliSum(N)
        for i, j in _chain_bonds(N):
            for a in "XYZ":
                op.add_term(_two_word(N, a, i, a, j), 1.0)
        return Hamiltonian(op, "heisenberg", N, {})
    if model == "ltfim":
        if N != 9:
            raise ValueError("the lattice model is fixed to 9 sites")
        op = PauliSum(9)
        for cls, weight in (("contour", 1.0), ("inside", 0.5), ("diag", 1.5)):
            for i, j in _ltfim_edges(cls):
                op.add_term(_two_word(9, "Z", i, "Z", j), weight)
        for i in range(9):
            op.add_term(_one_word(9, "X", i), 1.0)
            op.add_term(_one_word(9, "Z", i), 1.0)
        return Hamiltonian(
            op, "ltfim", 9, {"contour": 1.0, "inside": 0.5, "diag": 1.5}
        )
    raise ValueError(f"unknown model {model!r}")


def _ltfim_edges(cls: str) -> tuple:
    return {"contour": LTFIM_CONTOUR, "inside": LTFIM_INSIDE, "diag": LTFIM_DIAG}[cls]


def _one_word(n: int, a: str, i: int) -> str:
    return "I" * i + a + "I" * (n - i - 1)


def _two_word(n: int, a: str, i: int, b: str, j: int) -> str:
    w = ["I"] * n
    w[i], w[j] = a, b
    return "".join(w)


def _class_sum(n: int, letter: str, sites: Sequence[int]) -> PauliSum:
    op = PauliSum(n)
    for i in sites:
        op.add_term(_one_word(n, letter, i), 1.0)
    return op


def _bond_sum(n: int, letters: str, bonds: Sequence[tuple[int, int]]) -> PauliSum:
    op = PauliSum(n)
    for i, j in bonds:
        for a in letters:
            op.add_term(_two_word(n, a, i, a, j), 1.0)
    return op


# ---------------------------------------------------------------------------
# Ansaetze
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnsatzSpec:
    family: str
    N: int
    p: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; pick from {FAMILIES}")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.family.startswith("Heis") and self.N % 2:
            raise ValueError("Heisenberg ansaetze need an even N")
        if self.family.startswith("LTFIM") and self.N != 9:
            raise ValueError("lattice ansaetze are fixed to N=9")

    @property
    def param_count(self) -> int:
        return {
            "QAOA": 2,
            "QAOAPrime": 3,
            "HeisFree": 7,
            "HeisEquivariant": 2,
            "LTFIMFree": 34,
            "LTFIMEquivariant": 9,
        }[self.family] * self.p


def singlet_state(N: int) -> StateVector:
    """Pairwise singlets on sites (0,1), (2,3), ...; total spin zero."""
    pair = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    amps = np.array([1.0])
    for _ in range(N // 2):
        amps = np.kron(amps, pair)
    return StateVector(N, amps.astype(complex))


def _even_bonds(N: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(0, N, 2)]


def _odd_bonds(N: int) -> list[tuple[int, int]]:
    return [(i, (i + 1) % N) for i in range(1, N, 2)]


def family_gateset(family: str, N: int) -> list[PauliSum]:
    """The per-layer generator list, one entry per parameter slot."""
    if family in ("QAOA", "QAOAPrime"):
        out = [
            _bond_sum(N, "Z", _chain_bonds(N)),
            _class_sum(N, "X", range(N)),
        ]
        if family == "QAOAPrime":
            out.append(_class_sum(N, "Y", range(N)))
        return out
    if family == "HeisFree":
        return [
            _bond_sum(N, a, _odd_bonds(N)) for a in "XYZ"
        ] + [
            _bond_sum(N, a, _even_bonds(N)) for a in "XYZ"
        ] + [_class_sum(N, "Y", range(N))]
    if family == "HeisEquivariant":
        return [_bond_sum(N, "XYZ", _odd_bonds(N)), _bond_sum(N, "XYZ", _even_bonds(N))]
    if family == "LTFIMFree":
        out: list[PauliSum] = []
        for cls in ("contour", "inside", "diag"):
            for i, j in _ltfim_edges(cls):
                out.append(PauliSum.from_word(_two_word(9, "Z", i, "Z", j)))
        for a in "XZ":
            for i in range(9):
                out.append(PauliSum.from_word(_one_word(9, a, i)))
        return out
    if family == "LTFIMEquivariant":
        out = [
            _bond_sum(9, "Z", _ltfim_edges(cls)) for cls in ("contour", "inside", "diag")
        ]
        for a in "XZ":
            for sites in (RING_CORNERS, RING_EDGES, (CENTER,)):
                out.append(_class_sum(9, a, sites))
        return out
    raise ValueError(f"unknown family {family!r}")


def family_twirler(family: str, N: int):
    """The symmetrization that turns the free family into the equivariant one."""
    if family in ("QAOA", "QAOAPrime"):
        return make_parity_rep(N)
    if family.startswith("Heis"):
        return HaarTwirlSpec(N)
    return make_d4_rep()


def build_ansatz(spec: AnsatzSpec) -> tuple[Circuit, StateVector]:
    """The layered circuit and its symmetry-sector initial state."""
    N, p = spec.N, spec.p
    circuit = Circuit(N, [], spec.param_count)
    layer_gens = family_gateset(spec.family, N)
    slot = 0
    for _ in range(p):
        for gen in layer_gens:
            circuit.add(Gate.parametrized(gen, slot))
            slot += 1
    assert slot == spec.param_count
    if spec.family in ("QAOA", "QAOAPrime"):
        initial = StateVector.plus(N)
    elif spec.family.startswith("Heis"):
        initial = singlet_state(N)
    else:
        initial = StateVector.plus(9)
    return circuit, initial


# ---------------------------------------------------------------------------
# Exact diagonalization oracle
# ---------------------------------------------------------------------------


def exact_ground_energy(h: Hamiltonian | PauliSum) -> float:
    """Minimum eigenvalue, dense up to 9 qubits, iterative above (max 12)."""
    op = h.op if isinstance(h, Hamiltonian) else h
    n = op.n
    if n > 12:
        raise ValueError("exact diagonalization limited to n <= 12")
    dim = 1 << n
    if n <= 9:
        return float(np.linalg.eigvalsh(dense_matrix(op)).min())
    compiled = CompiledPauliSum(op)
    action = LinearOperator(
        (dim, dim), matvec=lambda v: compiled.apply(v.astype(complex)), dtype=complex
    )
    vals = eigsh(action, k=1, which="SA", tol=1e-12, maxiter=50000)[0]
    return float(vals[0])


# ---------------------------------------------------------------------------
# Energy minimization
# ---------------------------------------------------------------------------


@dataclass
class VqeResult:
    family: str
    N: int
    p: int
    seed: int
    final_energy: float
    exact_energy: float
    iterations: int
    fn_evals: int
    initial_energy: float
    energy_trace: list[float] = field(default_factory=list)
    final_params: np.ndarray | None = None

    @property
    def relative_error(self) -> float:
        return abs(self.final_energy - self.exact_energy) / abs(self.exact_energy)


def minimize_energy(
    h: Hamiltonian,
    spec: AnsatzSpec,
    seed: int,
    gtol: float = 1e-8,
    max_iterations: int = 5000,
) -> VqeResult:
    """Quasi-Newton minimization of <H> from a uniform random start.

    The returned energy respects the variational bound against the
    diagonalization oracle (asserted to 1e-8).
    """
    if h.n != spec.N:
        raise ValueError("Hamiltonian and ansatz sizes differ")
    circuit, initial = build_ansatz(spec)
    rng = np.random.default_rng(seed)
    theta0 = rng.uniform(0.0, 2 * np.pi, spec.param_count)
    trace: list[float] = []

    def objective(theta):
        value, grad = value_and_gradient(circuit, theta, h.op, initial=initial)
        if not np.isfinite(value):
            raise FloatingPointError("non-finite energy during optimization")
        return value, grad

    e0 = objective(theta0)[0]
    if max_iterations == 0:
        res_x, res_fun, nit, nfev = theta0, e0, 0, 1
    else:
        res = minimize(
            objective,
            theta0,
            jac=True,
            method="L-BFGS-B",
            callback=lambda xk: trace.append(objective(xk)[0]),
            options={
                "maxiter": max_iterations,
                "maxcor": 10,
                "gtol": gtol,
                "ftol": 0.0,
            },
        )
        res_x, res_fun, nit, nfev = np.asarray(res.x), float(res.fun), int(res.nit), int(res.nfev)
    exact = h.ground_energy()
    assert res_fun >= exact - 1e-8, (
        f"variational bound violated: {res_fun} < {exact} - 1e-8"
    )
    return VqeResult(
        family=spec.family,
        N=spec.N,
        p=spec.p,
        seed=seed,
        final_energy=res_fun,
        exact_energy=exact,
        iterations=nit,
        fn_evals=nfev,
        initial_energy=float(e0),
        energy_trace=trace,
        final_params=res_x,
    )


# ---------------------------------------------------------------------------
# Gradient-variance experiment
# ---------------------------------------------------------------------------


def build_probe_ansatz(family: str, N: int, p: int) -> tuple[Circuit, StateVector, int]:
    """The ansatz with the probed rotation angle split into its own slot.

    The probe is the first layer's rotation touching site 0: the X mixer
    term on site 0 for the QAOA and lattice families, the bond term
    containing site 0 inside the first odd-layer generator for the
    Heisenberg families. Gates sharing the original slot keep it.
    """
    base, initial = build_ansatz(AnsatzSpec(family, N, p))
    if family in ("QAOA", "QAOAPrime"):
        target = _class_sum(N, "X", range(N))
        probe = _class_sum(N, "X", [0])
        rest = _class_sum(N, "X", range(1, N))
    elif family.startswith("Heis"):
        letters = "X" if family == "HeisFree" else "XYZ"
        target = _bond_sum(N, letters, _odd_bonds(N))
        bond = next(b for b in _odd_bonds(N) if 0 in b)
        probe = _bond_sum(N, letters, [bond])
        rest = _bond_sum(N, letters, [b for b in _odd_bonds(N) if b != bond])
    elif family == "LTFIMFree":
        # every rotation already owns a slot; probe the existing X_0 gate
        word = PauliSum.from_word(_one_word(9, "X", 0))
        for g in base.gates:
            if g.generator is not None and g.generator.allclose(word, tol=1e-12):
                return base, initial, g.slot
        raise RuntimeError("probe gate not found")
    else:
        target = _class_sum(9, "X", RING_CORNERS)
        probe = _class_sum(9, "X", [0])
        rest = _class_sum(9, "X", [q for q in RING_CORNERS if q != 0])
    new = Circuit(base.n, [], base.param_count + 1)
    probe_slot = base.param_count
    done = False
    for g in base.gates:
        if not done and g.generator is not None and g.generator.allclose(target, tol=1e-12):
            new.add(Gate.parametrized(probe, probe_slot, scale=g.scale))
            new.add(Gate.parametrized(rest, g.slot, scale=g.scale))
            done = True
        else:
            new.add(g)
    if not done:
        raise RuntimeError("probe gate not found")
    return new, initial, probe_slot


def barren_variance(
    family: str,
    n_list: Sequence[int],
    p: int,
    observable: str = "Z1Z2",
    samples: int = 1000,
    seed: int = 0,
) -> list[dict]:
    """Empirical variance of one partial derivative at random parameters.

    For each system size, `samples` parameter vectors are drawn from
    Uniform[0, 2pi]; the derivative of <Z_1 Z_2> with respect to the first
    layer's rotation angle on the first site is computed exactly, and its
    variance is returned with a standard error from the fourth-moment
    formula.
    """
    if observable != "Z1Z2":
        raise ValueError("only the Z1Z2 observable is supported")
    rows = []
    for N in n_list:
        probed, initial, slot = build_probe_ansatz(family, N, p)
        obs = PauliSum.two(N, "Z", 0, "Z", 1)
        rng = np.random.default_rng(seed)
        grads = np.empty(samples)
        for s in range(samples):
            theta = rng.uniform(0.0, 2 * np.pi, probed.param_count)
            _, grad = value_and_gradient(probed, theta, obs, initial=initial)
            grads[s] = grad[slot]
        var = float(np.var(grads, ddof=1))
        centered = grads - grads.mean()
        m4 = float(np.mean(centered**4))
        m = samples
        se = float(np.sqrt(max(m4 - var**2 * (m - 3) / (m - 1), 0.0) / m))
        rows.append(
            {"family": family, "N": int(N), "variance": var, "stderr": se}
        )
    return rows


def log_variance_slope(rows: Sequence[dict]) -> float:
    """Least-squares slope of log(variance) against N."""
    ns = np.array([r["N"] for r in rows], dtype=float)
    logv = np.log(np.array([r["variance"] for r in rows], dtype=float))
    a = np.vstack([ns, np.ones_like(ns)]).T
    slope, _ = np.linalg.lstsq(a, logv, rcond=None)[0]
    return float(slope)
