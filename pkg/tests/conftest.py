"""Shared test helpers."""

import numpy as np

from symmqvar.paulis import PauliSum
from symmqvar.sim import Circuit, Gate, rotation_matrix


def random_circuit(rng, n, n_gates, shared=False):
    """Random mix of fixed rotations and 1-2 qubit generated rotations."""
    gates = []
    param_count = 0
    for _ in range(n_gates):
        kind = rng.integers(0, 3)
        if kind == 0:
            q = int(rng.integers(0, n))
            gates.append(
                Gate.fixed(rotation_matrix("XYZ"[rng.integers(0, 3)], rng.uniform(0, np.pi)), (q,))
            )
            continue
        if kind == 1 or n < 2:
            q = int(rng.integers(0, n))
            gen = PauliSum.single(n, "XYZ"[rng.integers(0, 3)], q, rng.uniform(0.5, 1.5))
        else:
            q1, q2 = rng.choice(n, size=2, replace=False)
            gen = PauliSum.two(
                n,
                "XYZ"[rng.integers(0, 3)],
                int(q1),
                "XYZ"[rng.integers(0, 3)],
                int(q2),
                rng.uniform(0.5, 1.5),
            )
            if rng.random() < 0.3:
                extra = gen + PauliSum.single(n, "XYZ"[rng.integers(0, 3)], int(q1), 1.0)
                if extra.terms_commute():
                    gen = extra
        if shared and param_count and rng.random() < 0.4:
            slot = int(rng.integers(0, param_count))
        else:
            slot = param_count
            param_count += 1
        gates.append(Gate.parametrized(gen, slot, scale=rng.uniform(0.5, 1.5)))
    return Circuit(n, gates, max(param_count, 1))
