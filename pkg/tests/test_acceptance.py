"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every test prints a `[ACCEPTANCE] <criterion>: PASS` line when it succeeds
(visible with `pytest -s`). The full-protocol generalization criterion runs
for hours and is marked `slow`; its prescribed --smoke variant (10 epochs,
sign of the test-accuracy delta only, indicative) runs in the default
suite. Everything else runs by default.
"""

import concurrent.futures
import os

import numpy as np
import pytest

from conftest import random_circuit
from symmqvar.datasets import (
    SplitSpec,
    balanced_split,
    enumerate_driving,
    enumerate_ttt,
    features_and_targets,
    apply_board_permutation,
)
from symmqvar.embeddings import (
    EmbeddingSpec,
    euler_rotation,
    o3_inflection_element,
    permutation_action,
    sign_flip_action,
    so3_induced_element,
    verify_equivariance,
)
from symmqvar.models import build_driving_model, build_ttt_model, check_model_invariance
from symmqvar.paulis import PauliSum, dense_matrix
from symmqvar.sim import finite_difference_gradient, gradient_adjoint
from symmqvar.symmetry import (
    BUILTIN_REPS,
    HaarTwirlSpec,
    check_commutes,
    haar_twirl_monte_carlo,
    make_d4_rep,
    make_exchange_rep,
    make_klein_rep,
    make_parity_rep,
    make_signflip_rep,
    symmetrize_gateset,
    twirl_finite,
    twirl_haar_local,
)
from symmqvar.training import TrainConfig, TrainData, gradient_check, train
from symmqvar.vqe import (
    AnsatzSpec,
    barren_variance,
    build_hamiltonian,
    family_gateset,
    log_variance_slope,
    minimize_energy,
)

STANDARD_2Q = [
    PauliSum.from_word(w) for w in ("XI", "YI", "ZI", "IX", "IY", "IZ", "ZZ")
]


def _announce(name):
    print(f"[ACCEPTANCE] {name}: PASS")


def _random_op(rng, n, n_terms=6):
    op = PauliSum(n)
    for _ in range(n_terms):
        word = "".join(rng.choice(list("IXYZ"), n))
        if set(word) != {"I"}:
            op.add_term(word, rng.normal())
    return op


# -- 1. twirl exactness -------------------------------------------------------


def test_twirl_exactness_displayed_gatesets():
    """The two-qubit gatesets under exchange, sign-flip and the full group
    come out coefficient-exact."""
    exchange, _ = symmetrize_gateset(STANDARD_2Q, make_exchange_rep())
    assert [g.terms for g in exchange] == [
        {"XI": 0.5, "IX": 0.5},
        {"YI": 0.5, "IY": 0.5},
        {"ZI": 0.5, "IZ": 0.5},
        {"ZZ": 1.0},
    ]
    signflip, _ = symmetrize_gateset(STANDARD_2Q, make_signflip_rep())
    assert [g.terms for g in signflip] == [{"XI": 1.0}, {"IX": 1.0}, {"ZZ": 1.0}]
    full, _ = symmetrize_gateset(STANDARD_2Q, make_klein_rep())
    assert [g.terms for g in full] == [{"XI": 0.5, "IX": 0.5}, {"ZZ": 1.0}]
    _announce("twirl exactness (exchange / sign-flip / full gatesets)")


# -- 2. twirl properties -------------------------------------------------------


def test_twirl_projector_properties_on_random_operators():
    """Idempotence within 1e-12 and commutant membership within 1e-10 on 200
    random operators per built-in representation."""
    for name, factory in sorted(BUILTIN_REPS.items()):
        rep = factory()
        rng = np.random.default_rng(abs(hash(name)) % 2**32)
        for _ in range(200):
            op = _random_op(rng, rep.n)
            once = twirl_finite(rep, op)
            twice = twirl_finite(rep, once)
            assert twice.max_coeff_diff(once) < 1e-12
            assert check_commutes(once, rep, 1e-10).ok
    _announce("twirl projector properties (200 ops x 5 reps)")


# -- 3. Haar twirl --------------------------------------------------------------


def test_haar_twirl_against_monte_carlo_oracle():
    """Closed form vs 1e5-sample Haar averaging within 1e-2 on all weight-2
    pairs; the XX image is exact."""
    spec = HaarTwirlSpec(2)
    xx = twirl_haar_local(spec, PauliSum.from_word("XX"))
    assert xx.terms == {
        "XX": pytest.approx(1 / 3, abs=1e-15),
        "YY": pytest.approx(1 / 3, abs=1e-15),
        "ZZ": pytest.approx(1 / 3, abs=1e-15),
    }
    for a in "XYZ":
        for b in "XYZ":
            op = PauliSum.from_word(a + b)
            closed = dense_matrix(twirl_haar_local(spec, op))
            mc = haar_twirl_monte_carlo(op, samples=100_000, seed=23)
            mc = mc - np.trace(mc) / 4 * np.eye(4)  # identity part = dropped phase
            assert np.max(np.abs(closed - mc)) < 1e-2, (a, b)
    _announce("Haar twirl vs Monte-Carlo oracle (9 pairs, 1e5 samples)")


# -- 4. embedding equivariance --------------------------------------------------


def test_embedding_equivariance_all_three_settings():
    """verify_equivariance passes at 1e-9 for the 9-qubit board encoding
    under all 8 square symmetries, the two-qubit example, and the
    rotation-group encodings over 100 random Euler triples."""
    board_spec = EmbeddingSpec("featurewise", n=9, feature_dim=9, axis="X", scale=2 * np.pi / 3)
    for e in make_d4_rep().elements:
        res = verify_equivariance(board_spec, permutation_action(e.perm), e, samples=50, tol=1e-9)
        assert res.ok, (e.name, res.max_deviation)
    pair_spec = EmbeddingSpec("featurewise", n=2, feature_dim=2, axis="Z", scale=1.0)
    for e in make_klein_rep().elements:
        action = permutation_action(e.perm)
        if "X" in e.frame:
            base = action
            action = lambda x, base=base: -np.asarray(base(x))
        res = verify_equivariance(pair_spec, action, e, samples=50, tol=1e-9)
        assert res.ok, e.name
    rng = np.random.default_rng(0)
    so3_spec = EmbeddingSpec("so3", n=1, feature_dim=3)
    o3_spec = EmbeddingSpec("o3", n=2, feature_dim=3)
    for _ in range(100):
        psi, theta, phi = rng.uniform(-np.pi, np.pi, 3)
        action = lambda x: euler_rotation(psi, theta, phi) @ x
        assert verify_equivariance(so3_spec, action, so3_induced_element(psi, theta, phi), samples=2, tol=1e-9).ok
        assert verify_equivariance(o3_spec, action, so3_induced_element(psi, theta, phi, n=2), samples=2, tol=1e-9).ok
    assert verify_equivariance(o3_spec, sign_flip_action, o3_inflection_element(), samples=50, tol=1e-9).ok
    _announce("embedding equivariance (board / pair / rotation groups)")


# -- 5. model invariance ---------------------------------------------------------


def test_model_invariance_100_params_20_inputs():
    """Invariant board and driving models: prediction deviation < 1e-9 under
    their full symmetry groups for 100 random parameter vectors x 20 inputs."""
    rng = np.random.default_rng(1)
    inputs = [rng.choice([-1.0, 0.0, 1.0], 9) for _ in range(20)]
    for model in (build_ttt_model(1, 2), build_driving_model(2, 1)):
        worst = 0.0
        for _ in range(100):
            params = rng.uniform(0, 2 * np.pi, model.param_count)
            worst = max(worst, check_model_invariance(model, params, inputs))
        assert worst < 1e-9, (model.task, worst)
    _announce("model invariance (100 params x 20 inputs x full groups)")


# -- 6. gradient correctness -----------------------------------------------------


def test_gradient_correctness_random_circuits_and_checkpoints():
    """Adjoint vs central finite differences (h=1e-5), relative error < 1e-6
    componentwise (absolute floor 1 for flat directions), on 50 random
    circuits and at 3 checkpoints of each training smoke setup."""
    for seed in range(50):
        rng = np.random.default_rng(2000 + seed)
        n = int(rng.integers(1, 6))
        circuit = random_circuit(rng, n, 12, shared=True)
        params = rng.uniform(0, 2 * np.pi, circuit.param_count)
        obs = _random_op(rng, n, n_terms=4)
        if not obs:
            obs = PauliSum.single(n, "Z", 0)
        adj = gradient_adjoint(circuit, params, obs)
        fd = finite_difference_gradient(circuit, params, obs, step=1e-5)
        err = np.abs(adj - fd) / np.maximum(1.0, np.abs(fd))
        assert err.max() < 1e-6
    rng = np.random.default_rng(77)
    games = enumerate_ttt()
    gx, gy = features_and_targets(balanced_split(games, SplitSpec(30, 9, seed=0))[0])
    scen = enumerate_driving()
    dx, dy = features_and_targets(
        balanced_split(scen, SplitSpec(30, 9, seed=0, balance_key="difficulty", allow_duplicates=True))[0]
    )
    for model, xs, ys in (
        (build_ttt_model(1, 1), gx[:8], gy[:8]),
        (build_driving_model(1, 1), dx[:8], dy[:8]),
    ):
        for _ in range(3):
            params = rng.uniform(0, 2 * np.pi, model.param_count)
            assert gradient_check(model, params, xs, ys, step=1e-5) < 1e-6
    _announce("gradient correctness (50 circuits + 2x3 training checkpoints)")


# -- 7. generalization trend -----------------------------------------------------


def _generalization_run(job):
    model = build_ttt_model(2, 2, "cemoid", invariant=job["invariant"])
    games = enumerate_ttt()
    train_set, test_set = balanced_split(games, SplitSpec(450, 600, seed=job["seed"]))
    tx, ty = features_and_targets(train_set)
    sx, sy = features_and_targets(test_set)
    config = TrainConfig(
        epochs=job["epochs"], steps_per_epoch=30, batch_size=15,
        learning_rate=0.01, seed=job["seed"],
    )
    result = train(model, TrainData(tx, ty, sx, sy), config)
    return {
        "invariant": job["invariant"],
        "train_acc": result.final("train_acc"),
        "test_acc": result.final("test_acc"),
    }


def _run_generalization(epochs: int):
    jobs = [
        {"invariant": invariant, "seed": seed, "epochs": epochs}
        for invariant in (True, False)
        for seed in range(5)
    ]
    workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_generalization_run, jobs))
    else:
        results = [_generalization_run(job) for job in jobs]
    inv = [r for r in results if r["invariant"]]
    free = [r for r in results if not r["invariant"]]
    delta_test = np.mean([r["test_acc"] for r in inv]) - np.mean([r["test_acc"] for r in free])
    delta_train = np.mean([r["train_acc"] for r in inv]) - np.mean([r["train_acc"] for r in free])
    return delta_test, delta_train, results


def test_generalization_trend_smoke_sign_only():
    """--smoke variant: 10 epochs, 5 seeds per variant at (l,p)=(2,2); the
    invariant-minus-free test-accuracy delta must already have the positive
    sign. Indicative only; the full margin criterion is the slow test."""
    delta_test, delta_train, _ = _run_generalization(epochs=10)
    print(f"[indicative] smoke delta_test={delta_test:+.4f} delta_train={delta_train:+.4f}")
    assert delta_test > 0.0
    _announce("generalization trend, smoke variant (sign only, indicative)")


@pytest.mark.slow
def test_generalization_trend_full_protocol():
    """Full protocol: 100 epochs x 30 steps, batch 15, 5 seeds per variant.
    Invariant models beat free models on test accuracy by > 0.02 while the
    train-accuracy difference stays within +-0.1."""
    delta_test, delta_train, results = _run_generalization(epochs=100)
    print(f"[full] delta_test={delta_test:+.4f} delta_train={delta_train:+.4f}")
    for r in results:
        print(r)
    assert delta_test > 0.02
    assert abs(delta_train) <= 0.1
    _announce("generalization trend, full protocol")


# -- 8. TFIM depth threshold -----------------------------------------------------


def test_tfim_depth_threshold():
    """p = N/2 reaches the diagonalization oracle within 1e-4 relative (best
    of 20 seeds); p = N/2 - 1 stays off by more than 1e-3 relative."""
    for N in (4, 6):
        h = build_hamiltonian("tfim", N, g=1.0)
        exact = h.ground_energy()
        for p, should_reach in ((N // 2, True), (N // 2 - 1, False)):
            best = min(
                minimize_energy(h, AnsatzSpec("QAOA", N, p), seed=s).final_energy
                for s in range(20)
            )
            rel = abs(best - exact) / abs(exact)
            if should_reach:
                assert rel < 1e-4, (N, p, rel)
            else:
                assert rel > 1e-3, (N, p, rel)
    _announce("TFIM depth threshold (p >= N/2 exact, p < N/2 blocked)")


# -- 9. ansatz/twirl consistency -------------------------------------------------


def test_ansatz_twirl_consistency_and_parameter_counts():
    """Symmetrizing the free gatesets reproduces the equivariant ones, and
    the per-family parameter counts hold exactly."""
    gens, _ = symmetrize_gateset(family_gateset("QAOAPrime", 8), make_parity_rep(8))
    assert [g.terms for g in gens] == [g.terms for g in family_gateset("QAOA", 8)]
    gens, _ = symmetrize_gateset(family_gateset("HeisFree", 8), HaarTwirlSpec(8))
    targets = family_gateset("HeisEquivariant", 8)
    assert len(gens) == len(targets)
    for got, want in zip(gens, targets):
        assert got.allclose(want * (1 / 3), tol=1e-12)  # positive scale only
    for family, per_layer in (
        ("QAOA", 2), ("QAOAPrime", 3), ("HeisFree", 7),
        ("HeisEquivariant", 2), ("LTFIMFree", 34), ("LTFIMEquivariant", 9),
    ):
        N = 9 if family.startswith("LTFIM") else 8
        for p in (1, 2, 7):
            assert AnsatzSpec(family, N, p).param_count == per_layer * p
    _announce("ansatz/twirl consistency + parameter counts")


# -- 10. variational bound -------------------------------------------------------


def test_variational_bound_across_families():
    """Every optimization result sits above the diagonalization oracle minus
    1e-8 (also enforced as a post-condition inside the optimizer)."""
    runs = [
        ("tfim", 4, "QAOA", 2),
        ("tfim", 4, "QAOAPrime", 1),
        ("heisenberg", 4, "HeisFree", 1),
        ("heisenberg", 4, "HeisEquivariant", 2),
        ("ltfim", 9, "LTFIMFree", 1),
        ("ltfim", 9, "LTFIMEquivariant", 1),
    ]
    for model, N, family, p in runs:
        h = build_hamiltonian(model, N, 1.0 if model == "tfim" else None)
        for seed in range(3):
            result = minimize_energy(h, AnsatzSpec(family, N, p), seed=seed, max_iterations=60)
            assert result.final_energy >= result.exact_energy - 1e-8
    _announce("variational bound (6 families x 3 seeds)")


# -- 11. barren-plateau trend ----------------------------------------------------


def test_barren_plateau_slope_comparison():
    """At p=20, N in {4,6,8}, 300 samples: the equivariant family's fitted
    log-variance slope against N is strictly shallower than the
    non-equivariant family's."""
    eq = barren_variance("QAOA", [4, 6, 8], p=20, samples=300, seed=0)
    ne = barren_variance("QAOAPrime", [4, 6, 8], p=20, samples=300, seed=0)
    s_eq, s_ne = log_variance_slope(eq), log_variance_slope(ne)
    print(f"slopes: equivariant {s_eq:.4f}, non-equivariant {s_ne:.4f}")
    assert s_eq > s_ne
    _announce("barren-plateau slope comparison (p=20, N=4..8, 300 samples)")


# -- 12. dataset integrity -------------------------------------------------------


def test_dataset_integrity():
    """Game enumeration agrees exactly with the independent brute-force
    oracle; square-symmetry images stay in-set with identical labels; the
    driving set has exactly 4 difficulty-1 scenarios."""
    from test_datasets import oracle_enumerate

    games = enumerate_ttt()
    oracle = oracle_enumerate()
    assert len(games) == len(oracle)
    assert [g.board for g in games] == oracle
    by_board = {g.board: g.class_name for g in games}
    perms = make_d4_rep().data_permutations()
    for g in games:
        for perm in perms:
            image = tuple(int(v) for v in apply_board_permutation(g.board, perm))
            assert by_board[image] == g.class_name
    scen = enumerate_driving()
    ones = [s for s in scen if s.difficulty == 1.0]
    assert len(ones) == 4
    assert all(s.family == "x_center" for s in ones)
    _announce("dataset integrity (dual enumeration, closure, 4 crossings)")
