"""Symmetry-equivariant variational quantum circuits on a statevector simulator."""

from .paulis import PauliString, PauliSum, dense_matrix, pauli_mul
from .sim import (
    Circuit,
    Gate,
    StateVector,
    apply_gate,
    expectation,
    gradient_adjoint,
    run_circuit,
    value_and_gradient,
)
from .symmetry import (
    CliffordElement,
    DenseElement,
    HaarTwirlSpec,
    SymmetryRep,
    check_commutes,
    make_d4_rep,
    make_klein_rep,
    make_parity_rep,
    make_z4_rep,
    symmetrize_gateset,
    twirl_finite,
    twirl_haar_local,
)
from .embeddings import EmbeddingSpec, encode, verify_equivariance
from .datasets import (
    DrivingScenario,
    SplitSpec,
    TTTGame,
    balanced_split,
    enumerate_driving,
    enumerate_ttt,
    label_board,
)
from .models import (
    ReuploadModel,
    build_driving_model,
    build_ttt_model,
    check_model_invariance,
    predict,
    random_layout,
)
from .training import TrainConfig, TrainData, l2_loss, train
from .vqe import (
    AnsatzSpec,
    Hamiltonian,
    VqeResult,
    barren_variance,
    build_ansatz,
    build_hamiltonian,
    exact_ground_energy,
    minimize_energy,
)

__version__ = "0.1.0"
