"""Losses, optimizers, training loops and accuracy metrics.

Two protocols are supported: epoch-based minibatch Adam for the board
classifier (accuracy recorded at epoch end) and full-batch limited-memory
quasi-Newton for the driving regressor (accuracy recorded after every
step). Both are fully seeded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .models import ReuploadModel, hard_prediction


class TrainingDiverged(RuntimeError):
    def __init__(self, step: int):
        super().__init__(f"non-finite loss at step {step}")
        self.step = step


@dataclass
class TrainConfig:
    epochs: int = 100
    steps_per_epoch: int = 30
    batch_size: int = 15
    learning_rate: float = 0.01
    seed: int = 0
    optimizer: str = "adam"  # "adam" | "lbfgs"
    lbfgs_steps: int = 30
    lbfgs_history: int = 10
    lbfgs_gtol: float = 1e-8

    def __post_init__(self):
        if min(self.epochs, self.steps_per_epoch, self.batch_size) < 1:
            raise ValueError("epochs, steps and batch size must be positive")
        if self.optimizer not in ("adam", "lbfgs"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class TrainData:
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray


@dataclass
class TrainResult:
    metrics: list[dict] = field(default_factory=list)
    final_params: np.ndarray | None = None
    initial_params: np.ndarray | None = None
    config: TrainConfig | None = None

    def final(self, key: str) -> float:
        return self.metrics[-1][key]

    def series(self, key: str) -> list[float]:
        return [row[key] for row in self.metrics]


def l2_loss(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Mean over the batch of the squared error per sample.

    Vector targets use the squared 2-norm of the residual; scalar targets
    the plain square.
    """
    predictions = np.asarray(predictions, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if predictions.shape != targets.shape:
        raise ValueError(f"shape mismatch {predictions.shape} vs {targets.shape}")
    residual = predictions - targets
    if residual.ndim == 1:
        return float(np.mean(residual**2))
    return float(np.mean(np.sum(residual**2, axis=1)))


def init_params(model: ReuploadModel, seed: int) -> np.ndarray:
    """Uniform[0, 2pi) initialization."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2 * np.pi, model.param_count)


def _hit(model: ReuploadModel, soft: np.ndarray, y) -> bool:
    pred = hard_prediction(model, soft)
    if model.task == "ttt":
        return pred == int(np.argmax(y))
    return abs(pred - float(np.ravel(y)[0])) < 1e-9


def accuracy(model: ReuploadModel, params: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> float:
    hits = sum(
        _hit(model, model.predict(params, x), y)
        for x, y in zip(xs, np.atleast_2d(ys.T).T)
    )
    return hits / len(xs)


def evaluate(model: ReuploadModel, params: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> tuple[float, float]:
    """(loss, accuracy) over a full set."""
    preds = np.stack([model.predict(params, x) for x in xs])
    if model.task == "driving":
        loss = l2_loss(preds[:, 0], ys)
    else:
        loss = l2_loss(preds, ys)
    hits = sum(
        _hit(model, soft, y) for soft, y in zip(preds, np.atleast_2d(ys.T).T)
    )
    return loss, hits / len(xs)


class Adam:
    """Adaptive-moment gradient descent with the standard defaults."""

    def __init__(self, lr: float = 0.01, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = None
        self.v = None
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        mhat = self.m / (1 - self.beta1**self.t)
        vhat = self.v / (1 - self.beta2**self.t)
        return params - self.lr * mhat / (np.sqrt(vhat) + self.eps)


def train(model: ReuploadModel, data: TrainData, config: TrainConfig) -> TrainResult:
    """Run the task's training protocol and record per-epoch/step metrics."""
    if len(data.train_x) == 0:
        raise ValueError("empty dataset")
    if config.optimizer == "adam":
        return _train_adam(model, data, config)
    return _train_lbfgs(model, data, config)


def _train_adam(model: ReuploadModel, data: TrainData, config: TrainConfig) -> TrainResult:
    rng = np.random.default_rng(config.seed)
    params = init_params(model, config.seed)
    result = TrainResult(initial_params=params.copy(), config=config)
    opt = Adam(lr=config.learning_rate)
    n_train = len(data.train_x)
    order = np.arange(n_train)
    step_counter = 0
    for epoch in range(config.epochs):
        rng.shuffle(order)
        cursor = 0
        for _ in range(config.steps_per_epoch):
            if cursor + config.batch_size > n_train:
                cursor = 0
            batch = order[cursor : cursor + config.batch_size]
            cursor += config.batch_size
            loss, grad = model.loss_and_grad(params, data.train_x[batch], data.train_y[batch])
            if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
                raise TrainingDiverged(step_counter)
            params = opt.step(params, grad)
            step_counter += 1
        train_loss, train_acc = evaluate(model, params, data.train_x, data.train_y)
        test_loss, test_acc = evaluate(model, params, data.test_x, data.test_y)
        result.metrics.append(
            {
                "epoch": epoch,
                "train_loss": train_loss,
                "train_acc": train_acc,
                "test_loss": test_loss,
                "test_acc": test_acc,
            }
        )
    result.final_params = params
    return result


def _train_lbfgs(model: ReuploadModel, data: TrainData, config: TrainConfig) -> TrainResult:
    params0 = init_params(model, config.seed)
    result = TrainResult(initial_params=params0.copy(), config=config)
    state = {"step": 0}

    def objective(theta):
        loss, grad = model.loss_and_grad(theta, data.train_x, data.train_y)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise TrainingDiverged(state["step"])
        return loss, grad

    def callback(theta):
        state["step"] += 1
        train_loss, train_acc = evaluate(model, theta, data.train_x, data.train_y)
        test_loss, test_acc = evaluate(model, theta, data.test_x, data.test_y)
        result.metrics.append(
            {
                "step": state["step"],
                "train_loss": train_loss,
                "train_acc": train_acc,
                "test_loss": test_loss,
                "test_acc": test_acc,
            }
        )

    res = minimize(
        objective,
        params0,
        jac=True,
        method="L-BFGS-B",
        callback=callback,
        options={
            "maxiter": config.lbfgs_steps,
            "maxcor": config.lbfgs_history,
            "gtol": config.lbfgs_gtol,
            "ftol": 0.0,
        },
    )
    if not result.metrics:
        callback(res.x)  # converged instantly; still record one row
    result.final_params = np.asarray(res.x)
    return result


def gradient_check(
    model: ReuploadModel,
    params: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    step: float = 1e-5,
) -> float:
    """Max componentwise deviation of the exact gradient from central
    finite differences, scaled by max(1, |fd|) so flat directions stay
    well-posed."""
    _, grad = model.loss_and_grad(params, xs, ys)
    fd = np.zeros_like(grad)
    for k in range(len(params)):
        up, dn = params.copy(), params.copy()
        up[k] += step
        dn[k] -= step
        fd[k] = (
            model.loss_and_grad(up, xs, ys)[0] - model.loss_and_grad(dn, xs, ys)[0]
        ) / (2 * step)
    return float(np.max(np.abs(grad - fd) / np.maximum(1.0, np.abs(fd))))
