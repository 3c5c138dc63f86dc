"""Maximum-likelihood training of a Born machine."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .ansatz import LayeredAnsatz, born_distribution_batch, check_params
from .datasets import Dataset
from .gradients import prob_jacobian
from .optim import make_optimizer
from .sampling import make_rng


class NumericalError(ArithmeticError):
    """Training produced a non-finite loss or gradient."""


@dataclass
class TrainConfig:
    optimizer: str = "adam"
    learning_rate: float = 0.05
    iterations: int = 200
    batch_size: int = 32
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    init_scale: float = 0.1
    epsilon_clip: float = 1e-12

    def validate(self) -> None:
        make_optimizer(self.optimizer, 1.0)
        for name in ("learning_rate", "iterations", "batch_size", "adam_epsilon", "epsilon_clip"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("adam betas must lie in [0, 1)")
        if self.init_scale < 0:
            raise ValueError("init_scale must be >= 0")


@dataclass
class TrainRecord:
    iteration: int
    loss: float
    grad_norm: float
    clip_count: int
    time_ms: float


@dataclass
class TrainHistory:
    records: list[TrainRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def losses(self) -> np.ndarray:
        return np.array([r.loss for r in self.records])


def _nll_from_probs(probs: np.ndarray, data: Dataset, epsilon_clip: float) -> float:
    counts = data.counts()
    m = counts > 0
    return float(-(counts[m] @ np.log(np.maximum(probs[m], epsilon_clip))) / len(data))


def _check_data(ansatz: LayeredAnsatz, data: Dataset) -> None:
    if data.n_bits != ansatz.n_qubits:
        raise ValueError(f"dataset has {data.n_bits} bits, circuit has {ansatz.n_qubits} qubits")


def nll(ansatz: LayeredAnsatz, params, data: Dataset, epsilon_clip: float = 1e-12) -> float:
    """Mean negative log-likelihood with probabilities floored at ``epsilon_clip``."""
    _check_data(ansatz, data)
    probs = born_distribution_batch(ansatz, params)[0, 0]
    return _nll_from_probs(probs, data, epsilon_clip)


def nll_grad(ansatz: LayeredAnsatz, params, batch: Dataset, epsilon_clip: float = 1e-12) -> np.ndarray:
    """Mean of -grad p(x_i) / max(p(x_i), eps) over the batch."""
    _check_data(ansatz, batch)
    probs = born_distribution_batch(ansatz, params)[0, 0]
    jac = prob_jacobian(ansatz, params)[:, 0, :]
    weights = batch.counts() / (len(batch) * np.maximum(probs, epsilon_clip))
    return -(jac @ weights)


def init_params(n: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(0.0, scale, size=n)


def train_mle(ansatz: LayeredAnsatz, data: Dataset, config: TrainConfig, params=None):
    """Minimize the NLL with minibatches drawn (with replacement) from ``data``.

    ``loss`` in the history is the full-dataset NLL before each step; the
    gradient uses the minibatch. Returns ``(params, history)``.
    """
    config.validate()
    _check_data(ansatz, data)
    rng = make_rng(config.seed)
    if params is None:
        params = init_params(ansatz.parameter_count, config.init_scale, rng)
    params = check_params(ansatz, params).copy()
    opt = make_optimizer(config.optimizer, config.learning_rate, config.beta1, config.beta2, config.adam_epsilon)
    history = TrainHistory()
    for it in range(config.iterations):
        t0 = time.perf_counter()
        batch = Dataset(data.n_bits, data.samples[rng.integers(0, len(data), config.batch_size)])
        probs = born_distribution_batch(ansatz, params)[0, 0]
        loss = _nll_from_probs(probs, data, config.epsilon_clip)
        jac = prob_jacobian(ansatz, params)[:, 0, :]
        bcounts = batch.counts()
        weights = bcounts / (len(batch) * np.maximum(probs, config.epsilon_clip))
        grad = -(jac @ weights)
        if not (np.isfinite(loss) and np.all(np.isfinite(grad))):
            raise NumericalError(f"non-finite loss or gradient at iteration {it}")
        clip_count = int(bcounts[probs < config.epsilon_clip].sum())
        params = opt.step(params, grad)
        if not np.all(np.isfinite(params)):
            raise NumericalError(f"parameters became non-finite at iteration {it}")
        history.records.append(
            TrainRecord(it, loss, float(np.linalg.norm(grad)), clip_count, 1e3 * (time.perf_counter() - t0))
        )
    return params, history
