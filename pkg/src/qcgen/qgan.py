"""Quantum GAN: layered-circuit generator and discriminator.

The discriminator acts on ``n_data`` data qubits, which receive the candidate
sample as a basis state, plus ``n_readout`` ancillas starting in |0>. Its
output D(x) is the probability of measuring the first ancilla (qubit
``n_data``) as 1, read as P(real). Both losses are computed as exact
expectations over all 2**n_data outcomes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import LayeredAnsatz, born_distribution_batch, build_ansatz, check_params
from .datasets import js, kl, tv
from .gradients import prob_jacobian
from .mle import NumericalError, init_params
from .optim import make_optimizer
from .sampling import Distribution, SampleSet, make_rng, sample, sample_indices
from .statevector import as_bitstring, bit_of


@dataclass(frozen=True)
class GeneratorSpec:
    ansatz: LayeredAnsatz

    @property
    def n_data(self) -> int:
        return self.ansatz.n_qubits


@dataclass(frozen=True)
class DiscriminatorSpec:
    n_data: int
    n_readout: int
    ansatz: LayeredAnsatz

    def __post_init__(self):
        if self.n_data < 1 or self.n_readout < 1:
            raise ValueError("discriminator needs >= 1 data and >= 1 readout qubit")
        if self.ansatz.n_qubits != self.n_data + self.n_readout:
            raise ValueError("discriminator ansatz must span data + readout qubits")

    @property
    def readout_qubit(self) -> int:
        return self.n_data

    def input_states(self) -> np.ndarray:
        """Row x holds |x> (x) |0...0>."""
        states = np.zeros((2**self.n_data, 2**self.ansatz.n_qubits), dtype=np.complex128)
        states[np.arange(2**self.n_data), np.arange(2**self.n_data) << self.n_readout] = 1.0
        return states

    def readout_mask(self) -> np.ndarray:
        idx = np.arange(2**self.ansatz.n_qubits)
        return bit_of(idx, self.readout_qubit, self.ansatz.n_qubits).astype(bool)


def make_generator(n_data: int, n_layers: int, input_kind: str = "zero") -> GeneratorSpec:
    return GeneratorSpec(build_ansatz(n_data, n_layers, input_kind))


def fan_in_pairs(n_data: int, n_readout: int) -> tuple[tuple[int, int], ...]:
    """Discriminator entanglers: data chain, every data qubit -> first readout, readout chain.

    A plain nearest-neighbour chain couples only the last data qubit to the
    readout, which leaves D(x) close to a parity function of x.
    """
    first = n_data
    pairs = [(q, q + 1) for q in range(n_data - 1)]
    pairs += [(q, first) for q in range(n_data)]
    pairs += [(a, a + 1) for a in range(first, n_data + n_readout - 1)]
    return tuple(pairs)


def make_discriminator(n_data: int, n_readout: int, n_layers: int) -> DiscriminatorSpec:
    ansatz = LayeredAnsatz(n_data + n_readout, n_layers, "zero", fan_in_pairs(n_data, n_readout))
    return DiscriminatorSpec(n_data, n_readout, ansatz)


@dataclass
class QganConfig:
    iterations: int = 500
    batch_size: int = 10
    # a slower generator and several discriminator steps keep the
    # adversarial game from oscillating; beta1 = 0.5 damps it further
    lr_gen: float = 0.01
    lr_disc: float = 0.05
    disc_steps_per_gen_step: int = 2
    seed: int = 0
    eval_interval: int = 10
    optimizer: str = "adam"
    beta1: float = 0.5
    beta2: float = 0.999
    init_scale: float = 0.1
    epsilon_clip: float = 1e-12
    # when set, the real-data term uses batch_size fresh target samples per step
    sampled_mode: bool = False

    def validate(self) -> None:
        for name in ("iterations", "batch_size", "lr_gen", "lr_disc", "disc_steps_per_gen_step",
                     "eval_interval", "epsilon_clip"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.init_scale < 0:
            raise ValueError("init_scale must be >= 0")
        make_optimizer(self.optimizer, 1.0)


@dataclass
class QganRecord:
    iteration: int
    d_loss: float
    g_loss: float
    js: float
    kl: float
    tv: float


@dataclass
class QganHistory:
    records: list[QganRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)


def generator_distribution(gen: GeneratorSpec, g_params) -> Distribution:
    p = born_distribution_batch(gen.ansatz, g_params)[0, 0]
    return Distribution(p)


def discriminator_outputs(disc: DiscriminatorSpec, d_params) -> np.ndarray:
    """D(x) for every x in index order."""
    probs = born_distribution_batch(disc.ansatz, d_params, disc.input_states())[0]
    return np.clip(probs[:, disc.readout_mask()].sum(axis=1), 0.0, 1.0)


def discriminator_output(disc: DiscriminatorSpec, d_params, x) -> float:
    bs = as_bitstring(x, disc.n_data)
    init = disc.input_states()[bs.index]
    probs = born_distribution_batch(disc.ansatz, d_params, init)[0, 0]
    return float(min(max(probs[disc.readout_mask()].sum(), 0.0), 1.0))


def discriminator_jacobian(disc: DiscriminatorSpec, d_params) -> np.ndarray:
    """dD(x)/d d_params[k], shape (P_d, 2**n_data)."""
    jac = prob_jacobian(disc.ansatz, d_params, disc.input_states())
    return jac[:, :, disc.readout_mask()].sum(axis=2)


def _target_probs(target, n_data: int) -> np.ndarray:
    p = target.probs if isinstance(target, Distribution) else np.asarray(target, dtype=float)
    if p.shape != (2**n_data,):
        raise ValueError(f"target has {p.size} outcomes, generator has {2**n_data}")
    return p


def _check_pair(gen: GeneratorSpec, disc: DiscriminatorSpec) -> None:
    if gen.n_data != disc.n_data:
        raise ValueError(f"generator has {gen.n_data} qubits, discriminator expects {disc.n_data}")


def _disc_loss(p_real, p_gen, d, eps) -> float:
    return float(-(p_real @ np.log(np.maximum(d, eps)) + p_gen @ np.log(np.maximum(1 - d, eps))))


def _gen_loss(p_gen, d, eps) -> float:
    return float(-(p_gen @ np.log(np.maximum(d, eps))))


def disc_loss(gen, g_params, disc, d_params, target, epsilon_clip: float = 1e-12) -> float:
    """-[E_target log D + E_gen log(1 - D)]."""
    _check_pair(gen, disc)
    p_real = _target_probs(target, disc.n_data)
    p_gen = generator_distribution(gen, g_params).probs
    return _disc_loss(p_real, p_gen, discriminator_outputs(disc, d_params), epsilon_clip)


def gen_loss(gen, g_params, disc, d_params, epsilon_clip: float = 1e-12) -> float:
    """Non-saturating generator loss -E_gen log D."""
    _check_pair(gen, disc)
    p_gen = generator_distribution(gen, g_params).probs
    return _gen_loss(p_gen, discriminator_outputs(disc, d_params), epsilon_clip)


def disc_loss_grad(gen, g_params, disc, d_params, target, epsilon_clip: float = 1e-12) -> np.ndarray:
    _check_pair(gen, disc)
    p_real = _target_probs(target, disc.n_data)
    p_gen = generator_distribution(gen, g_params).probs
    d = discriminator_outputs(disc, d_params)
    dl_dd = -p_real / np.maximum(d, epsilon_clip) + p_gen / np.maximum(1 - d, epsilon_clip)
    return discriminator_jacobian(disc, d_params) @ dl_dd


def gen_loss_observable(disc, d_params, epsilon_clip: float = 1e-12) -> np.ndarray:
    """Diagonal observable f(x) = -log D(x) whose generator expectation is gen_loss."""
    return -np.log(np.maximum(discriminator_outputs(disc, d_params), epsilon_clip))


def gen_loss_grad(gen, g_params, disc, d_params, epsilon_clip: float = 1e-12) -> np.ndarray:
    _check_pair(gen, disc)
    f = gen_loss_observable(disc, d_params, epsilon_clip)
    return prob_jacobian(gen.ansatz, g_params)[:, 0, :] @ f


def train_qgan(gen: GeneratorSpec, disc: DiscriminatorSpec, target, config: QganConfig,
               g_params=None, d_params=None):
    """Alternate discriminator and generator updates.

    Each iteration runs ``disc_steps_per_gen_step`` descent steps on the
    discriminator loss, then one on the generator loss. Metrics (js, kl as
    KL(target || generator), tv) are logged every ``eval_interval``
    iterations and at the last one. Returns ``(g_params, d_params, history)``.
    """
    config.validate()
    _check_pair(gen, disc)
    p_target = _target_probs(target, gen.n_data)
    rng = make_rng(config.seed)
    if g_params is None:
        g_params = init_params(gen.ansatz.parameter_count, config.init_scale, rng)
    if d_params is None:
        d_params = init_params(disc.ansatz.parameter_count, config.init_scale, rng)
    g_params = check_params(gen.ansatz, g_params).copy()
    d_params = check_params(disc.ansatz, d_params).copy()
    g_opt = make_optimizer(config.optimizer, config.lr_gen, config.beta1, config.beta2)
    d_opt = make_optimizer(config.optimizer, config.lr_disc, config.beta1, config.beta2)
    eps = config.epsilon_clip
    target_dist = Distribution(p_target)
    history = QganHistory()

    for it in range(config.iterations):
        p_gen = born_distribution_batch(gen.ansatz, g_params)[0, 0]
        for _ in range(config.disc_steps_per_gen_step):
            if config.sampled_mode:
                idx = sample_indices(target_dist, config.batch_size, rng)
                p_real = np.bincount(idx, minlength=p_target.size) / config.batch_size
            else:
                p_real = p_target
            d = discriminator_outputs(disc, d_params)
            dl_dd = -p_real / np.maximum(d, eps) + p_gen / np.maximum(1 - d, eps)
            d_grad = discriminator_jacobian(disc, d_params) @ dl_dd
            if not np.all(np.isfinite(d_grad)):
                raise NumericalError(f"non-finite discriminator gradient at iteration {it}")
            d_params = d_opt.step(d_params, d_grad)
            if not np.all(np.isfinite(d_params)):
                raise NumericalError(f"discriminator parameters became non-finite at iteration {it}")

        d = discriminator_outputs(disc, d_params)
        f = -np.log(np.maximum(d, eps))
        g_grad = prob_jacobian(gen.ansatz, g_params)[:, 0, :] @ f
        if not np.all(np.isfinite(g_grad)):
            raise NumericalError(f"non-finite generator gradient at iteration {it}")
        g_params = g_opt.step(g_params, g_grad)
        if not np.all(np.isfinite(g_params)):
            raise NumericalError(f"generator parameters became non-finite at iteration {it}")

        if it % config.eval_interval == 0 or it == config.iterations - 1:
            p_gen = born_distribution_batch(gen.ansatz, g_params)[0, 0]
            d = discriminator_outputs(disc, d_params)
            rec = QganRecord(
                it,
                _disc_loss(p_target, p_gen, d, eps),
                _gen_loss(p_gen, d, eps),
                js(p_gen, p_target),
                kl(p_target, p_gen),
                tv(p_gen, p_target),
            )
            if not all(np.isfinite([rec.d_loss, rec.g_loss])):
                raise NumericalError(f"non-finite loss at iteration {it}")
            history.records.append(rec)
    return g_params, d_params, history


def sample_generator(gen: GeneratorSpec, g_params, n_samples: int, seed: int) -> SampleSet:
    return sample(generator_distribution(gen, g_params), n_samples, seed)


def perturb_params(params, sigma: float, seed: int) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) noise to every parameter."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    p = np.asarray(params, dtype=float)
    if sigma == 0:
        return p.copy()
    return p + make_rng(seed).normal(0.0, sigma, size=p.shape)
