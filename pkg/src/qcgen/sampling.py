"""Born-rule probabilities and measurement sampling.

All randomness goes through :func:`make_rng`, a NumPy ``Generator`` backed by
the PCG64 bit generator seeded with a 64-bit integer. Independent worker
streams are derived with ``SeedSequence(seed).spawn(k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import LayeredAnsatz, evaluate
from .statevector import BitString, as_bitstring

NORM_TOL = 1e-9


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def spawn_rngs(seed: int, k: int) -> list[np.random.Generator]:
    """Per-worker generators split from a master seed."""
    children = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF).spawn(k)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over the 2**n_bits outcomes (MSB-first indices)."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size < 2 or p.size & (p.size - 1):
            raise ValueError(f"probs must be a vector of length 2**n, got shape {p.shape}")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(p.sum() - 1) > NORM_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def n_bits(self) -> int:
        return self.probs.size.bit_length() - 1

    def __len__(self):
        return self.probs.size

    def __getitem__(self, x):
        if isinstance(x, (int, np.integer)):
            return float(self.probs[x])
        return float(self.probs[as_bitstring(x, self.n_bits).index])

    @classmethod
    def point_mass(cls, index: int, n_bits: int) -> "Distribution":
        p = np.zeros(2**n_bits)
        p[index] = 1.0
        return cls(p)


@dataclass
class SampleSet:
    n_bits: int
    counts: dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def frequencies(self) -> np.ndarray:
        f = np.zeros(2**self.n_bits)
        for k, c in self.counts.items():
            f[k] = c
        return f / max(self.total, 1)

    def to_distribution(self) -> Distribution:
        return Distribution(self.frequencies())

    def rows(self) -> list[tuple[str, int]]:
        return [(str(BitString.from_index(k, self.n_bits)), self.counts[k]) for k in sorted(self.counts)]


def born_probability(ansatz: LayeredAnsatz, params, x) -> float:
    bs = as_bitstring(x, ansatz.n_qubits)
    amp = evaluate(ansatz, params).amplitudes[bs.index]
    return float(abs(amp) ** 2)


def sample_indices(dist: Distribution, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of outcome indices."""
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    cdf = np.cumsum(dist.probs)
    cdf /= cdf[-1]
    u = rng.random(n_samples)
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, cdf.size - 1)


def sample(dist: Distribution, n_samples: int, seed: int) -> SampleSet:
    idx = sample_indices(dist, n_samples, make_rng(seed))
    values, counts = np.unique(idx, return_counts=True)
    return SampleSet(dist.n_bits, {int(v): int(c) for v, c in zip(values, counts)})
