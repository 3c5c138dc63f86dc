"""Target distributions, datasets and divergences between distributions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .sampling import Distribution, SampleSet, make_rng, sample_indices
from .statevector import MAX_QUBITS, BitString, SizeError, as_bitstring

KL_FLOOR = 1e-12


def _check_bits(n_bits: int) -> None:
    if not 1 <= n_bits <= MAX_QUBITS:
        raise SizeError(f"n_bits must be in [1, {MAX_QUBITS}], got {n_bits}")


def uniform_target(n_bits: int) -> Distribution:
    _check_bits(n_bits)
    return Distribution(np.full(2**n_bits, 2.0**-n_bits))


def gaussian_target(n_bits: int, mean: float | None = None, std: float | None = None) -> Distribution:
    """Discretized Gaussian over bin indices 0 .. 2**n - 1.

    Defaults: mean at the centre, (2**n - 1) / 2, and std 2**n / 6.
    """
    _check_bits(n_bits)
    size = 2**n_bits
    mean = (size - 1) / 2 if mean is None else float(mean)
    std = size / 6 if std is None else float(std)
    if not std > 0:
        raise ValueError(f"std must be positive, got {std}")
    i = np.arange(size)
    w = np.exp(-((i - mean) ** 2) / (2 * std**2))
    return Distribution(w / w.sum())


def bars_and_stripes_patterns(rows: int, cols: int) -> list[int]:
    """Outcome indices of all bar/stripe images, pixels flattened row-major.

    Constant images are both a bar and a stripe pattern; each is kept once.
    """
    patterns = set()
    for row_bits in itertools.product((0, 1), repeat=rows):
        img = np.repeat(np.array(row_bits)[:, None], cols, axis=1)
        patterns.add(BitString(tuple(img.ravel())).index)
    for col_bits in itertools.product((0, 1), repeat=cols):
        img = np.repeat(np.array(col_bits)[None, :], rows, axis=0)
        patterns.add(BitString(tuple(img.ravel())).index)
    return sorted(patterns)


def bars_and_stripes_target(rows: int, cols: int) -> Distribution:
    if rows < 1 or cols < 1:
        raise SizeError("rows and cols must be positive")
    _check_bits(rows * cols)
    support = bars_and_stripes_patterns(rows, cols)
    p = np.zeros(2 ** (rows * cols))
    p[support] = 1.0 / len(support)
    return Distribution(p)


@dataclass
class Dataset:
    """Training samples stored as outcome indices (repeats allowed)."""

    n_bits: int
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.int64).ravel()
        if s.size == 0:
            raise ValueError("dataset is empty")
        if s.min() < 0 or s.max() >= 2**self.n_bits:
            raise ValueError(f"sample index out of range for {self.n_bits} bits")
        self.samples = s

    @classmethod
    def from_bitstrings(cls, items) -> "Dataset":
        bs = [as_bitstring(x) for x in items]
        if not bs:
            raise ValueError("dataset is empty")
        n = bs[0].n_bits
        return cls(n, np.array([as_bitstring(b, n).index for b in bs]))

    def __len__(self):
        return self.samples.size

    def counts(self) -> np.ndarray:
        return np.bincount(self.samples, minlength=2**self.n_bits)

    def empirical(self) -> Distribution:
        return Distribution(self.counts() / len(self))


def dataset_from_distribution(dist: Distribution, n_samples: int, seed: int) -> Dataset:
    return Dataset(dist.n_bits, sample_indices(dist, n_samples, make_rng(seed)))


def _probs(x) -> np.ndarray:
    if isinstance(x, Distribution):
        return x.probs
    if isinstance(x, SampleSet):
        if x.total == 0:
            raise ValueError("empty sample set")
        return x.frequencies()
    if isinstance(x, Dataset):
        return x.counts() / len(x)
    return np.asarray(x, dtype=float)


def mean_std(x) -> tuple[float, float]:
    """Mean and population std of the outcome index."""
    p = _probs(x)
    if p.size == 0 or p.sum() <= 0:
        raise ValueError("empty distribution")
    p = p / p.sum()
    i = np.arange(p.size)
    mean = float(p @ i)
    var = float(p @ (i - mean) ** 2)
    return mean, float(np.sqrt(max(var, 0.0)))


def _pair(p, q):
    p, q = _probs(p), _probs(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return p, q


def kl(p, q) -> float:
    """KL(p || q) in nats; q is floored at 1e-12 where p > 0."""
    p, q = _pair(p, q)
    m = p > 0
    return float(np.sum(p[m] * (np.log(p[m]) - np.log(np.maximum(q[m], KL_FLOOR)))))


def js(p, q) -> float:
    """Jensen-Shannon divergence in bits, within [0, 1]."""
    p, q = _pair(p, q)
    m = 0.5 * (p + q)

    def _kl2(a):
        s = a > 0
        return np.sum(a[s] * np.log2(a[s] / m[s]))

    return float(min(max(0.5 * _kl2(p) + 0.5 * _kl2(q), 0.0), 1.0))


def tv(p, q) -> float:
    p, q = _pair(p, q)
    return float(0.5 * np.abs(p - q).sum())
