"""Parameter-shift gradients of Born probabilities and diagonal expectations.

Single-qubit RY angles have a Pauli generator (spectrum +-1/2), so the
two-evaluation rule ``[E(t + pi/2) - E(t - pi/2)] / 2`` is exact for them.
The controlled-rotation angles have generator ``|1><1| (x) sigma / 2`` with
spectrum {0, +-1/2}; frequencies 1/2 and 1 both appear and the two-point
rule is biased whenever later gates mix the control subspaces. Those
parameters use the exact four-term rule

    dE = d+ [E(t + pi/2) - E(t - pi/2)] - d- [E(t + 3pi/2) - E(t - 3pi/2)],
    d+- = (sqrt(2) +- 1) / (4 sqrt(2)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import (
    CTRL_Y,
    CTRL_Z,
    ROT_Y,
    LayeredAnsatz,
    born_distribution_batch,
    check_params,
    evaluate_shifted,
)

_DP = (np.sqrt(2) + 1) / (4 * np.sqrt(2))
_DM = (np.sqrt(2) - 1) / (4 * np.sqrt(2))

SHIFT_RULES = {
    ROT_Y: ((np.pi / 2, 0.5), (-np.pi / 2, -0.5)),
    CTRL_Y: ((np.pi / 2, _DP), (-np.pi / 2, -_DP), (3 * np.pi / 2, -_DM), (-3 * np.pi / 2, _DM)),
}
SHIFT_RULES[CTRL_Z] = SHIFT_RULES[CTRL_Y]

# shifted circuits simulated per batch; bounds peak memory at large n
CHUNK = 256


@dataclass(frozen=True, eq=False)
class DiagonalObservable:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2 or v.size & (v.size - 1):
            raise ValueError(f"observable must have 2**n entries, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("observable entries must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_bits(self) -> int:
        return self.values.size.bit_length() - 1

    @classmethod
    def projector(cls, index: int, n_bits: int) -> "DiagonalObservable":
        v = np.zeros(2**n_bits)
        v[index] = 1.0
        return cls(v)


def _obs_values(ansatz: LayeredAnsatz, obs) -> np.ndarray:
    v = obs.values if isinstance(obs, DiagonalObservable) else np.asarray(obs, dtype=float)
    if v.shape != (2**ansatz.n_qubits,):
        raise ValueError(f"observable has shape {v.shape}, circuit has {2**ansatz.n_qubits} outcomes")
    return v


def expectation(ansatz: LayeredAnsatz, params, obs) -> float:
    v = _obs_values(ansatz, obs)
    return float(born_distribution_batch(ansatz, params)[0, 0] @ v)


def shift_terms(ansatz: LayeredAnsatz, index: int):
    kinds = ansatz.param_kinds()
    if not 0 <= index < len(kinds):
        raise IndexError(f"parameter index {index} out of range [0, {len(kinds)})")
    return SHIFT_RULES[kinds[index]]


def prob_jacobian(ansatz: LayeredAnsatz, params, initial=None, indices=None) -> np.ndarray:
    """d p(x) / d params[k] for every outcome, by parameter shift.

    Returns shape (K, S, 2**n) where K = len(indices) (default: all
    parameters) and S is the number of input states.
    """
    p = check_params(ansatz, params)
    if indices is None:
        indices = range(ansatz.parameter_count)
    indices = list(indices)
    shifts, owner, coef = [], [], []
    for slot, k in enumerate(indices):
        for delta, c in shift_terms(ansatz, k):
            shifts.append((k, delta))
            owner.append(slot)
            coef.append(c)
    n_inputs = 1 if initial is None else np.atleast_2d(initial).shape[0]
    jac = np.zeros((len(indices), n_inputs, 2**ansatz.n_qubits))
    owner = np.array(owner, dtype=int)
    coef = np.array(coef)
    for start in range(0, len(shifts), CHUNK):
        sl = slice(start, start + CHUNK)
        probs = np.abs(evaluate_shifted(ansatz, p, shifts[sl], initial)) ** 2
        # np.add.at keeps accumulation order fixed (deterministic sums)
        np.add.at(jac, owner[sl], coef[sl, None, None] * probs)
    return jac


def parameter_shift_grad(ansatz: LayeredAnsatz, params, obs, index: int) -> float:
    v = _obs_values(ansatz, obs)
    return float(prob_jacobian(ansatz, params, indices=[index])[0, 0] @ v)


def finite_difference_grad(ansatz: LayeredAnsatz, params, obs, index: int, h: float = 1e-5) -> float:
    if h <= 0:
        raise ValueError("h must be positive")
    p = check_params(ansatz, params)
    if not 0 <= index < p.size:
        raise IndexError(f"parameter index {index} out of range")
    v = _obs_values(ansatz, obs)
    rows = np.array([p, p])
    rows[0, index] += h
    rows[1, index] -= h
    e_plus, e_minus = born_distribution_batch(ansatz, rows)[:, 0] @ v
    return float((e_plus - e_minus) / (2 * h))


def grad_vector(ansatz: LayeredAnsatz, params, obs) -> np.ndarray:
    v = _obs_values(ansatz, obs)
    return prob_jacobian(ansatz, params)[:, 0, :] @ v


def finite_difference_vector(ansatz: LayeredAnsatz, params, obs, h: float = 1e-5) -> np.ndarray:
    return np.array(
        [finite_difference_grad(ansatz, params, obs, k, h) for k in range(ansatz.parameter_count)]
    )
