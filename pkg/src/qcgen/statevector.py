"""Dense statevector simulation.

Bit-order convention (fixed project-wide): qubit 0 is the most significant
bit of the outcome index, so basis index ``i`` of an n-qubit register has
qubit ``q`` set iff ``(i >> (n - 1 - q)) & 1``.

Gate kernels work on batched amplitude arrays of shape ``(B, S, 2**n)``:
``B`` indexes parameter settings (each batch row may carry its own gate
matrix) and ``S`` indexes input states that share the same circuit. A single
state is the ``B = S = 1`` case. Updates are done in place over pair/quad
strides, never by forming a ``2**n x 2**n`` matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_QUBITS = 24


class SizeError(ValueError):
    """Register size outside the supported range."""


def _check_n(n_qubits: int) -> None:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise SizeError(f"n_qubits must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}")


@dataclass(frozen=True)
class BitString:
    """Computational basis label, qubit 0 first (most significant)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be a nonempty sequence of 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_str(cls, s: str) -> "BitString":
        return cls(tuple(int(c) for c in s.strip()))

    @classmethod
    def from_index(cls, index: int, n_bits: int) -> "BitString":
        if not 0 <= index < 2**n_bits:
            raise ValueError(f"index {index} out of range for {n_bits} bits")
        return cls(tuple((index >> (n_bits - 1 - k)) & 1 for k in range(n_bits)))

    @property
    def n_bits(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        n = len(self.bits)
        return sum(b << (n - 1 - k) for k, b in enumerate(self.bits))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def as_bitstring(x, n_bits: int | None = None) -> BitString:
    """Coerce a BitString, '0101' string, bit sequence or (with n_bits) an index."""
    if isinstance(x, BitString):
        bs = x
    elif isinstance(x, (int, np.integer)):
        if n_bits is None:
            raise ValueError("an integer outcome needs n_bits")
        return BitString.from_index(int(x), n_bits)
    elif isinstance(x, str):
        bs = BitString.from_str(x)
    else:
        bs = BitString(tuple(x))
    if n_bits is not None and bs.n_bits != n_bits:
        raise ValueError(f"expected {n_bits} bits, got {bs.n_bits} ({bs})")
    return bs


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        _check_n(self.n_qubits)
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise SizeError(
                f"expected {2**self.n_qubits} amplitudes for {self.n_qubits} qubits, got shape {amps.shape}"
            )
        self.amplitudes = amps

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def kron(self, other: "StateVector") -> "StateVector":
        """Tensor product with ``self`` on the more significant qubits."""
        return StateVector(self.n_qubits + other.n_qubits, np.kron(self.amplitudes, other.amplitudes))


def zero_state(n_qubits: int) -> StateVector:
    _check_n(n_qubits)
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def plus_state(n_qubits: int) -> StateVector:
    _check_n(n_qubits)
    return StateVector(n_qubits, np.full(2**n_qubits, 2.0 ** (-n_qubits / 2), dtype=np.complex128))


def basis_state(x) -> StateVector:
    bs = as_bitstring(x)
    _check_n(bs.n_bits)
    amps = np.zeros(2**bs.n_bits, dtype=np.complex128)
    amps[bs.index] = 1.0
    return StateVector(bs.n_bits, amps)


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise IndexError(f"qubit index {q} out of range for {n} qubits")


def _coeffs(gates: np.ndarray, dim: int) -> np.ndarray:
    g = np.asarray(gates, dtype=np.complex128)
    if g.shape[-2:] != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} gate, got shape {g.shape}")
    return g.reshape(-1, dim, dim)


def apply_1q_batch(psi: np.ndarray, gates: np.ndarray, qubit: int, n_qubits: int) -> None:
    """Apply a 1-qubit gate in place to ``psi`` of shape (B, S, 2**n).

    ``gates`` is (2, 2) or (B, 2, 2).
    """
    _check_qubit(qubit, n_qubits)
    g = _coeffs(gates, 2)
    b, s, _ = psi.shape
    inner = 2 ** (n_qubits - qubit - 1)
    if inner >= 8:
        # long contiguous runs: a batched 2x2 matmul beats strided copies
        v = psi.reshape(b, s * 2**qubit, 2, inner)
        if not np.shares_memory(v, psi):
            raise ValueError("psi must be C-contiguous")
        v[...] = np.matmul(g[:, None], v)
        return
    v = psi.reshape(b, s, 2**qubit, 2, inner)
    if not np.shares_memory(v, psi):
        raise ValueError("psi must be C-contiguous")
    c = g.reshape(-1, 2, 2, 1, 1, 1)
    a0 = v[:, :, :, 0, :].copy()
    a1 = v[:, :, :, 1, :].copy()
    v[:, :, :, 0, :] = c[:, 0, 0] * a0 + c[:, 0, 1] * a1
    v[:, :, :, 1, :] = c[:, 1, 0] * a0 + c[:, 1, 1] * a1


def apply_2q_batch(psi: np.ndarray, gates: np.ndarray, control: int, target: int, n_qubits: int) -> None:
    """Apply a 2-qubit gate in place; matrix rows/cols ordered |control, target>."""
    _check_qubit(control, n_qubits)
    _check_qubit(target, n_qubits)
    if control == target:
        raise ValueError("control and target must differ")
    g = _coeffs(gates, 4)
    b, s, _ = psi.shape
    v = psi.reshape((b, s) + (2,) * n_qubits)
    if not np.shares_memory(v, psi):
        raise ValueError("psi must be C-contiguous")
    c = g.reshape((-1, 4, 4, 1) + (1,) * (n_qubits - 2))

    def index(k):
        sl = [slice(None)] * (n_qubits + 2)
        sl[2 + control] = k >> 1
        sl[2 + target] = k & 1
        return tuple(sl)

    nonzero = np.any(g != 0, axis=0)
    identity_row = [
        bool(np.all(g[:, i, i] == 1) and np.count_nonzero(nonzero[i]) == 1) for i in range(4)
    ]
    needed = {j for i in range(4) if not identity_row[i] for j in range(4) if nonzero[i, j]}
    blocks = {j: v[index(j)].copy() for j in needed}
    for i in range(4):
        if identity_row[i]:
            continue
        out = 0
        for j in range(4):
            if nonzero[i, j]:
                out = out + c[:, i, j] * blocks[j]
        v[index(i)] = out


def apply_1q(state: StateVector, gate: np.ndarray, qubit: int) -> StateVector:
    """Apply ``gate`` to ``qubit``; mutates and returns ``state``."""
    apply_1q_batch(state.amplitudes.reshape(1, 1, -1), gate, qubit, state.n_qubits)
    return state


def apply_2q(state: StateVector, gate: np.ndarray, control: int, target: int) -> StateVector:
    """Apply a 4x4 ``gate`` on (control, target); mutates and returns ``state``."""
    apply_2q_batch(state.amplitudes.reshape(1, 1, -1), gate, control, target, state.n_qubits)
    return state


def probabilities(state: StateVector):
    """Born distribution ``|<x|psi>|^2`` over all outcomes."""
    from .sampling import Distribution

    return Distribution(np.abs(state.amplitudes) ** 2)


def bit_of(indices: np.ndarray | int, qubit: int, n_qubits: int):
    """Value of ``qubit`` in each basis index (MSB-first convention)."""
    return (np.asarray(indices) >> (n_qubits - 1 - qubit)) & 1


def equal_up_to_phase(a: Sequence[complex] | StateVector, b: Sequence[complex] | StateVector, atol: float = 1e-10) -> bool:
    a = a.amplitudes if isinstance(a, StateVector) else np.asarray(a, dtype=complex)
    b = b.amplitudes if isinstance(b, StateVector) else np.asarray(b, dtype=complex)
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < atol:
        return bool(np.allclose(a, b, atol=atol))
    phase = a[k] / b[k]
    if abs(abs(phase) - 1) > atol:
        return False
    return bool(np.allclose(a, phase * b, atol=atol))
