"""Layered parameterized circuit.

Each layer applies an RY to every qubit, then a controlled RY.RZ on each
entangler pair, by default the nearest-neighbour chain (q, q+1).
Flat parameter layout, per layer: ``n_qubits`` RY angles, then one
(controlled-RY, controlled-RZ) angle pair per entangler in order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gates
from .statevector import (
    MAX_QUBITS,
    SizeError,
    StateVector,
    apply_1q_batch,
    apply_2q_batch,
    plus_state,
    zero_state,
)

INPUT_KINDS = ("zero", "plus")

ROT_Y, CTRL_Y, CTRL_Z = "ry", "cry", "crz"


@dataclass(frozen=True)
class LayeredAnsatz:
    n_qubits: int
    n_layers: int
    input_kind: str = "zero"
    entangler_pairs: tuple[tuple[int, int], ...] = field(default=None)

    def __post_init__(self):
        if not isinstance(self.n_qubits, (int, np.integer)) or not 1 <= self.n_qubits <= MAX_QUBITS:
            raise SizeError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits!r}")
        if not isinstance(self.n_layers, (int, np.integer)) or self.n_layers < 1:
            raise SizeError(f"n_layers must be >= 1, got {self.n_layers!r}")
        if self.input_kind not in INPUT_KINDS:
            raise ValueError(f"input_kind must be one of {INPUT_KINDS}, got {self.input_kind!r}")
        pairs = self.entangler_pairs
        if pairs is None:
            pairs = tuple((q, q + 1) for q in range(self.n_qubits - 1))
        pairs = tuple((int(c), int(t)) for c, t in pairs)
        for c, t in pairs:
            if c == t or not (0 <= c < self.n_qubits and 0 <= t < self.n_qubits):
                raise ValueError(f"bad entangler pair {(c, t)} for {self.n_qubits} qubits")
        object.__setattr__(self, "entangler_pairs", pairs)

    @property
    def params_per_layer(self) -> int:
        return self.n_qubits + 2 * len(self.entangler_pairs)

    @property
    def parameter_count(self) -> int:
        return self.n_layers * self.params_per_layer

    def param_kinds(self) -> list[str]:
        layer = [ROT_Y] * self.n_qubits + [CTRL_Y, CTRL_Z] * len(self.entangler_pairs)
        return layer * self.n_layers

    def ry_index(self, layer: int, qubit: int) -> int:
        return layer * self.params_per_layer + qubit

    def input_state(self) -> StateVector:
        return zero_state(self.n_qubits) if self.input_kind == "zero" else plus_state(self.n_qubits)

    def descriptor(self) -> dict:
        """Config record; ``pairs`` appears only for a non-chain entangler layout."""
        d = {"n_qubits": self.n_qubits, "n_layers": self.n_layers, "input_kind": self.input_kind}
        if self.entangler_pairs != tuple((q, q + 1) for q in range(self.n_qubits - 1)):
            d["pairs"] = format_pairs(self.entangler_pairs)
        return d


def format_pairs(pairs) -> str:
    return ",".join(f"{c}-{t}" for c, t in pairs)


def parse_pairs(text: str) -> tuple[tuple[int, int], ...]:
    """'0-1,1-2' -> ((0, 1), (1, 2)); an empty string means no entanglers."""
    out = []
    for tok in filter(None, text.split(",")):
        c, sep, t = tok.partition("-")
        if not sep:
            raise ValueError(f"bad entangler pair {tok!r}")
        out.append((int(c), int(t)))
    return tuple(out)


def build_ansatz(n_qubits: int, n_layers: int, input_kind: str = "zero") -> LayeredAnsatz:
    return LayeredAnsatz(n_qubits, n_layers, input_kind)


def parameter_count(ansatz: LayeredAnsatz) -> int:
    return ansatz.parameter_count


def check_params(ansatz: LayeredAnsatz, params) -> np.ndarray:
    p = np.asarray(params, dtype=float)
    if p.shape[-1:] != (ansatz.parameter_count,):
        raise ValueError(
            f"expected {ansatz.parameter_count} parameters, got shape {p.shape}"
        )
    return p


def gate_ops(ansatz: LayeredAnsatz) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Gate sequence as (qubits, parameter indices); one entry per gate."""
    ops = []
    n, per = ansatz.n_qubits, ansatz.params_per_layer
    for layer in range(ansatz.n_layers):
        base = layer * per
        ops.extend(((q,), (base + q,)) for q in range(n))
        for k, pair in enumerate(ansatz.entangler_pairs):
            j = base + n + 2 * k
            ops.append((pair, (j, j + 1)))
    return ops


def _apply_op(psi, qubits, pidx, rows, n):
    if len(qubits) == 1:
        apply_1q_batch(psi, gates.ry(rows[:, pidx[0]]), qubits[0], n)
    else:
        apply_2q_batch(psi, gates.controlled_rot(rows[:, pidx[0]], rows[:, pidx[1]]), *qubits, n)


def _initial(ansatz: LayeredAnsatz, initial) -> np.ndarray:
    n = ansatz.n_qubits
    if initial is None:
        return ansatz.input_state().amplitudes[None, :]
    init = np.asarray(initial, dtype=np.complex128)
    if init.ndim == 1:
        init = init[None, :]
    if init.ndim != 2 or init.shape[-1] != 2**n:
        raise SizeError(f"initial states must have {2**n} amplitudes, got {init.shape}")
    return init


def evaluate_batch(ansatz: LayeredAnsatz, params, initial=None) -> np.ndarray:
    """Run the circuit for a batch of parameter vectors and input states.

    ``params`` has shape (B, P); ``initial`` is (S, 2**n) amplitudes, or None
    for the ansatz's own product input. Returns amplitudes of shape (B, S, 2**n).
    """
    p = check_params(ansatz, params)
    if p.ndim == 1:
        p = p[None, :]
    init = _initial(ansatz, initial)
    psi = np.empty((p.shape[0],) + init.shape, dtype=np.complex128)
    psi[...] = init
    for qubits, pidx in gate_ops(ansatz):
        _apply_op(psi, qubits, pidx, p, ansatz.n_qubits)
    return psi


def evaluate_shifted(ansatz: LayeredAnsatz, params, shifts, initial=None) -> np.ndarray:
    """Amplitudes for copies of ``params`` each with one entry shifted.

    ``shifts`` is a sequence of (parameter index, delta). Every shifted
    circuit shares the unshifted prefix up to its own gate, so rows join a
    growing batch only when their gate is reached. Returns (len(shifts), S, 2**n)
    in the order given.
    """
    p = check_params(ansatz, params)
    if p.ndim != 1:
        raise ValueError("evaluate_shifted takes a single parameter vector")
    init = _initial(ansatz, initial)
    ops = gate_ops(ansatz)
    op_of = np.empty(ansatz.parameter_count, dtype=int)
    for g, (_, pidx) in enumerate(ops):
        op_of[list(pidx)] = g
    shifts = list(shifts)
    k = np.array([s[0] for s in shifts], dtype=int)
    order = np.argsort(op_of[k], kind="stable")
    rows = np.tile(p, (len(shifts) + 1, 1))
    rows[1 + np.arange(len(shifts)), k[order]] += np.array([shifts[i][1] for i in order], dtype=float)
    joins = np.searchsorted(op_of[k[order]], np.arange(len(ops)), side="right") + 1

    psi = np.empty((len(shifts) + 1,) + init.shape, dtype=np.complex128)
    psi[0] = init
    active = 1
    for g, (qubits, pidx) in enumerate(ops):
        if joins[g] > active:
            psi[active:joins[g]] = psi[0]
            active = joins[g]
        _apply_op(psi[:active], qubits, pidx, rows[:active], ansatz.n_qubits)
    out = np.empty((len(shifts),) + init.shape, dtype=np.complex128)
    out[order] = psi[1:]
    return out


def evaluate(ansatz: LayeredAnsatz, params, initial: StateVector | None = None) -> StateVector:
    p = check_params(ansatz, params)
    if p.ndim != 1:
        raise ValueError("evaluate takes a single parameter vector; use evaluate_batch")
    init = None if initial is None else initial.amplitudes
    return StateVector(ansatz.n_qubits, evaluate_batch(ansatz, p, init)[0, 0])


def born_distribution_batch(ansatz: LayeredAnsatz, params, initial=None) -> np.ndarray:
    """Born probabilities, shape (B, S, 2**n)."""
    return np.abs(evaluate_batch(ansatz, params, initial)) ** 2
