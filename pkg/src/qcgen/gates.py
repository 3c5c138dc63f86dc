"""Gate matrices.

Rotation constructors accept scalars or arrays of angles; an array of shape
``s`` yields a stack of shape ``s + (d, d)`` so a batch of circuits with
different parameters can be simulated in one pass.
"""
from __future__ import annotations

import numpy as np

_SQRT_HALF = 1 / np.sqrt(2)


def _angles(theta) -> np.ndarray:
    t = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    return t


def identity(dim: int = 2) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def hadamard() -> np.ndarray:
    return _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=np.complex128)


def pauli_x() -> np.ndarray:
    return np.array([[0, 1], [1, 0]], dtype=np.complex128)


def pauli_y() -> np.ndarray:
    return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


def pauli_z() -> np.ndarray:
    return np.array([[1, 0], [0, -1]], dtype=np.complex128)


def rx(theta) -> np.ndarray:
    t = _angles(theta)
    c, s = np.cos(t / 2), np.sin(t / 2)
    out = np.empty(t.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * s
    out[..., 1, 0] = -1j * s
    out[..., 1, 1] = c
    return out


def ry(theta) -> np.ndarray:
    t = _angles(theta)
    c, s = np.cos(t / 2), np.sin(t / 2)
    out = np.empty(t.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def rz(theta) -> np.ndarray:
    t = _angles(theta)
    out = np.zeros(t.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = np.exp(-0.5j * t)
    out[..., 1, 1] = np.exp(0.5j * t)
    return out


def cnot() -> np.ndarray:
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    )


def controlled(u: np.ndarray) -> np.ndarray:
    """Embed a (stack of) 2x2 ``u`` as |0><0| (x) I + |1><1| (x) u."""
    u = np.asarray(u, dtype=np.complex128)
    out = np.zeros(u.shape[:-2] + (4, 4), dtype=np.complex128)
    out[..., 0, 0] = 1
    out[..., 1, 1] = 1
    out[..., 2:, 2:] = u
    return out


def controlled_rot(y_angle, z_angle) -> np.ndarray:
    """Controlled ``RY(y_angle) @ RZ(z_angle)``: RZ acts first on the target, then RY.

    Both angles enter through a controlled Pauli rotation, whose generator
    has spectrum {0, +-1/2}; see ``gradients`` for the matching shift rule.
    """
    return controlled(ry(y_angle) @ rz(z_angle))


def is_unitary(u: np.ndarray, atol: float = 1e-12) -> bool:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return bool(np.allclose(np.swapaxes(u.conj(), -1, -2) @ u, eye, atol=atol, rtol=0))
