"""Single-qubit unitaries used by the victim circuit and the one-time pads."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import AxisVector, DensityMatrix, as_matrix, max_abs_diff

UNITARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Gate:
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        u = np.array(as_matrix(self.matrix), copy=True)
        res = max_abs_diff(u @ u.conj().T, np.eye(u.shape[0]))
        if res > UNITARY_TOL:
            raise ValueError(f"gate {self.label!r} is not unitary (residual {res:.3g})")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @property
    def dagger(self) -> Gate:
        return Gate(self.matrix.conj().T, f"{self.label}^dag")

    def __matmul__(self, other: Gate) -> Gate:
        return Gate(self.matrix @ other.matrix, f"{self.label}*{other.label}")

    def power(self, k: int) -> Gate:
        """g**k for the key bits 0/1 used by the pads (and any k >= 0)."""
        return Gate(np.linalg.matrix_power(self.matrix, k), f"{self.label}^{k}")


_PAULIS = {
    "I": [[1, 0], [0, 1]],
    "X": [[0, 1], [1, 0]],
    "Z": [[1, 0], [0, -1]],
    "XZ": [[0, -1], [1, 0]],
}


def pauli(kind: str) -> Gate:
    """One of I, X, Z or the product XZ."""
    try:
        return Gate(np.array(_PAULIS[kind], dtype=complex), kind)
    except KeyError:
        raise ValueError(f"unknown Pauli {kind!r}; expected one of {list(_PAULIS)}") from None


def rotation_x(theta: float) -> Gate:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Gate(np.array([[c, -1j * s], [-1j * s, c]]), f"Rx({theta:g})")


def generalized_pauli_x(n: AxisVector) -> Gate:
    """|n><n| - |-n><-n|: the reflection with +1 eigenstate along `n`."""
    c, s = math.cos(n.theta), math.sin(n.theta)
    e = np.exp(1j * n.phi)
    return Gate(np.array([[c, s / e], [e * s, -c]]), f"X_n({n.theta:g},{n.phi:g})")


def hadamard() -> Gate:
    return Gate(np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2), "H")


def basis_change(axis: AxisVector) -> Gate:
    """Unitary V with V|m> = |0> and V|-m> = |1>, i.e. it rotates `axis` onto +Z."""
    return Gate(np.vstack([axis.ket.conj(), axis.anti_ket.conj()]), f"V({axis.theta:g},{axis.phi:g})")


def apply_gate(g: Gate, rho: DensityMatrix) -> DensityMatrix:
    if g.matrix.shape != rho.matrix.shape:
        raise ValueError(f"gate of shape {g.matrix.shape} cannot act on state of shape {rho.matrix.shape}")
    u = g.matrix
    return DensityMatrix(u @ rho.matrix @ u.conj().T)
