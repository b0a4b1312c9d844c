"""Classical (COTP) and quantum (QOTP) one-time pads on qubits.

COTP applies ``X_n**k1``; QOTP applies ``X_n**k1`` followed by ``X_z**k2``
where ``X_z`` is the generalized Pauli-X along a second axis orthogonal to
the first. With the default axes these are the Pauli X and Z gates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .gates import Gate, generalized_pauli_x
from .states import X_AXIS, Z_AXIS, AxisVector, DensityMatrix, as_matrix

OTP_KINDS = ("none", "cotp", "qotp")
ORTHOGONALITY_TOL = 1e-10


@dataclass(frozen=True)
class OtpKey:
    k1: int = 0
    k2: int = 0

    def __post_init__(self):
        if self.k1 not in (0, 1) or self.k2 not in (0, 1):
            raise ValueError(f"key bits must be 0 or 1, got ({self.k1}, {self.k2})")


@dataclass(frozen=True)
class OtpScheme:
    kind: str = "none"
    x_axis: AxisVector = X_AXIS
    z_axis: AxisVector = Z_AXIS

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in OTP_KINDS:
            raise ValueError(f"unknown OTP kind {self.kind!r}; expected one of {OTP_KINDS}")
        object.__setattr__(self, "kind", kind)
        if kind == "qotp" and abs(self.x_axis.dot(self.z_axis)) > ORTHOGONALITY_TOL:
            raise ValueError("QOTP needs orthogonal gate axes")

    @property
    def x_gate(self) -> Gate:
        return generalized_pauli_x(self.x_axis)

    @property
    def z_gate(self) -> Gate:
        return generalized_pauli_x(self.z_axis)

    def keys(self) -> list[OtpKey]:
        """Every key the scheme can draw, each equally likely."""
        if self.kind == "none":
            return [OtpKey()]
        if self.kind == "cotp":
            return [OtpKey(0), OtpKey(1)]
        return [OtpKey(a, b) for a, b in itertools.product((0, 1), repeat=2)]

    def unitary(self, key: OtpKey) -> np.ndarray:
        """The padding unitary Z_z**k2 @ X_n**k1 for this key."""
        u = np.eye(2, dtype=complex)
        if self.kind == "none":
            return u
        if key.k1:
            u = self.x_gate.matrix @ u
        if self.kind == "qotp" and key.k2:
            u = self.z_gate.matrix @ u
        return u

    def unitaries(self) -> np.ndarray:
        """(n_keys, 2, 2) stack of padding unitaries in ``keys()`` order."""
        return np.stack([self.unitary(k) for k in self.keys()])


NO_OTP = OtpScheme("none")
COTP = OtpScheme("cotp")
QOTP = OtpScheme("qotp")


def otp_keyed(scheme: OtpScheme, key: OtpKey, rho: DensityMatrix) -> DensityMatrix:
    u = scheme.unitary(key)
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def otp_decrypt(scheme: OtpScheme, key: OtpKey, rho: DensityMatrix) -> DensityMatrix:
    u = scheme.unitary(key).conj().T
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def otp_average(scheme: OtpScheme, rho: DensityMatrix) -> DensityMatrix:
    """Key-averaged pad, with an independent key on every qubit of `rho`."""
    m = rho.matrix
    n_qubits = rho.num_qubits
    per_qubit = scheme.unitaries()
    out = np.zeros_like(m)
    for combo in itertools.product(per_qubit, repeat=n_qubits):
        u = reduce(np.kron, combo)
        out += u @ m @ u.conj().T
    return DensityMatrix(out / len(per_qubit) ** n_qubits)


def cotp_measurement_probability(psi, target) -> float:
    """P(target) after padding the pure state `psi` with a Pauli-X COTP.

    Both arguments are amplitude pairs (a, b) for a|0> + b|1>. The result is
    <n|rho'|n> with rho' the key-averaged padded state, equal to
    (1 + (x y* + x* y)(a b* + a* b)) / 2.
    """
    a, b = (complex(c) for c in psi)
    x, y = (complex(c) for c in target)
    for name, (u, v) in (("psi", (a, b)), ("target", (x, y))):
        norm = abs(u) ** 2 + abs(v) ** 2
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"{name} is not normalized (norm^2 = {norm})")
    rho = np.outer([a, b], np.conj([a, b]))
    rho_pad = otp_average(COTP, DensityMatrix(rho)).matrix
    n = np.array([x, y])
    return float(np.real(n.conj() @ rho_pad @ n))


def commutator_norm(rho, gate) -> float:
    a = as_matrix(rho.matrix if isinstance(rho, DensityMatrix) else rho)
    g = gate.matrix if isinstance(gate, Gate) else as_matrix(gate)
    return float(np.linalg.norm(a @ g - g @ a))
