"""Density matrices, Bloch vectors and measurement axes.

Matrices are stored as dense complex numpy arrays. Everything in this package
lives in dimension 2 or 4, so no sparse machinery is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class InvalidStateError(ValueError):
    """Raised when a matrix or parameter set does not describe a physical state."""


def as_matrix(m) -> np.ndarray:
    """Return `m` as a square complex array, rejecting anything else."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def max_abs_diff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def matrices_close(a, b, eps: float = 1e-12) -> bool:
    """Entry-wise equality within `eps` (max norm)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and max_abs_diff(a, b) <= eps


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A Hermitian, unit-trace, positive semidefinite matrix of dimension 2**k.

    The wrapped array is a read-only copy, so instances can be shared freely.
    Pass ``check=False`` to skip validation (used internally where validity
    is guaranteed by construction).
    """

    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = _frozen(as_matrix(self.matrix))
        object.__setattr__(self, "matrix", m)
        if self.check:
            problems = density_problems(m)
            if problems:
                raise InvalidStateError("; ".join(problems))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return int(round(math.log2(self.dim)))

    def close_to(self, other, eps: float = 1e-12) -> bool:
        other = other.matrix if isinstance(other, DensityMatrix) else other
        return matrices_close(self.matrix, other, eps)

    def expectation(self, op) -> complex:
        return complex(np.trace(self.matrix @ np.asarray(op)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def density_problems(m: np.ndarray) -> list[str]:
    """List every density-matrix invariant that `m` violates (empty if valid)."""
    problems = []
    dim = m.shape[0]
    if dim < 1 or dim & (dim - 1):
        problems.append(f"dimension {dim} is not a power of two")
    herm = max_abs_diff(m, m.conj().T)
    if herm > HERMITIAN_TOL:
        problems.append(f"not Hermitian (residual {herm:.3g})")
    tr = np.trace(m)
    if abs(tr - 1) > TRACE_TOL:
        problems.append(f"trace is {tr:.15g}, expected 1")
    if herm <= HERMITIAN_TOL:
        lo = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if lo < -PSD_TOL:
            problems.append(f"negative eigenvalue {lo:.3g}")
    return problems


def is_density_matrix(m) -> bool:
    return not density_problems(as_matrix(m))


@dataclass(frozen=True)
class BlochVector:
    """Spherical coordinates (r, theta, phi) of a single-qubit state."""

    r: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not (self.r >= 0):
            raise InvalidStateError(f"Bloch radius must be non-negative, got {self.r}")
        if self.r > 1 + 1e-12:
            raise InvalidStateError(f"Bloch radius {self.r} lies outside the unit ball")

    @property
    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return self.r * np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    @classmethod
    def from_cartesian(cls, v) -> BlochVector:
        x, y, z = (float(c) for c in v)
        r = math.sqrt(x * x + y * y + z * z)
        if r == 0.0:
            return cls(0.0, 0.0, 0.0)
        theta = math.acos(max(-1.0, min(1.0, z / r)))
        phi = math.atan2(y, x) % (2 * math.pi)
        return cls(r, theta, phi)


@dataclass(frozen=True)
class AxisVector:
    """A direction on the Bloch sphere; also names the +1 eigenstate |m>."""

    theta: float
    phi: float = 0.0

    @property
    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def ket(self) -> np.ndarray:
        """|m> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
        return np.array(
            [math.cos(self.theta / 2), np.exp(1j * self.phi) * math.sin(self.theta / 2)]
        )

    @property
    def anti_ket(self) -> np.ndarray:
        """The orthogonal state |-m>, with the phase chosen so (|m>, |-m>) is right-handed."""
        return np.array(
            [math.sin(self.theta / 2), -np.exp(1j * self.phi) * math.cos(self.theta / 2)]
        )

    @property
    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        k, a = self.ket, self.anti_ket
        return np.outer(k, k.conj()), np.outer(a, a.conj())

    def dot(self, other: AxisVector) -> float:
        return float(self.cartesian @ other.cartesian)


Z_AXIS = AxisVector(0.0, 0.0)
X_AXIS = AxisVector(math.pi / 2, 0.0)
Y_AXIS = AxisVector(math.pi / 2, math.pi / 2)

NAMED_AXES = {"Z": Z_AXIS, "X": X_AXIS, "Y": Y_AXIS}


def axis_from_name(name: str) -> AxisVector:
    try:
        return NAMED_AXES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown axis {name!r}; expected one of {sorted(NAMED_AXES)}") from None


def bloch_to_density(v: BlochVector) -> DensityMatrix:
    x, y, z = v.cartesian
    return DensityMatrix(0.5 * (IDENTITY + x * PAULI_X + y * PAULI_Y + z * PAULI_Z))


def density_to_bloch(rho) -> BlochVector:
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)
    if m.shape != (2, 2):
        raise ValueError(f"Bloch coordinates need a 2x2 state, got {m.shape}")
    x = float(np.real(np.trace(m @ PAULI_X)))
    y = float(np.real(np.trace(m @ PAULI_Y)))
    z = float(np.real(np.trace(m @ PAULI_Z)))
    v = BlochVector.from_cartesian((x, y, z))
    # rounding can push a pure state a hair past the sphere
    if v.r > 1.0:
        v = BlochVector(1.0, v.theta, v.phi)
    return v


def pure_state(ket) -> DensityMatrix:
    k = np.asarray(ket, dtype=complex)
    n = np.linalg.norm(k)
    if abs(n - 1) > 1e-12:
        raise InvalidStateError(f"state vector has norm {n}, expected 1")
    return DensityMatrix(np.outer(k, k.conj()))


def maximally_mixed(dim: int = 2) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product a (x) b; `a` is the first (most significant) factor."""
    return DensityMatrix(np.kron(a.matrix, b.matrix))


def partial_trace(m, keep: int, dims: tuple[int, int] = (2, 2)) -> np.ndarray:
    """Trace out one factor of a bipartite matrix, keeping factor `keep` (0 or 1)."""
    m = as_matrix(m)
    da, db = dims
    if m.shape != (da * db, da * db):
        raise ValueError(f"matrix shape {m.shape} does not match subsystem dims {dims}")
    t = m.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ajbj->ab", t)
    if keep == 1:
        return np.einsum("iaib->ab", t)
    raise ValueError("keep must be 0 or 1")


def partial_trace_first(m) -> np.ndarray:
    """Tr_1 of a 4x4 matrix: sums out the first tensor factor, leaving a 2x2."""
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    return partial_trace(m, keep=1)


def random_bloch_vector(rng: np.random.Generator) -> BlochVector:
    """Uniform sample from the Bloch ball."""
    while True:
        v = rng.uniform(-1, 1, size=3)
        if v @ v <= 1:
            return BlochVector.from_cartesian(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random mixed state G G^dag / tr(G G^dag) from a complex Ginibre matrix."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real)
