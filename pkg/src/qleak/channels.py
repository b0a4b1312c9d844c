"""Quantum channels in Kraus and Choi form, and the three reset operations.

Choi convention: ``Lambda = sum_ij |i><j| (x) E(|i><j|)`` with the *input* as
the first tensor factor (``np.kron`` ordering). A channel is applied as
``E(rho) = Tr_1[Lambda (rho^T (x) I)]``. With this ordering the thermal
relaxation matrix below reproduces the textbook closed forms, e.g.
``E(|1><1|) = (1 - e^-g1)|0><0| + e^-g1 |1><1|`` for p0 = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .gates import basis_change
from .states import (
    IDENTITY,
    PAULI_X,
    AxisVector,
    DensityMatrix,
    Z_AXIS,
    as_matrix,
    max_abs_diff,
    partial_trace,
    partial_trace_first,
)

CPTP_TOL = 1e-10

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|


class ChannelError(ValueError):
    pass


def _freeze_ops(ops) -> tuple[np.ndarray, ...]:
    out = []
    for k in ops:
        a = np.array(as_matrix(k), copy=True)
        a.setflags(write=False)
        out.append(a)
    if not out:
        raise ChannelError("a Kraus channel needs at least one operator")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    kraus_ops: tuple[np.ndarray, ...]
    label: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kraus_ops", _freeze_ops(self.kraus_ops))
        if self.check:
            res = completeness_residual(self.kraus_ops)
            if res > CPTP_TOL:
                raise ChannelError(f"{self.label or 'channel'}: sum K^dag K != I (residual {res:.3g})")

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[1]

    def stacked(self) -> np.ndarray:
        """Kraus operators as one (n_ops, d, d) array."""
        return np.stack(self.kraus_ops)

    def conjugated(self, v: np.ndarray, label: str | None = None) -> KrausChannel:
        """The channel rho -> V^dag E(V rho V^dag) V."""
        v = np.asarray(v)
        vd = v.conj().T
        return KrausChannel([vd @ k @ v for k in self.kraus_ops], label or self.label)

    def then(self, other: KrausChannel) -> KrausChannel:
        """Sequential composition: apply self, then other."""
        return KrausChannel([b @ a for a in self.kraus_ops for b in other.kraus_ops],
                            f"{self.label};{other.label}")


@dataclass(frozen=True, eq=False)
class ChoiChannel:
    choi: np.ndarray
    label: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.array(as_matrix(self.choi), copy=True)
        if c.shape != (4, 4):
            raise ChannelError(f"expected a 4x4 Choi matrix, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "choi", c)
        if self.check:
            report = validate_cptp(self)
            if not report.passed:
                raise ChannelError(f"{self.label or 'channel'} is not CPTP: {report}")


Channel = Union[KrausChannel, ChoiChannel]


def completeness_residual(ops: Sequence[np.ndarray]) -> float:
    s = sum(k.conj().T @ k for k in ops)
    return max_abs_diff(s, np.eye(ops[0].shape[1]))


def kraus_to_choi(ch: KrausChannel) -> ChoiChannel:
    d = ch.dim
    lam = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            eij = np.zeros((d, d), dtype=complex)
            eij[i, j] = 1
            out = sum(k @ eij @ k.conj().T for k in ch.kraus_ops)
            lam += np.kron(eij, out)
    return ChoiChannel(lam, ch.label, check=ch.check)


def choi_to_kraus(ch: ChoiChannel, cutoff: float = 1e-14) -> KrausChannel:
    """Canonical Kraus set from the eigen-decomposition of the Choi matrix."""
    lam = (ch.choi + ch.choi.conj().T) / 2
    w, v = np.linalg.eigh(lam)
    ops = [
        math.sqrt(wk) * v[:, k].reshape(2, 2).T
        for k, wk in enumerate(w)
        if wk > cutoff
    ]
    return KrausChannel(ops, ch.label, check=ch.check)


def as_kraus(ch: Channel) -> KrausChannel:
    return ch if isinstance(ch, KrausChannel) else choi_to_kraus(ch)


def apply_kraus(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    m = rho.matrix
    out = sum(k @ m @ k.conj().T for k in ch.kraus_ops)
    return DensityMatrix(out)


def apply_choi(ch: ChoiChannel, rho: DensityMatrix) -> DensityMatrix:
    m = rho.matrix
    if m.shape != (2, 2):
        raise ValueError("Choi channels here act on single qubits")
    out = partial_trace_first(ch.choi @ np.kron(m.T, IDENTITY))
    return DensityMatrix(out)


def apply_channel(ch: Channel, rho: DensityMatrix) -> DensityMatrix:
    if isinstance(ch, ChoiChannel):
        return apply_choi(ch, rho)
    return apply_kraus(ch, rho)


# --- validation -------------------------------------------------------------

@dataclass(frozen=True)
class CptpReport:
    completeness_residual: float
    trace_preservation_residual: float
    hermiticity_residual: float
    min_choi_eigenvalue: float
    tol: float = CPTP_TOL

    @property
    def passed(self) -> bool:
        return (
            self.completeness_residual <= self.tol
            and self.trace_preservation_residual <= self.tol
            and self.hermiticity_residual <= self.tol
            and self.min_choi_eigenvalue >= -self.tol
        )

    @property
    def worst_residual(self) -> float:
        return max(self.completeness_residual, self.trace_preservation_residual,
                   self.hermiticity_residual, max(0.0, -self.min_choi_eigenvalue))


def validate_cptp(ch: Channel, tol: float = CPTP_TOL) -> CptpReport:
    """Report completeness, trace preservation and complete positivity residuals.

    Never raises; inspect ``report.passed``.
    """
    if isinstance(ch, KrausChannel):
        comp = completeness_residual(ch.kraus_ops)
        lam = kraus_to_choi(KrausChannel(ch.kraus_ops, ch.label, check=False)).choi
    else:
        comp = 0.0
        lam = ch.choi
    d = int(round(math.sqrt(lam.shape[0])))
    tp = max_abs_diff(partial_trace(lam, keep=0, dims=(d, d)), np.eye(d))
    herm = max_abs_diff(lam, lam.conj().T)
    lo = float(np.linalg.eigvalsh((lam + lam.conj().T) / 2).min())
    return CptpReport(comp, tp, herm, lo, tol)


# --- reset operations ---------------------------------------------------------

@dataclass(frozen=True)
class ThermalParams:
    """Idle decoherence for a time t.

    ``gamma1 = t / T1`` and ``gamma2 = t / T2`` are the exponents of the decay
    laws, so a 250 ns idle with T1 = T2 = 100 ns gives gamma1 = gamma2 = 2.5.
    ``math.inf`` is allowed and means complete relaxation.
    """

    gamma1: float
    gamma2: float
    p0: float = 1.0
    p1: float | None = None

    kind = "thermal"

    def __post_init__(self):
        if self.p1 is None:
            object.__setattr__(self, "p1", 1.0 - self.p0)
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ChannelError("decay exponents must be non-negative")
        if not (0 <= self.p0 <= 1 and 0 <= self.p1 <= 1) or abs(self.p0 + self.p1 - 1) > 1e-12:
            raise ChannelError(f"equilibrium populations must sum to 1, got p0={self.p0}, p1={self.p1}")
        if not thermal_exponents_valid(self.gamma1, self.gamma2):
            raise ChannelError(f"gamma1={self.gamma1} exceeds 2*gamma2={2 * self.gamma2} (T2 <= 2 T1 violated)")

    @classmethod
    def from_times(cls, t: float, t1: float, t2: float, p0: float = 1.0) -> ThermalParams:
        return cls(t / t1, t / t2, p0)

    def channel(self) -> ChoiChannel:
        return thermal_relaxation(self)


def thermal_exponents_valid(gamma1: float, gamma2: float) -> bool:
    if math.isinf(gamma2):
        return True
    return gamma1 <= 2 * gamma2 * (1 + 1e-12)


@dataclass(frozen=True)
class ResetInstrParams:
    """Measure along `axis`, then flip conditioned on the (noisy) outcome.

    m10: P(report 1 | prepared 0); m01: P(report 0 | prepared 1);
    p_bf: probability that the conditional flip fails to act.
    """

    m10: float = 0.0
    m01: float = 0.0
    p_bf: float = 0.0
    axis: AxisVector = Z_AXIS

    kind = "reset_instruction"

    def __post_init__(self):
        for name in ("m10", "m01", "p_bf"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ChannelError(f"{name} must be a probability, got {v}")

    def channel(self) -> KrausChannel:
        return reset_instruction(self)


@dataclass(frozen=True)
class MeasurementlessParams:
    """Keep the state with probability p_r, otherwise replace it with |0><0|."""

    p_r: float

    kind = "measurementless"

    def __post_init__(self):
        if not 0 <= self.p_r <= 1:
            raise ChannelError(f"p_r must be a probability, got {self.p_r}")

    def channel(self) -> KrausChannel:
        return measurementless_reset(self)


ResetParams = Union[ThermalParams, ResetInstrParams, MeasurementlessParams]
RESET_KINDS = ("thermal", "reset_instruction", "measurementless")


def thermal_choi_matrix(gamma1: float, gamma2: float, p0: float = 1.0, p1: float | None = None) -> np.ndarray:
    p1 = 1.0 - p0 if p1 is None else p1
    a = 1.0 - math.exp(-gamma1)
    c = math.exp(-gamma2)
    return np.array(
        [
            [1 - p1 * a, 0, 0, c],
            [0, p1 * a, 0, 0],
            [0, 0, p0 * a, 0],
            [c, 0, 0, 1 - p0 * a],
        ],
        dtype=complex,
    )


def thermal_relaxation(p: ThermalParams) -> ChoiChannel:
    return ChoiChannel(thermal_choi_matrix(p.gamma1, p.gamma2, p.p0, p.p1), "thermal")


def noisy_measurement(m10: float, m01: float) -> dict[int, list[np.ndarray]]:
    """Z-basis measurement with readout errors, as an instrument.

    Maps each *reported* outcome to the Kraus operators that produce it; the
    state collapses onto the true outcome.
    """
    return {
        0: [math.sqrt(1 - m10) * KET0, math.sqrt(m01) * KET1],
        1: [math.sqrt(m10) * KET0, math.sqrt(1 - m01) * KET1],
    }


def conditional_flip(p_bf: float) -> dict[int, list[np.ndarray]]:
    """Correction applied per reported outcome: nothing on 0, a faulty X on 1."""
    return {
        0: [IDENTITY],
        1: [math.sqrt(1 - p_bf) * PAULI_X, math.sqrt(p_bf) * IDENTITY],
    }


def feed_forward(instrument: dict[int, list[np.ndarray]],
                 corrections: dict[int, list[np.ndarray]], label: str = "") -> KrausChannel:
    """Compose an instrument with outcome-conditioned corrections, discarding the record."""
    ops = [c @ k for s, ks in instrument.items() for k in ks for c in corrections[s]]
    return KrausChannel(ops, label)


def reset_instruction(p: ResetInstrParams) -> KrausChannel:
    ch = feed_forward(noisy_measurement(p.m10, p.m01), conditional_flip(p.p_bf), "reset_instruction")
    if p.axis != Z_AXIS:
        ch = ch.conjugated(basis_change(p.axis).matrix)
    return ch


def measurementless_reset(p: MeasurementlessParams) -> KrausChannel:
    keep = math.sqrt(p.p_r)
    reset = math.sqrt(1 - p.p_r)
    return KrausChannel([keep * IDENTITY, reset * KET0, reset * LOWER], "measurementless")


def reset_channel(p: ResetParams) -> Channel:
    return p.channel()


def measurement_channel(axis: AxisVector) -> KrausChannel:
    """Non-selective projective measurement along `axis`."""
    return KrausChannel(list(axis.projectors), "measure")


def identity_channel() -> KrausChannel:
    return KrausChannel([IDENTITY], "identity")


# --- measurement --------------------------------------------------------------

class Measurement(NamedTuple):
    p_plus: float
    p_minus: float
    collapsed_plus: DensityMatrix
    collapsed_minus: DensityMatrix


def measure(rho: DensityMatrix, axis: AxisVector) -> Measurement:
    """Born-rule probabilities of +1 (|m>) and -1 (|-m>) and the post-measurement states."""
    m = rho.matrix
    if m.shape != (2, 2):
        raise ValueError("measure expects a single-qubit state")
    pp, pm = axis.projectors
    p_plus = float(np.real(np.trace(pp @ m)))
    p_plus = min(1.0, max(0.0, p_plus))
    return Measurement(p_plus, 1.0 - p_plus, DensityMatrix(pp), DensityMatrix(pm))


def random_kraus_channel(rng: np.random.Generator, n_ops: int = 3, dim: int = 2) -> KrausChannel:
    """Random CPTP map: split the columns of an isometry into Kraus blocks."""
    g = rng.normal(size=(n_ops * dim, dim)) + 1j * rng.normal(size=(n_ops * dim, dim))
    q, _ = np.linalg.qr(g)
    return KrausChannel([q[i * dim:(i + 1) * dim] for i in range(n_ops)], "random")
