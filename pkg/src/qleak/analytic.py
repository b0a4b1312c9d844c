"""Closed-form attacker statistics.

P(-1) is the probability that the attacker's measurement returns -1, i.e.
|1> along Z or |-> along X, after the victim state has been padded and
reset. The formulas take the victim's Bloch vector directly; the only
dependence on the pad is which Bloch components survive it:

* no pad: all components survive,
* COTP with Pauli X: only the x component survives,
* QOTP: nothing survives (maximally mixed state).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels import (
    MeasurementlessParams,
    ResetInstrParams,
    ResetParams,
    ThermalParams,
)
from .states import Z_AXIS, BlochVector

ATTACKER_AXES = ("Z", "X")
INFINITE_SNR = math.inf


@dataclass(frozen=True)
class LeakageFormulaInput:
    victim_bloch: BlochVector
    otp: str
    reset: ResetParams
    attacker_axis: str = "Z"

    def __post_init__(self):
        object.__setattr__(self, "otp", self.otp.lower())
        object.__setattr__(self, "attacker_axis", self.attacker_axis.upper())
        if self.otp not in ("none", "cotp", "qotp"):
            raise ValueError(f"unknown OTP kind {self.otp!r}")
        if self.attacker_axis not in ATTACKER_AXES:
            raise ValueError(f"closed forms exist only for attacker axes {ATTACKER_AXES}")


def padded_components(inp: LeakageFormulaInput) -> tuple[float, float]:
    """(x, z) Bloch components of the victim state after the key-averaged pad."""
    v = inp.victim_bloch
    if inp.otp == "qotp" or v.r == 0:
        return 0.0, 0.0
    x = v.r * math.sin(v.theta) * math.cos(v.phi)
    z = v.r * math.cos(v.theta)
    if inp.otp == "cotp":
        z = 0.0
    return x, z


def p_minus_thermal(inp: LeakageFormulaInput) -> float:
    p = inp.reset
    if not isinstance(p, ThermalParams):
        raise TypeError("p_minus_thermal needs ThermalParams")
    x, z = padded_components(inp)
    if inp.attacker_axis == "Z":
        decay = math.exp(-p.gamma1)
        # p1 = 0 recovers e^-g1 (1 - z) / 2
        return p.p1 * (1 - decay) + 0.5 * decay * (1 - z)
    return 0.5 * (1 - math.exp(-p.gamma2) * x)


def p_minus_reset_instruction(inp: LeakageFormulaInput) -> float:
    p = inp.reset
    if not isinstance(p, ResetInstrParams):
        raise TypeError("p_minus_reset_instruction needs ResetInstrParams")
    if p.axis != Z_AXIS:
        raise ValueError("closed form assumes the reset measures along Z")
    if inp.attacker_axis == "X":
        return 0.5
    _, z = padded_components(inp)
    offset = (p.m10 + p.m01) * (1 - p.p_bf) + p.p_bf
    slope = (p.m10 - p.m01) * (1 - p.p_bf) - p.p_bf
    return 0.5 * (offset + slope * z)


def p_minus_measurementless(inp: LeakageFormulaInput) -> float:
    p = inp.reset
    if not isinstance(p, MeasurementlessParams):
        raise TypeError("p_minus_measurementless needs MeasurementlessParams")
    x, z = padded_components(inp)
    if inp.attacker_axis == "Z":
        return 0.5 * p.p_r * (1 - z)
    return 0.5 * (1 - p.p_r * x)


_BY_KIND = {
    "thermal": p_minus_thermal,
    "reset_instruction": p_minus_reset_instruction,
    "measurementless": p_minus_measurementless,
}


def p_minus(inp: LeakageFormulaInput) -> float:
    return _BY_KIND[inp.reset.kind](inp)


def snr_from_probabilities(p_alpha0: float, p_alphapi: float, probs: Sequence[float], n_shots: int) -> float:
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    num = p_alphapi - p_alpha0
    den = float(np.mean(np.sqrt(probs * (1 - probs))))
    if den == 0.0:
        return math.copysign(INFINITE_SNR, num)
    return num / den * math.sqrt(n_shots)


def snr_theoretical(p_of_alpha: Callable[[float], float], alphas: Sequence[float], n_shots: int) -> float:
    """Leakage signal over the mean Bernoulli spread, scaled by sqrt(n_shots).

    Negative values mean the attacker sees *fewer* -1 outcomes for alpha = pi.
    A zero denominator (every probability 0 or 1) returns a signed infinity.
    """
    probs = [p_of_alpha(a) for a in alphas]
    return snr_from_probabilities(p_of_alpha(0.0), p_of_alpha(math.pi), probs, n_shots)
