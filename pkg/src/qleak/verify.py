"""Self-checks run by ``qleak verify``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import experiment as ex
from .analytic import LeakageFormulaInput, p_minus
from .channels import (
    Channel,
    MeasurementlessParams,
    ResetInstrParams,
    ThermalParams,
    apply_channel,
    apply_choi,
    apply_kraus,
    identity_channel,
    kraus_to_choi,
    measure,
    random_kraus_channel,
    thermal_exponents_valid,
    validate_cptp,
)
from .otp import OtpScheme, otp_average
from .states import (
    AxisVector,
    BlochVector,
    axis_from_name,
    bloch_to_density,
    max_abs_diff,
    random_density_matrix,
)

GRID5 = np.linspace(0.0, 1.0, 5)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def builtin_channels() -> Iterator[tuple[str, Channel]]:
    """Every built-in reset channel over a 5x5 parameter grid."""
    for g1, g2 in itertools.product(np.linspace(0, 4, 5), np.linspace(0, 4, 5)):
        if thermal_exponents_valid(g1, g2):
            for p0 in (1.0, 0.9):
                yield f"thermal(g1={g1:g},g2={g2:g},p0={p0:g})", ThermalParams(g1, g2, p0).channel()
    for m10, m01 in itertools.product(GRID5, GRID5):
        for p_bf, axis in ((0.0, AxisVector(0.0)), (0.3, AxisVector(1.1, 0.4))):
            p = ResetInstrParams(m10, m01, p_bf, axis)
            yield f"reset_instruction(m10={m10:g},m01={m01:g},p_bf={p_bf:g})", p.channel()
    for p_r in np.linspace(0.0, 1.0, 25):
        yield f"measurementless(p_r={p_r:g})", MeasurementlessParams(p_r).channel()
    yield "identity", identity_channel()


def check_cptp() -> CheckResult:
    worst, count, failed = 0.0, 0, []
    for name, ch in builtin_channels():
        report = validate_cptp(ch)
        count += 1
        worst = max(worst, report.worst_residual)
        if not report.passed:
            failed.append(name)
    if failed:
        return CheckResult("cptp", False, f"{len(failed)}/{count} channels fail, first: {failed[0]}")
    return CheckResult("cptp", True, f"{count} channels, worst residual {worst:.2e}")


def check_kraus_choi(n: int = 200, seed: int = 11) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        ch = random_kraus_channel(rng, n_ops=int(rng.integers(1, 5)))
        rho = random_density_matrix(2, rng)
        worst = max(worst, max_abs_diff(apply_kraus(ch, rho).matrix, apply_choi(kraus_to_choi(ch), rho).matrix))
    return CheckResult("kraus_vs_choi", worst <= 1e-10, f"{n} random channels, max deviation {worst:.2e}")


def check_qotp(n: int = 1000, seed: int = 12) -> CheckResult:
    rng = np.random.default_rng(seed)
    half = np.eye(2) / 2
    worst = max(max_abs_diff(otp_average(OtpScheme("qotp"), random_density_matrix(2, rng)).matrix, half)
                for _ in range(n))
    return CheckResult("qotp_mixing", worst <= 1e-12, f"{n} random states, max deviation {worst:.2e}")


def analytic_cases():
    """3 resets x 3 pads x 2 axes x 27 victim states."""
    resets = [ThermalParams(2.5, 2.5), ThermalParams(0.7, 1.9, 0.85),
              ResetInstrParams(0.05, 0.10, 0.02), MeasurementlessParams(0.1)]
    victims = [BlochVector(r, t, f) for r in (0.0, 0.5, 1.0)
               for t in (0.0, math.pi / 3, math.pi) for f in (0.0, 2.0, 4.5)]
    for reset, otp, axis, v in itertools.product(resets, ("none", "cotp", "qotp"), ("Z", "X"), victims):
        yield LeakageFormulaInput(v, otp, reset, axis)


def pipeline_p_minus(inp: LeakageFormulaInput) -> float:
    """P(-1) via explicit channel application on density matrices."""
    rho = otp_average(OtpScheme(inp.otp), bloch_to_density(inp.victim_bloch))
    rho = apply_channel(inp.reset.channel(), rho)
    return measure(rho, axis_from_name(inp.attacker_axis)).p_minus


def check_analytic() -> CheckResult:
    worst, n = 0.0, 0
    for inp in analytic_cases():
        worst = max(worst, abs(p_minus(inp) - pipeline_p_minus(inp)))
        n += 1
    return CheckResult("analytic_vs_pipeline", worst <= 1e-10, f"{n} cases, max deviation {worst:.2e}")


def check_monte_carlo(quick: bool = False, threads: int = 1, seed: int = 2023) -> CheckResult:
    n_shots, n_exp = (2_000, 2) if quick else (ex.DEFAULT_N_SHOTS, ex.DEFAULT_N_EXPERIMENTS)
    resets = [ThermalParams(2.5, 2.5), ResetInstrParams(0.05, 0.10), MeasurementlessParams(0.1)]
    worst_z, n = 0.0, 0
    for stream, (reset, otp, axis) in enumerate(itertools.product(resets, ("none", "cotp", "qotp"), ("Z", "X"))):
        cfg = ex.ExperimentConfig(alpha=0.0, reset=reset, otp=OtpScheme(otp), attacker_axis=axis,
                                  n_shots=n_shots, n_experiments=n_exp, master_seed=seed)
        sw = ex.run_sweep(cfg, threads=threads, stream=stream)
        total = n_shots * n_exp
        for p_hat, p in zip(sw.pooled, sw.p_minus_analytic):
            sigma = math.sqrt(max(p * (1 - p), 1e-300) / total)
            z = 0.0 if p_hat == p else abs(p_hat - p) / sigma
            worst_z = max(worst_z, z)
            n += 1
    return CheckResult("monte_carlo", worst_z <= 4.0,
                       f"{n} (config, alpha) points, {n_shots}x{n_exp} shots, worst |z| = {worst_z:.2f}")


def run_checks(quick: bool = False, threads: int = 1) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        check_cptp, check_kraus_choi, check_qotp, check_analytic,
        lambda: check_monte_carlo(quick=quick, threads=threads),
    ]
    return [c() for c in checks]
