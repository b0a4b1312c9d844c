"""Shot-by-shot simulation of victim -> pad -> reset -> attacker.

Every shot follows the threat model literally: the victim prepares
``Z R_x(alpha)|0>`` and measures it (collapsing the state), a fresh pad key is
drawn and applied, one Kraus branch of the reset channel is sampled, and
the attacker measures. Shots of one experiment are simulated together as a
``(n_shots, 2, 2)`` batch, but each row carries its own random draws, so the
batch is exactly ``n_shots`` independent single-shot runs.

Random streams are derived from ``SeedSequence(master_seed, spawn_key=...)``
keyed by (stream, alpha index, experiment index); results are therefore
identical whatever the number of worker threads.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .analytic import INFINITE_SNR, LeakageFormulaInput, p_minus, snr_theoretical
from .channels import (
    ChannelError,
    ResetParams,
    ThermalParams,
    as_kraus,
    thermal_exponents_valid,
)
from .gates import hadamard, pauli, rotation_x
from .otp import OtpScheme
from .states import BlochVector, DensityMatrix, axis_from_name

DEFAULT_ALPHAS = tuple(k * math.pi / 8 for k in range(9))
DEFAULT_N_SHOTS = 10_000
DEFAULT_N_EXPERIMENTS = 10
VICTIM_AXES = ("Z", "X")
OTP_MODES = ("keyed", "averaged")


@dataclass(frozen=True)
class ExperimentConfig:
    alpha: float
    reset: ResetParams
    otp: OtpScheme = field(default_factory=OtpScheme)
    victim_axis: str = "Z"
    attacker_axis: str = "Z"
    n_shots: int = DEFAULT_N_SHOTS
    n_experiments: int = DEFAULT_N_EXPERIMENTS
    master_seed: int = 0
    otp_mode: str = "keyed"

    def __post_init__(self):
        object.__setattr__(self, "victim_axis", self.victim_axis.upper())
        object.__setattr__(self, "attacker_axis", self.attacker_axis.upper())
        if self.victim_axis not in VICTIM_AXES:
            raise ValueError(f"victim axis must be one of {VICTIM_AXES}")
        axis_from_name(self.attacker_axis)
        if self.n_shots < 1:
            raise ValueError("n_shots must be >= 1")
        if self.n_experiments < 2:
            raise ValueError("n_experiments must be >= 2 for the corrected standard deviation")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.otp_mode not in OTP_MODES:
            raise ValueError(f"otp_mode must be one of {OTP_MODES}")


# --- victim -------------------------------------------------------------------

def victim_state(alpha: float) -> DensityMatrix:
    """Z R_x(alpha)|0>, the victim's state just before its final measurement."""
    u = pauli("Z").matrix @ rotation_x(alpha).matrix
    ket = u[:, 0]
    return DensityMatrix(np.outer(ket, ket.conj()))


def victim_p_plus(alpha: float, victim_axis: str) -> float:
    """Probability that the victim reads +1 (|0> along Z, |+> along X)."""
    rho = victim_state(alpha).matrix
    if victim_axis.upper() == "X":
        h = hadamard().matrix
        rho = h @ rho @ h
    return float(np.real(rho[0, 0]))


def victim_bloch(alpha: float, victim_axis: str) -> BlochVector:
    """Bloch vector of the measured victim: (2 P(+1) - 1) times the measurement axis."""
    p = victim_p_plus(alpha, victim_axis)
    return BlochVector.from_cartesian((2 * p - 1) * axis_from_name(victim_axis).cartesian)


def analytic_p_minus(cfg: ExperimentConfig) -> float:
    return p_minus(LeakageFormulaInput(victim_bloch(cfg.alpha, cfg.victim_axis),
                                       cfg.otp.kind, cfg.reset, cfg.attacker_axis))


# --- shot sampling --------------------------------------------------------------

def _conj_each(ops, rho):
    """ops[k] rho[n] ops[k]^dag for every (n, k): returns (n, k, 2, 2)."""
    return np.einsum("kij,njl,kml->nkim", ops, rho, ops.conj(), optimize=False)


def _sample_index(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise categorical draw: probs (n, k), u (n,) uniform in [0, 1)."""
    cum = np.cumsum(probs, axis=1)
    cum /= cum[:, -1:]
    idx = (u[:, None] >= cum).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


@dataclass(frozen=True, eq=False)
class _Pipeline:
    """Everything about a config that does not change from shot to shot."""

    victim_kets: np.ndarray      # (2, 2): post-measurement state for outcome +1 / -1
    victim_p_plus: float
    pads: np.ndarray             # (n_keys, 2, 2)
    kraus: np.ndarray            # (n_ops, 2, 2)
    attacker_minus_ket: np.ndarray
    averaged: bool

    @property
    def attacker_minus(self) -> np.ndarray:
        k = self.attacker_minus_ket
        return np.outer(k, k.conj())

    @classmethod
    def build(cls, cfg: ExperimentConfig) -> _Pipeline:
        if cfg.victim_axis == "X":
            # measure X as H, measure Z, H: collapses onto |+> / |->
            kets = hadamard().matrix.T.copy()
        else:
            kets = np.eye(2, dtype=complex)
        return cls(
            victim_kets=kets,
            victim_p_plus=victim_p_plus(cfg.alpha, cfg.victim_axis),
            pads=cfg.otp.unitaries(),
            kraus=as_kraus(cfg.reset.channel()).stacked(),
            attacker_minus_ket=axis_from_name(cfg.attacker_axis).anti_ket,
            averaged=cfg.otp_mode == "averaged",
        )

    def run(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # victim measurement and collapse
        victim_minus = rng.random(n) >= self.victim_p_plus
        kets = self.victim_kets[victim_minus.astype(int)]
        if self.averaged:
            return self._run_mixed(rng, kets)

        # keyed pad; a padded pure state stays pure, and so does each Kraus branch
        keys = rng.integers(0, len(self.pads), size=n)
        kets = np.einsum("nij,nj->ni", self.pads[keys], kets)

        # reset: sample a Kraus branch per shot
        branches = np.einsum("kij,nj->nki", self.kraus, kets)
        weights = np.einsum("nki,nki->nk", branches, branches.conj()).real
        pick = _sample_index(weights, rng.random(n))
        kets = branches[np.arange(n), pick]
        kets /= np.linalg.norm(kets, axis=1)[:, None]

        # attacker measurement
        amp = kets @ self.attacker_minus_ket.conj()
        return np.where(rng.random(n) < np.abs(amp) ** 2, -1, 1).astype(np.int8)

    def _run_mixed(self, rng: np.random.Generator, kets: np.ndarray) -> np.ndarray:
        """Same pipeline with the key-averaged pad, so states are density matrices."""
        n = len(kets)
        rho = np.einsum("ni,nj->nij", kets, kets.conj())
        rho = _conj_each(self.pads, rho).mean(axis=1)
        branches = _conj_each(self.kraus, rho)
        weights = np.real(np.einsum("nkii->nk", branches))
        pick = _sample_index(np.clip(weights, 0, None), rng.random(n))
        chosen = branches[np.arange(n), pick]
        rho = chosen / np.real(np.trace(chosen, axis1=1, axis2=2))[:, None, None]
        p_minus_shot = np.real(np.einsum("ij,nji->n", self.attacker_minus, rho))
        return np.where(rng.random(n) < p_minus_shot, -1, 1).astype(np.int8)


def sample_outcomes(cfg: ExperimentConfig, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Attacker outcomes (+1 / -1) of `n` independent shots (default cfg.n_shots)."""
    return _Pipeline.build(cfg).run(rng, cfg.n_shots if n is None else n)


def run_shot(cfg: ExperimentConfig, rng: np.random.Generator) -> int:
    return int(sample_outcomes(cfg, rng, 1)[0])


def experiment_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=tuple(key)))


def resolve_threads(threads: int) -> int:
    if threads == 0:
        return os.cpu_count() or 1
    return max(1, threads)


# --- sweeps -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SweepResult:
    template: ExperimentConfig
    alphas: np.ndarray
    minus_counts: np.ndarray          # (n_alpha, n_experiments) number of -1 outcomes
    p_minus_analytic: np.ndarray      # (n_alpha,)

    @property
    def n_shots(self) -> int:
        return self.template.n_shots

    @property
    def n_experiments(self) -> int:
        return self.minus_counts.shape[1]

    @property
    def p_minus_empirical(self) -> np.ndarray:
        return self.minus_counts / self.n_shots

    @property
    def mean_exp(self) -> np.ndarray:
        return self.p_minus_empirical.mean(axis=1)

    @property
    def std_exp(self) -> np.ndarray:
        """Population standard deviation across experiments at each alpha."""
        return self.p_minus_empirical.std(axis=1)

    @property
    def pooled(self) -> np.ndarray:
        return self.minus_counts.sum(axis=1) / (self.n_shots * self.n_experiments)


def _count_task(args):
    pipe, seed_key, n = args
    rng = experiment_rng(*seed_key)
    return int(np.count_nonzero(pipe.run(rng, n) == -1))


def run_sweep(template: ExperimentConfig, alphas: Sequence[float] = DEFAULT_ALPHAS,
              threads: int = 1, stream: int = 0, executor: Executor | None = None) -> SweepResult:
    """Run n_experiments x n_shots shots at each alpha of `alphas`."""
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        raise ValueError("need at least one alpha")
    cfgs = [replace(template, alpha=float(a)) for a in alphas]
    pipes = [_Pipeline.build(c) for c in cfgs]
    tasks = [
        (pipes[i], (template.master_seed, stream, i, e), template.n_shots)
        for i in range(len(alphas))
        for e in range(template.n_experiments)
    ]
    counts = _map(_count_task, tasks, threads, executor)
    return SweepResult(
        template=template,
        alphas=alphas,
        minus_counts=np.array(counts, dtype=np.int64).reshape(len(alphas), template.n_experiments),
        p_minus_analytic=np.array([analytic_p_minus(c) for c in cfgs]),
    )


def _map(fn, tasks, threads, executor):
    if executor is not None:
        return list(executor.map(fn, tasks))
    n = resolve_threads(threads)
    if n == 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, tasks))


def _alpha_index(alphas: np.ndarray, target: float) -> int:
    hits = np.flatnonzero(np.isclose(alphas, target, atol=1e-12))
    if hits.size == 0:
        raise ValueError(f"sweep does not include alpha = {target}")
    return int(hits[0])


def snr_empirical(sweep: SweepResult) -> float:
    """Difference of experiment means at alpha = pi and 0 over the mean corrected std."""
    i0 = _alpha_index(sweep.alphas, 0.0)
    ipi = _alpha_index(sweep.alphas, math.pi)
    mean = sweep.mean_exp
    n_exp = sweep.n_experiments
    num = float(mean[ipi] - mean[i0])
    den = float(np.mean(sweep.std_exp * math.sqrt(n_exp / (n_exp - 1))))
    if den == 0.0:
        return math.copysign(INFINITE_SNR, num)
    return num / den


def sweep_snr_theoretical(template: ExperimentConfig, alphas: Sequence[float] = DEFAULT_ALPHAS) -> float:
    return snr_theoretical(lambda a: analytic_p_minus(replace(template, alpha=a)), alphas, template.n_shots)


# --- SNR grids ------------------------------------------------------------------

@dataclass(frozen=True)
class SnrCell:
    param1_value: float
    param2_value: float | None
    otp: str
    attacker_axis: str
    snr_empirical: float
    snr_theoretical: float
    valid: bool


@dataclass(frozen=True)
class SnrGridResult:
    reset_kind: str
    param1_name: str
    param1_values: tuple[float, ...]
    param2_name: str | None
    param2_values: tuple[float | None, ...]
    otps: tuple[str, ...]
    attacker_axes: tuple[str, ...]
    cells: tuple[SnrCell, ...]

    def table(self, otp: str, axis: str, which: str = "empirical") -> np.ndarray:
        """(len(param1), len(param2)) array of SNR values, NaN where invalid."""
        out = np.full((len(self.param1_values), len(self.param2_values)), np.nan)
        for c in self.cells:
            if c.otp == otp and c.attacker_axis == axis and c.valid:
                i = self.param1_values.index(c.param1_value)
                j = self.param2_values.index(c.param2_value)
                out[i, j] = c.snr_empirical if which == "empirical" else c.snr_theoretical
        return out


def _with_params(base: ResetParams, updates: dict) -> ResetParams | None:
    """Reset parameters with `updates` applied, or None for a physically excluded cell."""
    if isinstance(base, ThermalParams):
        g1 = updates.get("gamma1", base.gamma1)
        g2 = updates.get("gamma2", base.gamma2)
        if not thermal_exponents_valid(g1, g2):
            return None
    try:
        return replace(base, **updates)
    except TypeError:
        raise ValueError(f"{type(base).__name__} has no parameter among {sorted(updates)}") from None
    except ChannelError:
        if isinstance(base, ThermalParams):
            return None
        raise


def run_snr_grid(base_reset: ResetParams,
                 param1: tuple[str, Sequence[float]],
                 param2: tuple[str, Sequence[float]] | None = None,
                 otps: Sequence[OtpScheme] = (OtpScheme("none"),),
                 attacker_axes: Sequence[str] = ("Z",),
                 *,
                 alphas: Sequence[float] = DEFAULT_ALPHAS,
                 victim_axis: str = "Z",
                 n_shots: int = DEFAULT_N_SHOTS,
                 n_experiments: int = DEFAULT_N_EXPERIMENTS,
                 master_seed: int = 0,
                 threads: int = 1) -> SnrGridResult:
    """Empirical and theoretical SNR over a one- or two-parameter grid of reset errors."""
    name1, values1 = param1[0], tuple(float(v) for v in param1[1])
    name2, values2 = (param2[0], tuple(float(v) for v in param2[1])) if param2 else (None, (None,))
    if not values1 or not values2:
        raise ValueError("grid axes must be non-empty")
    if name2 == name1:
        raise ValueError("grid parameters must differ")

    jobs = []
    for v1 in values1:
        for v2 in values2:
            updates = {name1: v1} if name2 is None else {name1: v1, name2: v2}
            reset = _with_params(base_reset, updates)
            for otp in otps:
                for axis in attacker_axes:
                    jobs.append((v1, v2, otp, axis.upper(), reset))

    n_workers = resolve_threads(threads)
    pool = ThreadPoolExecutor(max_workers=n_workers) if n_workers > 1 else None
    cells = []
    try:
        for stream, (v1, v2, otp, axis, reset) in enumerate(jobs):
            if reset is None:
                cells.append(SnrCell(v1, v2, otp.kind, axis, math.nan, math.nan, False))
                continue
            template = ExperimentConfig(alpha=0.0, reset=reset, otp=otp, victim_axis=victim_axis,
                                        attacker_axis=axis, n_shots=n_shots,
                                        n_experiments=n_experiments, master_seed=master_seed)
            sweep = run_sweep(template, alphas, stream=stream, executor=pool)
            cells.append(SnrCell(v1, v2, otp.kind, axis, snr_empirical(sweep),
                                 sweep_snr_theoretical(template, alphas), True))
    finally:
        if pool is not None:
            pool.shutdown()
    return SnrGridResult(base_reset.kind, name1, values1, name2, values2,
                         tuple(o.kind for o in otps), tuple(a.upper() for a in attacker_axes),
                         tuple(cells))
