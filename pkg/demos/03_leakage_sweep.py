"""Sweep the victim angle and watch the attacker's P(-1).

The victim prepares R_x(alpha)|0>, measures, and the reset hands whatever
is left to the attacker. Without a pad P(-1) tracks alpha; with a pad the
Z-axis curve goes flat.
"""
from qleak import (
    COTP,
    NO_OTP,
    DEFAULT_ALPHAS,
    ExperimentConfig,
    ResetInstrParams,
    run_sweep,
    snr_empirical,
)
from qleak.experiment import sweep_snr_theoretical

reset = ResetInstrParams(0.05, 0.10)
print("alpha/pi  " + "  ".join(f"{a / 3.141592653589793:5.3f}" for a in DEFAULT_ALPHAS))
for otp in (NO_OTP, COTP):
    cfg = ExperimentConfig(alpha=0.0, reset=reset, otp=otp, n_shots=10_000, n_experiments=10,
                           master_seed=2023)
    sw = run_sweep(cfg, DEFAULT_ALPHAS, threads=0)
    print(f"{otp.kind:>8}  " + "  ".join(f"{p:5.3f}" for p in sw.mean_exp))
    print(f"{'':>8}  SNR empirical {snr_empirical(sw):7.2f}, theoretical {sweep_snr_theoretical(cfg):7.2f}")
