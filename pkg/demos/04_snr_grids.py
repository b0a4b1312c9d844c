"""SNR over a grid of readout errors for the reset instruction.

The sign follows M01 - M10: when preparing |1> is misread more often than
preparing |0>, leftover |1> population leaks and the SNR is positive.
"""
import numpy as np

from qleak import NO_OTP, ResetInstrParams, run_snr_grid

values = (0.0, 0.05, 0.10, 0.15)
grid = run_snr_grid(ResetInstrParams(), ("m10", values), ("m01", values), (NO_OTP,), ("Z",),
                    n_shots=2_000, n_experiments=10, master_seed=7, threads=0)

np.set_printoptions(precision=1, suppress=True, linewidth=120)
print("rows: M10, columns: M01", values)
print("empirical SNR\n", grid.table("none", "Z"))
print("theoretical SNR\n", grid.table("none", "Z", "theoretical"))
