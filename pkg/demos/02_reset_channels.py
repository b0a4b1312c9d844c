"""Three imperfect resets, and how much of the old state survives each.

Each channel is validated as CPTP and applied to |1>, the state that a
perfect reset would have to flip.
"""
import numpy as np

from qleak.channels import (
    MeasurementlessParams,
    ResetInstrParams,
    ThermalParams,
    apply_channel,
    as_kraus,
    validate_cptp,
)
from qleak.states import pure_state

one = pure_state([0, 1])
resets = {
    "thermal, 250 ns idle, T1 = T2 = 100 ns": ThermalParams.from_times(250.0, 100.0, 100.0),
    "reset instruction, M10 = 0.05, M01 = 0.10": ResetInstrParams(0.05, 0.10),
    "measurement-less, p_r = 0.1": MeasurementlessParams(0.1),
}

for label, params in resets.items():
    ch = params.channel()
    report = validate_cptp(ch)
    out = apply_channel(ch, one).matrix
    print(label)
    print(f"  CPTP: {report.passed} (worst residual {report.worst_residual:.1e}), "
          f"{len(as_kraus(ch).kraus_ops)} Kraus operators")
    print(f"  |1> after reset: P(1) = {out[1, 1].real:.6f}")

print("\nthermal P(1) is exp(-2.5) =", np.exp(-2.5))
