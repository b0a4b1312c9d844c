"""Density-matrix simulation of state leakage across qubit resets, with one-time pad mitigation."""
from .states import (
    AxisVector,
    BlochVector,
    DensityMatrix,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    bloch_to_density,
    density_to_bloch,
    partial_trace_first,
    tensor,
)
from .gates import Gate, apply_gate, generalized_pauli_x, hadamard, pauli, rotation_x
from .channels import (
    ChoiChannel,
    KrausChannel,
    MeasurementlessParams,
    ResetInstrParams,
    ThermalParams,
    apply_channel,
    apply_choi,
    apply_kraus,
    measure,
    measurementless_reset,
    reset_instruction,
    thermal_relaxation,
    validate_cptp,
)
from .otp import COTP, NO_OTP, QOTP, OtpKey, OtpScheme, otp_average, otp_decrypt, otp_keyed
from .analytic import LeakageFormulaInput, p_minus, snr_theoretical
from .experiment import (
    DEFAULT_ALPHAS,
    ExperimentConfig,
    SweepResult,
    run_shot,
    run_snr_grid,
    run_sweep,
    snr_empirical,
)

__version__ = "0.1.0"
