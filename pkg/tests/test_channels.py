import itertools
import math

import numpy as np
import pytest

from qleak.channels import (
    ChannelError,
    ChoiChannel,
    KrausChannel,
    MeasurementlessParams,
    ResetInstrParams,
    ThermalParams,
    apply_channel,
    apply_choi,
    apply_kraus,
    choi_to_kraus,
    identity_channel,
    kraus_to_choi,
    measure,
    measurement_channel,
    measurementless_reset,
    random_kraus_channel,
    reset_instruction,
    thermal_relaxation,
    validate_cptp,
)
from qleak.otp import COTP, otp_average
from qleak.states import (
    X_AXIS,
    Z_AXIS,
    AxisVector,
    BlochVector,
    DensityMatrix,
    bloch_to_density,
    is_density_matrix,
    maximally_mixed,
    random_bloch_vector,
    random_density_matrix,
)

GROUND = np.array([[1, 0], [0, 0]])


def choi_blocks_apply(lam, rho):
    """E(rho) = sum_ij rho_ij E(|i><j|), reading E(|i><j|) off the Choi blocks."""
    return sum(rho[i, j] * lam[2 * i:2 * i + 2, 2 * j:2 * j + 2] for i in range(2) for j in range(2))


def rho2x(v):
    c = v.r * math.sin(v.theta) * math.cos(v.phi)
    return DensityMatrix(0.5 * np.array([[1, c], [c, 1]]))


def random_axis(rng):
    return AxisVector(math.acos(rng.uniform(-1, 1)), rng.uniform(0, 2 * math.pi))


class TestKraus:
    def test_identity(self, rng):
        rho = random_density_matrix(2, rng)
        assert apply_kraus(identity_channel(), rho).close_to(rho)

    def test_perfect_reset(self, rng):
        ch = KrausChannel([GROUND, [[0, 1], [0, 0]]])
        for _ in range(20):
            assert apply_kraus(ch, random_density_matrix(2, rng)).close_to(GROUND)

    def test_incomplete_set_rejected(self):
        with pytest.raises(ChannelError):
            KrausChannel([0.5 * np.eye(2)])

    def test_matches_choi_form(self, rng):
        for _ in range(1000):
            ch = random_kraus_channel(rng, n_ops=int(rng.integers(1, 5)))
            rho = random_density_matrix(2, rng)
            assert apply_kraus(ch, rho).close_to(apply_choi(kraus_to_choi(ch), rho), 1e-10)

    def test_choi_to_kraus_round_trip(self, rng):
        for _ in range(100):
            ch = random_kraus_channel(rng)
            back = kraus_to_choi(choi_to_kraus(kraus_to_choi(ch)))
            assert np.abs(back.choi - kraus_to_choi(ch).choi).max() <= 1e-10


class TestChoi:
    def test_identity_choi(self, rng):
        lam = sum(np.kron(e, e) for e in (
            np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]]),
            np.array([[0, 0], [1, 0]]), np.array([[0, 0], [0, 1]])))
        rho = random_density_matrix(2, rng)
        assert apply_choi(ChoiChannel(lam), rho).close_to(rho)

    def test_partial_trace_form_matches_blocks(self, rng):
        for _ in range(100):
            lam = kraus_to_choi(random_kraus_channel(rng)).choi
            rho = random_density_matrix(2, rng)
            assert apply_choi(ChoiChannel(lam), rho).close_to(choi_blocks_apply(lam, rho.matrix), 1e-12)

    def test_non_tp_rejected(self):
        with pytest.raises(ChannelError):
            ChoiChannel(np.eye(4))


class TestThermal:
    def test_zero_exponents_is_identity(self, rng):
        ch = thermal_relaxation(ThermalParams(0, 0))
        for _ in range(20):
            rho = random_density_matrix(2, rng)
            assert apply_choi(ch, rho).close_to(rho, 1e-12)

    def test_full_relaxation(self, rng):
        ch = thermal_relaxation(ThermalParams(1e3, 1e3, p0=1))
        for _ in range(20):
            assert apply_choi(ch, random_density_matrix(2, rng)).close_to(GROUND, 1e-10)

    def test_matrix_entries(self):
        lam = thermal_relaxation(ThermalParams(0.8, 1.3, p0=0.9)).choi
        a = 1 - math.exp(-0.8)
        assert lam[0, 0] == pytest.approx(1 - 0.1 * a)
        assert lam[1, 1] == pytest.approx(0.1 * a)
        assert lam[2, 2] == pytest.approx(0.9 * a)
        assert lam[3, 3] == pytest.approx(1 - 0.9 * a)
        assert lam[0, 3] == lam[3, 0] == pytest.approx(math.exp(-1.3))

    def test_closed_form_on_bloch_states(self, rng):
        for _ in range(200):
            g2 = rng.uniform(0, 3)
            g1 = rng.uniform(0, 2 * g2)
            v = random_bloch_vector(rng)
            r, t, f = v.r, v.theta, v.phi
            e1, e2 = math.exp(-g1), math.exp(-g2)
            expected = 0.5 * np.array([
                [2 - e1 * (1 - r * math.cos(t)), e2 * np.exp(-1j * f) * r * math.sin(t)],
                [e2 * np.exp(1j * f) * r * math.sin(t), e1 * (1 - r * math.cos(t))],
            ])
            out = apply_choi(thermal_relaxation(ThermalParams(g1, g2)), bloch_to_density(v))
            assert out.close_to(expected, 1e-12)

    def test_closed_form_on_padded_state(self, rng):
        ch = thermal_relaxation(ThermalParams(2.5, 2.5))
        e = math.exp(-2.5)
        for _ in range(50):
            v = random_bloch_vector(rng)
            c = v.r * math.sin(v.theta) * math.cos(v.phi)
            expected = 0.5 * np.array([[2 - e, e * c], [e * c, e]])
            assert apply_choi(ch, rho2x(v)).close_to(expected, 1e-12)

    def test_padded_excited_probability(self, rng):
        ch = thermal_relaxation(ThermalParams(2.5, 2.5))
        for _ in range(10):
            p = measure(apply_choi(ch, rho2x(random_bloch_vector(rng))), Z_AXIS).p_minus
            assert p == pytest.approx(0.041042499311949, abs=1e-12)

    def test_from_times(self):
        p = ThermalParams.from_times(250e-9, 100e-9, 100e-9)
        assert (p.gamma1, p.gamma2) == pytest.approx((2.5, 2.5))

    def test_t2_bound(self):
        with pytest.raises(ChannelError, match="2\\*gamma2"):
            ThermalParams(2.1, 1.0)
        ThermalParams(2.0, 1.0)

    def test_bad_populations(self):
        with pytest.raises(ChannelError):
            ThermalParams(1, 1, p0=0.9, p1=0.2)


class TestResetInstruction:
    @staticmethod
    def fused(rho, m10, m01, p_bf):
        r00, r11 = rho[0, 0].real, rho[1, 1].real
        zero = r00 * ((1 - m10) + m10 * p_bf) + r11 * (1 - m01) * (1 - p_bf)
        one = r00 * m10 * (1 - p_bf) + r11 * (m01 + (1 - m01) * p_bf)
        return np.diag([zero, one])

    def test_perfect_reset(self, rng):
        ch = reset_instruction(ResetInstrParams())
        for _ in range(20):
            assert apply_kraus(ch, random_density_matrix(2, rng)).close_to(GROUND, 1e-12)

    def test_composition_matches_fused_formula(self, rng):
        for _ in range(500):
            m10, m01, p_bf = rng.uniform(0, 1, size=3)
            rho = random_density_matrix(2, rng)
            out = apply_kraus(reset_instruction(ResetInstrParams(m10, m01, p_bf)), rho)
            assert out.close_to(self.fused(rho.matrix, m10, m01, p_bf), 1e-12)

    def test_padded_probability_is_victim_independent(self, rng):
        ch = reset_instruction(ResetInstrParams(0.05, 0.10, 0.0))
        for _ in range(50):
            p = measure(apply_kraus(ch, rho2x(random_bloch_vector(rng))), Z_AXIS).p_minus
            assert p == pytest.approx(0.075, abs=1e-12)

    def test_unpadded_extremes(self):
        ch = reset_instruction(ResetInstrParams(0.05, 0.10, 0.0))
        assert measure(apply_kraus(ch, DensityMatrix(GROUND)), Z_AXIS).p_minus == pytest.approx(0.05, abs=1e-12)
        excited = DensityMatrix([[0, 0], [0, 1]])
        assert measure(apply_kraus(ch, excited), Z_AXIS).p_minus == pytest.approx(0.10, abs=1e-12)

    def test_zero_error_resets_to_any_axis(self, rng):
        for _ in range(50):
            m = random_axis(rng)
            ch = reset_instruction(ResetInstrParams(axis=m))
            target = np.outer(m.ket, m.ket.conj())
            assert apply_kraus(ch, random_density_matrix(2, rng)).close_to(target, 1e-12)

    def test_rejects_bad_probability(self):
        with pytest.raises(ChannelError):
            ResetInstrParams(m10=1.5)


class TestMeasurementless:
    def test_full_reset(self, rng):
        ch = measurementless_reset(MeasurementlessParams(0.0))
        assert apply_kraus(ch, random_density_matrix(2, rng)).close_to(GROUND, 1e-12)

    def test_keep(self, rng):
        rho = random_density_matrix(2, rng)
        assert apply_kraus(measurementless_reset(MeasurementlessParams(1.0)), rho).close_to(rho, 1e-12)

    def test_excited_leak(self):
        out = apply_kraus(measurementless_reset(MeasurementlessParams(0.1)), DensityMatrix([[0, 0], [0, 1]]))
        assert measure(out, Z_AXIS).p_minus == pytest.approx(0.1, abs=1e-12)

    def test_closed_form(self, rng):
        for _ in range(100):
            p_r = rng.uniform()
            v = random_bloch_vector(rng)
            r, t, f = v.r, v.theta, v.phi
            expected = 0.5 * np.array([
                [2 - p_r * (1 - r * math.cos(t)), p_r * r * np.exp(-1j * f) * math.sin(t)],
                [p_r * r * np.exp(1j * f) * math.sin(t), p_r * (1 - r * math.cos(t))],
            ])
            out = apply_kraus(measurementless_reset(MeasurementlessParams(p_r)), bloch_to_density(v))
            assert out.close_to(expected, 1e-12)

    def test_equals_isotropic_thermal(self, rng):
        for p_r in np.linspace(0, 1, 11):
            g = -math.log(p_r) if p_r > 0 else math.inf
            thermal = thermal_relaxation(ThermalParams(g, g))
            ml = measurementless_reset(MeasurementlessParams(p_r))
            for _ in range(20):
                rho = random_density_matrix(2, rng)
                assert apply_kraus(ml, rho).close_to(apply_choi(thermal, rho), 1e-10)


class TestValidateCptp:
    def test_identity(self):
        r = validate_cptp(identity_channel())
        assert r.passed and r.worst_residual < 1e-15

    def test_incomplete(self):
        r = validate_cptp(KrausChannel([0.5 * np.eye(2)], check=False))
        assert not r.passed
        assert r.completeness_residual == pytest.approx(0.75)

    def test_non_cp_choi(self):
        # the transpose map is trace preserving but not completely positive
        swap = np.eye(4)[[0, 2, 1, 3]]
        r = validate_cptp(ChoiChannel(swap, check=False))
        assert r.trace_preservation_residual <= 1e-15
        assert not r.passed and r.min_choi_eigenvalue == pytest.approx(-1)

    def test_builtin_grids(self):
        grid = np.linspace(0, 1, 5)
        channels = []
        for g1, g2 in itertools.product(np.linspace(0, 4, 5), repeat=2):
            if g1 <= 2 * g2:
                channels.append(thermal_relaxation(ThermalParams(g1, g2)))
        for m10, m01 in itertools.product(grid, grid):
            channels.append(reset_instruction(ResetInstrParams(m10, m01, 0.2)))
        for p_r, _ in itertools.product(grid, grid):
            channels.append(measurementless_reset(MeasurementlessParams(p_r)))
        for ch in channels:
            assert validate_cptp(ch).worst_residual <= 1e-10


def test_builtin_channels_preserve_validity(rng):
    for _ in range(300):
        g2 = rng.uniform(0, 4)
        chans = [
            thermal_relaxation(ThermalParams(rng.uniform(0, 2 * g2), g2, p0=rng.uniform())),
            reset_instruction(ResetInstrParams(*rng.uniform(size=3), axis=random_axis(rng))),
            measurementless_reset(MeasurementlessParams(rng.uniform())),
        ]
        rho = random_density_matrix(2, rng)
        for ch in chans:
            assert is_density_matrix(apply_channel(ch, rho).matrix)


class TestMeasure:
    def test_mixed(self, rng):
        for _ in range(10):
            m = measure(maximally_mixed(), random_axis(rng))
            assert (m.p_plus, m.p_minus) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_ground_along_z(self):
        m = measure(DensityMatrix(GROUND), Z_AXIS)
        assert (m.p_plus, m.p_minus) == (1.0, 0.0)
        assert m.collapsed_plus.close_to(GROUND)
        assert m.collapsed_minus.close_to([[0, 0], [0, 1]])

    def test_cotp_pure_state_along_x(self, rng):
        for _ in range(50):
            t, f = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
            padded = otp_average(COTP, bloch_to_density(BlochVector(1, t, f)))
            assert measure(padded, X_AXIS).p_plus == pytest.approx(0.5 * (1 + math.sin(t) * math.cos(f)), abs=1e-12)

    def test_probabilities_sum_to_one(self, rng):
        for _ in range(100):
            m = measure(random_density_matrix(2, rng), random_axis(rng))
            assert abs(m.p_plus + m.p_minus - 1) <= 1e-12

    def test_cotp_hides_axes_perpendicular_to_pad(self, rng):
        for _ in range(200):
            n = random_axis(rng)
            scheme = type(COTP)("cotp", x_axis=n)
            rho = otp_average(scheme, random_density_matrix(2, rng))
            # random axis in the plane perpendicular to n
            u = np.cross(n.cartesian, rng.normal(size=3))
            u /= np.linalg.norm(u)
            perp = AxisVector(math.acos(np.clip(u[2], -1, 1)), math.atan2(u[1], u[0]) % (2 * math.pi))
            assert measure(rho, perp).p_plus == pytest.approx(0.5, abs=1e-10)

    def test_measurement_channel_dephases(self):
        rho = bloch_to_density(BlochVector(1, math.pi / 2, 0))
        assert apply_kraus(measurement_channel(Z_AXIS), rho).close_to(np.eye(2) / 2)
