# tests/test_controller.py
import numpy as np
import pytest

from stefanctl.core.controller import (
    characteristic_polynomial_2nd,
    check_gains_2nd,
    check_gains_3rd,
    closed_loop_eigenvalues,
    control_2nd,
    control_3rd,
    control_law,
    gain_input_product,
    is_hurwitz,
    kernel_k,
    kernel_phi,
    system_matrices,
)
from stefanctl.core.controller.gains import BRANCH_SETPOINT
from stefanctl.core.model import initial_state
from stefanctl.models.common import CheckStatus
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import PhysicalParams
from stefanctl.utils.exceptions import ValidationError

from conftest import ALPHA, BETA, K_ZINC


@pytest.fixture
def unit_beta() -> PhysicalParams:
    return PhysicalParams(alpha=1e-5, beta=1.0, k_cond=1.0, t_melt=0.0, length=1.0, epsilon=20.0)


class TestKernels:
    def test_phi_vanishes_at_origin(self, gains2, params2):
        np.testing.assert_array_equal(kernel_phi(0.0, gains2, params2), [0.0, 0.0])

    def test_phi_value(self, unit_beta):
        gains = ControlGains(c1=0.1, c2=0.2, s_r=0.2)
        np.testing.assert_allclose(kernel_phi(0.5, gains, unit_beta), [0.05, 2.0])

    def test_phi_slope_is_gain_vector(self, gains2, params2):
        x = np.array([0.0, 0.3])
        phi = kernel_phi(x, gains2, params2)
        np.testing.assert_allclose((phi[1] - phi[0]) / 0.3, gains2.gain_vector(params2))

    def test_gain_input_product(self, gains2, params2, gains3, params3):
        assert gain_input_product(gains2, params2) == pytest.approx(-0.2, rel=1e-12)
        assert gain_input_product(gains3, params3) == pytest.approx(-0.25, rel=1e-12)

    def test_k_closed_form(self, unit_beta):
        gains = ControlGains(c1=0.1, c2=0.2, s_r=0.2)
        assert kernel_k(0.0, gains, unit_beta) == 0.0
        assert kernel_k(0.1, gains, unit_beta) == pytest.approx(2000.0)
        assert kernel_k(0.2, gains, unit_beta) == pytest.approx(2.0 * kernel_k(0.1, gains, unit_beta))

    def test_third_order_matrices(self, params3):
        matrices = system_matrices(params3)
        assert matrices.A.shape == (3, 3)
        assert matrices.B[-1] == pytest.approx(-BETA / 100.0)

    def test_missing_c3(self, params3):
        with pytest.raises(ValidationError) as err:
            ControlGains(c1=0.1, c2=0.2, s_r=0.2).gain_vector(params3)
        assert err.value.error_code == "MISSING_GAIN"


class TestClosedLoop:
    def test_eigenvalues_match_characteristic_polynomial(self, gains2, params2):
        eig = np.sort(closed_loop_eigenvalues(gains2, params2).real)
        roots = np.sort(np.roots(characteristic_polynomial_2nd(gains2, params2)).real)
        np.testing.assert_allclose(eig, roots, rtol=1e-10)
        assert is_hurwitz(gains2, params2)

    def test_third_order_hurwitz(self, gains3, params3):
        assert is_hurwitz(gains3, params3)


class TestControlLaws:
    def test_initial_flux(self, data2, params2, gains2):
        state = initial_state(data2, params2, 128, 2)
        qc = control_2nd(state, params2, gains2)
        expected = -(K_ZINC * 0.2 / ALPHA) * 0.5 + (K_ZINC / BETA) * 0.1 * 0.1
        assert qc == pytest.approx(expected, rel=1e-12)
        assert qc == pytest.approx(7.1e6, rel=0.01)

    def test_zero_at_setpoint(self, params2):
        from stefanctl.models.physical import InitialData, LinearProfile
        data = InitialData(s0=0.2, profile=LinearProfile(surplus=0.0))
        state = initial_state(data, params2, 32, 2)
        assert control_2nd(state, params2, ControlGains(c1=0.1, c2=0.2, s_r=0.2)) == 0.0

    def test_third_order_flux(self, data3, params3, gains3):
        state = initial_state(data3, params3, 64, 3)
        qc = control_3rd(state, params3, gains3)
        expected = -(K_ZINC * 0.25 / ALPHA) * 0.5 + (K_ZINC / BETA) * 0.1 * 0.1
        assert qc == pytest.approx(expected, rel=1e-12)
        assert control_law(state, params3, gains3) == qc

    def test_third_order_needs_acceleration(self, data2, params3, gains3):
        state = initial_state(data2.model_copy(update={"a0": 0.0}), params3, 16, 3)
        state = state.model_copy(update={"s_ddot": None})
        with pytest.raises(ValidationError) as err:
            control_3rd(state, params3, gains3)
        assert err.value.error_code == "MISSING_ACCELERATION"


class TestGainChecks:
    def test_reference_gains(self, gains2, data2, params2):
        report = check_gains_2nd(gains2, data2, params2)
        assert report.assumption3_ok
        assert report.assumption4_ok
        assert report.hurwitz_ok
        assert report.branch == BRANCH_SETPOINT
        # the stability condition is not met by these gains
        assert report.c2_barbar == pytest.approx(2.838e-4, rel=1e-3)
        assert not report.theorem_cond_ok

    def test_equal_gains_meet_stability_condition(self, data2, params2):
        report = check_gains_2nd(ControlGains(c1=0.1, c2=0.1, s_r=0.2), data2, params2)
        assert report.theorem_cond_ok
        assert report.assumption4_ok

    def test_c2_below_c1(self, data2, params2):
        report = check_gains_2nd(ControlGains(c1=0.2, c2=0.1, s_r=0.2), data2, params2)
        assert not report.assumption4_ok
        assert report.assumption4.status == CheckStatus.VIOLATED

    def test_low_setpoint(self, data2, params2):
        report = check_gains_2nd(ControlGains(c1=0.1, c2=0.2, s_r=0.1), data2, params2)
        assert not report.assumption3_ok
        assert report.assumption4 is None

    def test_third_order_window(self, gains3, data3, params3):
        report = check_gains_3rd(gains3, data3, params3)
        assert report.assumption6_ok
        assert report.assumption7_ok
        assert report.assumption8_ok
        assert report.c3_upper.bound == pytest.approx(0.3)

    def test_third_order_c3_outside_window(self, data3, params3):
        report = check_gains_3rd(ControlGains(c1=0.1, c2=0.2, c3=0.5, s_r=0.2), data3, params3)
        assert not report.assumption8_ok
        assert report.c3_upper.status == CheckStatus.VIOLATED
        assert report.c3_upper.margin == pytest.approx(-0.2)
