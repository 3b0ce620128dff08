# tests/test_analysis.py
import numpy as np
import pytest

from stefanctl.core.analysis import (
    backstepping_transform,
    cbf_chain,
    certify,
    energy_balance,
    lambda_certificate,
    lyapunov_decay,
    lyapunov_values,
    observed_order,
    richardson_extrapolate,
    safety_monitor,
    solve_P,
    stored_energy,
    target_boundary_residuals,
)
from stefanctl.core.analysis.lyapunov import positivity_sides
from stefanctl.core.controller import control_2nd
from stefanctl.core.model import initial_state
from stefanctl.core.model.quadrature import trapezoid
from stefanctl.core.solver import simulate
from stefanctl.models.common import ControllerMode
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import InitialData, LinearProfile, PhysicalParams
from stefanctl.models.reports import TransformedState
from stefanctl.models.solver import ControllerConfig, QcSchedule, SolverConfig
from stefanctl.models.state import SimState
from stefanctl.utils.exceptions import ValidationError

from conftest import ALPHA, BETA, K_ZINC, T_MELT


def _params(eps: float, alpha: float = 1e-2, beta: float = 1e-4) -> PhysicalParams:
    return PhysicalParams(alpha=alpha, beta=beta, k_cond=1.0, t_melt=0.0, length=1.0, epsilon=eps)


def _random_tuples(count: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        c1 = rng.uniform(0.05, 0.5)
        c2 = c1 + rng.uniform(0.0, 1.0)
        eps = rng.uniform(1.0, 20.0)
        alpha = 10.0 ** rng.uniform(-2.0, 0.0)
        s_r = rng.uniform(0.1, 0.3)
        yield ControlGains(c1=c1, c2=c2, s_r=s_r), _params(eps, alpha=alpha)


class TestSolveP:
    def test_closed_form_example(self):
        # d1 = c1/eps = 1 and d2 = 1/eps + c2 = 1
        cert = solve_P(ControlGains(c1=1.0, c2=0.0, s_r=0.1), _params(1.0), 1.0, 1.0)
        np.testing.assert_allclose(cert.P, 0.5 * np.array([[3.0, 1.0], [1.0, 2.0]]), rtol=1e-14)
        assert cert.lyap_ineq_ok
        assert cert.residual_max_eig <= 1e-10

    def test_linear_in_lambda1(self):
        gains, params = ControlGains(c1=0.3, c2=0.5, s_r=0.1), _params(2.0)
        one = solve_P(gains, params, 1.0, 4.0)
        three = solve_P(gains, params, 3.0, 4.0)
        np.testing.assert_allclose(three.P, 3.0 * one.P, rtol=1e-14)
        np.testing.assert_array_equal(solve_P(gains, params, 0.0, 4.0).P, 0.0)

    def test_degenerate_gains(self):
        with pytest.raises(ValidationError) as err:
            solve_P(ControlGains(c1=0.1, c2=-0.5, s_r=0.1), _params(2.0))
        assert err.value.error_code == "DEGENERATE_GAINS"

    def test_negative_weights(self, gains2, params2):
        with pytest.raises(ValidationError):
            solve_P(gains2, params2, -1.0, 1.0)

    def test_random_tuples_solve_lyapunov_equation(self):
        for gains, params in _random_tuples(50):
            cert = solve_P(gains, params, 1.0, 10.0)
            assert cert.residual_max_eig <= 1e-10
            assert cert.p_min_eig > 0.0
            np.testing.assert_array_equal(cert.P, cert.P.T)

    def test_third_order_numeric_solution(self, gains3, params3):
        cert = solve_P(gains3, params3, 1.0, 1.0)
        assert cert.P.shape == (3, 3)
        assert cert.lyap_ineq_ok


class TestLambdaCertificate:
    def test_equal_gains_give_scaled_weights(self):
        gains, params = ControlGains(c1=0.2, c2=0.2, s_r=0.2), _params(5.0)
        cert = lambda_certificate(solve_P(gains, params, 1.0, 10.0), gains, params)
        np.testing.assert_allclose(cert.S, 0.0, atol=1e-20 * (gains.c1 / params.beta) ** 2)
        first, second = cert.Lambda[0, 0] / cert.Q[0, 0], cert.Lambda[1, 1] / cert.Q[1, 1]
        assert first > 0.0
        assert second == pytest.approx(first, rel=1e-12)
        assert cert.lambda_pd_ok

    def test_singular_weights(self, gains2, params2):
        with pytest.raises(ValidationError) as err:
            lambda_certificate(solve_P(gains2, params2, 0.0, 0.0), gains2, params2)
        assert err.value.error_code == "SINGULAR_Q"

    def test_positivity_side_monotone_and_bounded(self):
        for gains, params in _random_tuples(20, seed=3):
            d2 = 1.0 / params.epsilon + gains.c2
            sides = [positivity_sides(gains, params, 10.0 ** p)[0] for p in range(9)]
            assert all(b >= a for a, b in zip(sides, sides[1:]))
            assert sides[-1] <= d2 ** 2

    def test_definiteness_matches_positivity_sides(self):
        for gains, params in _random_tuples(50, seed=11):
            for kappa2 in (1.0, 1e3, 1e6):
                cert = lambda_certificate(solve_P(gains, params, 1.0, kappa2), gains, params)
                if abs(cert.positivity_lhs - cert.positivity_rhs) > 1e-6 * max(cert.positivity_lhs, cert.positivity_rhs):
                    assert cert.lambda_pd_ok == (cert.positivity_lhs > cert.positivity_rhs)

    def test_limit_condition_implies_positive_certificate(self):
        checked = 0
        for gains, params in _random_tuples(200, seed=5):
            report = certify(gains, params)
            d2 = 1.0 / params.epsilon + gains.c2
            if report.best.positivity_rhs < 0.95 * d2 ** 2:
                assert report.positivity_limit_ok
                assert report.lambda_pd_found
                checked += 1
        assert checked > 0

    def test_quadratic_form_positive(self):
        rng = np.random.default_rng(1)
        for gains, params in _random_tuples(20, seed=2):
            cert = certify(gains, params).best
            if cert.lambda_pd_ok:
                X = rng.normal(size=(100, 2))
                assert np.all(np.einsum("ij,jk,ik->i", X, cert.Lambda, X) > 0.0)

    def test_weight_scale_invariance(self, params2):
        gains = ControlGains(c1=0.1, c2=0.1, s_r=0.2)
        one = lambda_certificate(solve_P(gains, params2, 1.0, 100.0), gains, params2)
        five = lambda_certificate(solve_P(gains, params2, 5.0, 100.0), gains, params2)
        np.testing.assert_allclose(one.Lambda, five.Lambda, rtol=1e-10)
        assert one.lambda_pd_ok == five.lambda_pd_ok

    def test_third_order_sufficient_case(self, params3):
        gains = ControlGains(c1=0.1, c2=0.1, c3=0.1, s_r=0.2)
        report = certify(gains, params3)
        assert report.sufficient_case
        assert report.lambda_pd_found
        np.testing.assert_allclose(report.best.S, 0.0, atol=1e-20 * (gains.c1 / BETA) ** 2)


class TestTransform:
    def test_equilibrium_maps_to_zero(self, params2):
        state = SimState(t=0.0, xi_grid=np.linspace(0, 1, 33), temp=np.full(33, T_MELT), s=0.2, s_dot=0.0)
        transformed = backstepping_transform(state, ControlGains(c1=0.1, c2=0.2, s_r=0.2), params2)
        np.testing.assert_array_equal(transformed.w, 0.0)
        np.testing.assert_allclose(transformed.w_x, 0.0, atol=1e-12)

    def test_interface_value_vanishes(self, data2, params2, gains2):
        state = initial_state(data2, params2, 64, 2)
        transformed = backstepping_transform(state, gains2, params2)
        w_end, _ = target_boundary_residuals(transformed)
        assert w_end == 0.0

    def test_boundary_derivative_vanishes_under_control(self, params2):
        s, amplitude, s_dot = 0.1, 1000.0, 1e-5
        gains = ControlGains(c1=0.1, c2=0.2, s_r=0.15)
        xi = np.linspace(0.0, 1.0, 65)
        temp = T_MELT + amplitude * s ** 2 * (1.0 - xi ** 2)
        state = SimState(t=0.0, xi_grid=xi, temp=temp, s=s, s_dot=s_dot)
        # choose the setpoint that makes the control law return zero flux (u_x(0) = 0)
        heat = trapezoid(temp - T_MELT, xi * s)
        s_r = s + (BETA / ALPHA) * (gains.c2 / gains.c1) * heat + (gains.c2 / gains.c1) * params2.epsilon * s_dot
        gains = gains.model_copy(update={"s_r": s_r})
        assert control_2nd(state, params2, gains) == pytest.approx(0.0, abs=1e-6)
        transformed = backstepping_transform(state, gains, params2)
        scale = gains.c2 / ALPHA * heat
        assert abs(transformed.w_x[0]) <= 1e-9 * scale


class TestLyapunovValues:
    def test_equilibrium(self):
        transformed = TransformedState(x=np.linspace(0, 0.2, 11), w=np.zeros(11), w_x=np.zeros(11), X=np.zeros(2))
        values = lyapunov_values(transformed, None, 0.2)
        assert values.Phi == 0.0

    def test_constant_field(self, gains2, params2):
        cert = solve_P(gains2, params2)
        s, c, s_r = 0.1, 3.0, 0.2
        transformed = TransformedState(x=np.linspace(0, s, 11), w=np.full(11, c), w_x=np.zeros(11), X=np.zeros(2))
        values = lyapunov_values(transformed, cert, s_r)
        assert values.V == pytest.approx(3.0 / (4.0 * s_r ** 2) * c ** 2 * s, rel=1e-12)
        assert values.Phi == pytest.approx(c ** 2 * s, rel=1e-12)

    def test_decay_fit(self):
        t = np.linspace(0.0, 10.0, 101)
        decay = lyapunov_decay(t, 2.0 * np.exp(-0.5 * t))
        assert decay.rate == pytest.approx(-0.5, rel=1e-9)
        assert decay.monotone

    def test_growth_flagged(self):
        t = np.linspace(0.0, 1.0, 11)
        decay = lyapunov_decay(t, np.exp(t))
        assert decay.rate > 0.0
        assert not decay.monotone


class TestSafetyAndEnergy:
    def _relaxation_run(self, params2, v0=1e-4, qc=0.0, surplus=0.0):
        data = InitialData(s0=0.1, v0=v0, profile=LinearProfile(surplus=surplus))
        controller = ControllerConfig(mode=ControllerMode.OPEN_LOOP, schedule=QcSchedule(values=[qc]))
        return data, simulate(data, params2, None, SolverConfig(nx=32, dt=0.5, t_final=50.0), 2, controller=controller)

    def test_relaxation_is_safe(self, params2):
        data, trajectory = self._relaxation_run(params2)
        report = safety_monitor(trajectory, data, params2)
        assert report.all_satisfied
        assert report.implication_holds
        assert report.gronwall.satisfied
        assert report.gronwall.worst_margin >= 0.0

    def test_interface_gradient_margin(self, params2):
        data, trajectory = self._relaxation_run(params2, surplus=10.0, qc=0.0)
        report = safety_monitor(trajectory, data, params2)
        verdict = report.constraints["tx_nonpos"]
        assert verdict.satisfied
        assert np.all(trajectory.tx_interface <= 1e-6)
        assert trajectory.flags["tx_nonpos"].all()

    def test_positive_interface_gradient_is_flagged(self, params2):
        data, trajectory = self._relaxation_run(params2)
        tx = np.array(trajectory.tx_interface, copy=True)
        tx[10:] = 1e-3
        report = safety_monitor(trajectory.model_copy(update={"tx_interface": tx}), data, params2)
        verdict = report.constraints["tx_nonpos"]
        assert not verdict.satisfied
        assert verdict.first_violation_time == pytest.approx(trajectory.t[10])
        assert verdict.worst_margin == pytest.approx(1e-6 - 1e-3)
        assert not report.all_satisfied
        # not one of the conclusions that nonnegative flux has to deliver
        assert report.implication_holds

    def test_setpoint_bound_uses_gains(self, params2):
        data, trajectory = self._relaxation_run(params2)
        low = ControlGains(c1=0.1, c2=0.1, s_r=0.1001)
        report = safety_monitor(trajectory, data, params2, low)
        assert not report.constraints["s_bounds"].satisfied
        assert report.constraints["s_bounds"].first_violation_time > 0.0
        # qc = 0 throughout, so the failed bound breaks the implication
        assert not report.implication_holds

    def test_flipped_control_is_caught(self, data2, params2, gains2):
        cfg = SolverConfig(nx=32, dt=1.0, t_final=200.0)
        controller = ControllerConfig(flip_sign=True)
        trajectory = simulate(data2, params2, gains2, cfg, 2, controller=controller)
        report = safety_monitor(trajectory, data2, params2, gains2)
        assert not report.all_satisfied
        assert not report.constraints["qc_nonneg"].satisfied
        assert report.constraints["qc_nonneg"].first_violation_time == 0.0
        assert not trajectory.completed
        assert report.implication_holds

    def test_stored_energy(self, data2, params2):
        state = initial_state(data2, params2, 32, 2)
        expected = K_ZINC / ALPHA * 0.5 + K_ZINC / BETA * 0.1
        assert stored_energy(state, params2) == pytest.approx(expected, rel=1e-12)

    def test_energy_balance_at_rest(self, params2):
        _, trajectory = self._relaxation_run(params2, v0=0.0)
        assert energy_balance(trajectory).max < 1e-6

    def test_energy_balance_under_heating(self, params2):
        surplus = 10.0
        _, trajectory = self._relaxation_run(params2, v0=BETA * surplus / 0.1, qc=K_ZINC * surplus / 0.1,
                                             surplus=surplus)
        balance = energy_balance(trajectory)
        assert balance.max < 1e-2 * K_ZINC * surplus / 0.1


class TestCbf:
    def test_chain_at_rest(self, params3):
        state = SimState(t=0.0, xi_grid=np.linspace(0, 1, 17), temp=np.full(17, T_MELT), s=0.1, s_dot=0.0,
                         s_ddot=0.0)
        values = cbf_chain(state, params3)
        assert (values.h1, values.h2) == (0.0, 0.0)

    def test_chain_values(self, params3):
        state = SimState(t=0.0, xi_grid=np.linspace(0, 1, 17), temp=np.full(17, T_MELT), s=0.1, s_dot=2e-5,
                         s_ddot=-1e-6)
        assert cbf_chain(state, params3).h2 == pytest.approx(10.0 * -1e-6 + 2e-5)

    def test_second_order_rejected(self, params2):
        state = SimState(t=0.0, xi_grid=np.linspace(0, 1, 17), temp=np.full(17, T_MELT), s=0.1, s_dot=0.0)
        with pytest.raises(ValidationError):
            cbf_chain(state, params2)


class TestConvergence:
    def test_second_order_sequence(self):
        assert observed_order([1.0 + 1.0, 1.0 + 0.25, 1.0 + 0.0625]) == pytest.approx(2.0, rel=1e-12)

    def test_undefined(self):
        assert observed_order([1.0, 1.0, 1.0]) is None
        assert observed_order([1.0, 2.0]) is None

    def test_extrapolation(self):
        assert richardson_extrapolate([1.25, 1.0625], 2.0) == pytest.approx(1.0)
