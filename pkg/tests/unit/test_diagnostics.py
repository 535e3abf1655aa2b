# -*- coding: utf-8 -*-
"""
Saddle Flow 诊断单元测试
"""

import math

import numpy as np
import pytest

from saddle_flow.diagnostics import (
    CASE_HIGH,
    CASE_LOW,
    CSV_COLUMNS,
    CenterError,
    CheckStatus,
    HypothesisGroup,
    MissingAnchorError,
    check_center_bounds,
    check_hypotheses,
    cumulative_integral,
    diagnostics_row,
    dyadic_increments,
    dyadic_windows,
    energy_E,
    energy_Ehat,
    fit_rate,
    head_tail_ratio,
    lt_gap,
    oscillation_count,
    primal_dual_gap,
    residuals,
    tail_decreasing,
    tikhonov_center,
    tikhonov_center_velocity,
    total_variation,
)
from saddle_flow.dynamics import (
    DomainError,
    DynamicsParams,
    State,
    grad_x_Lt,
    grad_y_Lt,
)
from saddle_flow.problem import (
    MatrixCoupling,
    ProblemSpec,
    QuadraticFn,
    make_random_instance,
)

CENTER_PATH_PARAMS = DynamicsParams(alpha=3.0, q=0.6, s=0.4, p=0.9, c=5.0, gamma=0.8, t0=1.0)


@pytest.fixture(scope="module")
def least_squares_20x50() -> ProblemSpec:
    """m = 20, n = 50 的随机最小二乘实例"""
    return make_random_instance(20, 50, seed=11)[0]


def _at_rest(problem: ProblemSpec, t: float, x: np.ndarray, y: np.ndarray) -> State:
    return State(t, x, y, np.zeros(problem.n), np.zeros(problem.m))


class TestTikhonovCenter:
    """测试 Tikhonov 中心"""

    def test_kkt_residual(self, example51, least_squares_20x50, rank_one_params):
        """测试中心满足正则化最优性条件"""
        for problem in (example51, least_squares_20x50):
            for t in (1.0, 10.0, 1e3):
                center = tikhonov_center(problem, rank_one_params, t)
                assert center.kkt_residual <= 1e-10
                gx = grad_x_Lt(problem, rank_one_params, t, center.x_t, center.y_t)
                gy = grad_y_Lt(problem, rank_one_params, t, center.x_t, center.y_t)
                assert np.linalg.norm(gx) <= 1e-10
                assert np.linalg.norm(gy) <= 1e-10

    def test_rank_one_center_is_origin(self, example51, rank_one_params):
        """测试秩一示例的中心恒为原点"""
        for t in (1.0, 100.0):
            assert tikhonov_center(example51, rank_one_params, t).norm <= 1e-12

    def test_approaches_min_norm_solution(self, least_squares_20x50):
        """测试 t 增大时中心趋于最小范数解"""
        x_bar, y_bar = least_squares_20x50.min_norm_saddle

        def distance(t: float) -> float:
            center = tikhonov_center(least_squares_20x50, CENTER_PATH_PARAMS, t)
            return float(np.hypot(
                np.linalg.norm(center.x_t - x_bar), np.linalg.norm(center.y_t - y_bar)
            ))

        assert distance(1e4) < distance(10.0)

    def test_newton_matches_closed_form(self, rank_one_params):
        """测试 Newton 求解与二次闭式解一致"""

        class Wrapped:
            def __init__(self, inner: QuadraticFn):
                self.inner = inner
                self.dim = inner.dim

            def value(self, v):
                return self.inner.value(v)

            def gradient(self, v):
                return self.inner.gradient(v)

            def hessian_vec(self, v, w):
                return self.inner.hessian_vec(v, w)

        f = QuadraticFn(np.diag([1.0, 2.0]), linear=np.array([1.0, 0.0]))
        g = QuadraticFn(np.diag([3.0]), linear=np.array([-1.0]))
        K = MatrixCoupling(np.array([[1.0, -1.0]]))
        quadratic = ProblemSpec(f=f, g=g, K=K)
        general = ProblemSpec(f=Wrapped(f), g=Wrapped(g), K=K)
        assert not general.is_quadratic

        exact = tikhonov_center(quadratic, rank_one_params, 4.0)
        newton = tikhonov_center(general, rank_one_params, 4.0)
        assert np.allclose(newton.x_t, exact.x_t, atol=1e-9)
        assert np.allclose(newton.y_t, exact.y_t, atol=1e-9)

    def test_newton_stops_when_line_search_fails(self, rank_one_params):
        """测试回溯失败时立即报错并保留最后的迭代点"""

        class WrongCurvature:
            def __init__(self, inner: QuadraticFn):
                self.inner = inner
                self.dim = inner.dim
                self.gradient_calls = 0

            def value(self, v):
                return self.inner.value(v)

            def gradient(self, v):
                self.gradient_calls += 1
                return self.inner.gradient(v)

            def hessian_vec(self, v, w):
                return -100.0 * w

        f = WrongCurvature(QuadraticFn(np.eye(1), linear=np.array([1.0])))
        g = QuadraticFn(np.diag([3.0]))
        problem = ProblemSpec(f=f, g=g, K=MatrixCoupling(np.zeros((1, 1))))

        with pytest.raises(CenterError, match="线搜索失败") as exc_info:
            tikhonov_center(problem, rank_one_params, 4.0)
        x, y = exc_info.value.iterate
        assert np.array_equal(x, np.zeros(1))
        assert np.array_equal(y, np.zeros(1))
        assert f.gradient_calls <= 31

    def test_undefined_without_regularizer(self, example51):
        """测试 c = 0 时中心无定义"""
        with pytest.raises(CenterError, match="center undefined"):
            tikhonov_center(example51, DynamicsParams(c=0.0), 2.0)

    def test_domain_error(self, example51, rank_one_params):
        """测试 t < t0 报错"""
        with pytest.raises(DomainError):
            tikhonov_center(example51, rank_one_params, 0.5)

    def test_velocity_finite_difference(self, least_squares_20x50):
        """测试中心速度与更细差分一致"""
        t = 5.0
        vx, _ = tikhonov_center_velocity(least_squares_20x50, CENTER_PATH_PARAMS, t)
        h = 1e-6 * t
        ahead = tikhonov_center(least_squares_20x50, CENTER_PATH_PARAMS, t + h)
        behind = tikhonov_center(least_squares_20x50, CENTER_PATH_PARAMS, t - h)
        fine = (ahead.x_t - behind.x_t) / (2 * h)
        assert np.allclose(vx, fine, rtol=1e-4, atol=1e-8)


class TestCenterBounds:
    """测试中心路径的范数与速度上界"""

    def test_least_squares_bounds(self, least_squares_20x50):
        """测试随机最小二乘实例上两条上界成立"""
        times = np.geomspace(1.0, 1e4, 30)
        records = check_center_bounds(least_squares_20x50, CENTER_PATH_PARAMS, times)
        assert len(records) == 30
        assert all(r.norm_ok for r in records)
        assert all(r.speed_ok for r in records)

    def test_rank_one_bounds(self, example51, rank_one_params):
        """测试秩一示例上两条上界成立"""
        records = check_center_bounds(example51, rank_one_params, np.geomspace(1.0, 1e4, 30))
        assert all(r.passed for r in records)

    def test_missing_anchor(self, rank_one_params):
        """测试缺少最小范数鞍点时报错"""
        problem = ProblemSpec(
            f=QuadraticFn(np.eye(1)), g=QuadraticFn(np.eye(1)), K=MatrixCoupling(np.eye(1))
        )
        with pytest.raises(MissingAnchorError):
            check_center_bounds(problem, rank_one_params, [1.0])


class TestGapsAndEnergies:
    """测试间隙与能量函数"""

    def test_hand_gap_value(self, example51):
        """测试原点锚点下的手算间隙 16² + 11.5² = 388.25"""
        state = State(1.0, np.array([1.0, 1.5]), np.array([1.0, 1.5]), np.ones(2), np.ones(2))
        assert primal_dual_gap(example51, state) == pytest.approx(388.25)

    def test_gap_nonnegative(self, least_squares_20x50, make_state):
        """测试原始-对偶间隙非负"""
        for t in (1.0, 5.0, 50.0):
            assert primal_dual_gap(least_squares_20x50, make_state(least_squares_20x50, t)) >= 0.0

    def test_lt_gap_nonnegative(self, least_squares_20x50, rank_one_params, make_state):
        """测试 L_t 间隙非负"""
        for t in (1.0, 5.0, 50.0):
            state = make_state(least_squares_20x50, t)
            assert lt_gap(least_squares_20x50, rank_one_params, state) >= -1e-10

    def test_missing_anchor(self, rank_one_params, make_state):
        """测试无锚点时间隙报错"""
        problem = ProblemSpec(
            f=QuadraticFn(np.eye(1)), g=QuadraticFn(np.eye(1)), K=MatrixCoupling(np.eye(1))
        )
        with pytest.raises(MissingAnchorError):
            primal_dual_gap(problem, make_state(problem, 1.0))

    def test_energy_zero_at_rest_saddle(self, example51):
        """测试 c = 0 时静止于鞍点的能量为零"""
        params = DynamicsParams(c=0.0)
        state = _at_rest(example51, 3.0, np.zeros(2), np.zeros(2))
        assert energy_E(example51, params, state) == pytest.approx(0.0, abs=1e-14)

    def test_energy_hat_zero_at_rest_center(self, least_squares_20x50, rank_one_params):
        """测试静止于 Tikhonov 中心时 Ê 为零"""
        t = 3.0
        center = tikhonov_center(least_squares_20x50, rank_one_params, t)
        state = _at_rest(least_squares_20x50, t, center.x_t, center.y_t)
        assert energy_Ehat(least_squares_20x50, rank_one_params, state, center) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_energy_nonnegative(self, least_squares_20x50, rank_one_params, make_state):
        """测试 t ≥ t0 时能量非负"""
        for t in (1.0, 4.0, 40.0):
            state = make_state(least_squares_20x50, t)
            assert energy_E(least_squares_20x50, rank_one_params, state) >= 0.0
            assert energy_Ehat(least_squares_20x50, rank_one_params, state) >= -1e-10

    def test_residuals_without_damping(self, small_random, make_state):
        """测试 γ = 0 时残差为速度范数"""
        problem, _ = small_random
        params = DynamicsParams(gamma=0.0)
        state = make_state(problem, 2.0)
        rx, ry = residuals(problem, params, state)
        assert rx == pytest.approx(np.linalg.norm(state.vx))
        assert ry == pytest.approx(np.linalg.norm(state.vy))


class TestDiagnosticsRow:
    """测试单行诊断"""

    def test_full_row(self, least_squares_20x50, rank_one_params, make_state):
        """测试全部列都有值"""
        state = make_state(least_squares_20x50, 2.0)
        row = diagnostics_row(least_squares_20x50, rank_one_params, state)
        values = row.values()
        assert len(values) == len(CSV_COLUMNS)
        assert all(v is not None and math.isfinite(v) for v in values)

    def test_center_columns_without_regularizer(self, example51, make_state):
        """测试 c = 0 时中心相关列为空"""
        row = diagnostics_row(example51, DynamicsParams(c=0.0), make_state(example51, 2.0))
        assert row.lt_gap is None
        assert row.dist_center is None
        assert row.energy_Ehat is None
        assert row.gap is not None


class TestRateFit:
    """测试速率拟合与积分工具"""

    def test_power_law_slope(self):
        """测试 t^-2 的斜率"""
        t = np.geomspace(1.0, 1e3, 200)
        fit = fit_rate(t, t**-2.0)
        assert fit.slope == pytest.approx(-2.0, abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.reliable
        assert fit.window[1] == pytest.approx(1e3)

    def test_constant_slope(self):
        """测试常数序列斜率为零"""
        t = np.geomspace(1.0, 100.0, 50)
        assert fit_rate(t, np.full(50, 5.0)).slope == pytest.approx(0.0, abs=1e-12)

    def test_skips_nonpositive(self):
        """测试跳过非正与非有限样本"""
        t = np.geomspace(1.0, 100.0, 20)
        v = 1.0 / t
        v[-1] = 0.0
        v[-2] = np.nan
        fit = fit_rate(t, v)
        assert fit.skipped == 2
        assert fit.slope == pytest.approx(-1.0)

    def test_too_few_points(self):
        """测试可用点不足时不可靠"""
        t = np.geomspace(1.0, 10.0, 6)
        fit = fit_rate(t, np.zeros(6))
        assert not fit.reliable
        assert math.isnan(fit.slope)

    def test_invalid_tail_fraction(self):
        """测试尾部比例范围"""
        with pytest.raises(ValueError):
            fit_rate(np.ones(3), np.ones(3), tail_fraction=1.5)

    def test_cumulative_integral(self):
        """测试 ∫₁^1000 t^-2 dt ≈ 0.999"""
        t = np.geomspace(1.0, 1e3, 4000)
        integral = cumulative_integral(t, t**-2.0)
        assert integral[0] == 0.0
        assert integral[-1] == pytest.approx(0.999, rel=1e-4)

    def test_cumulative_zero_integrand(self):
        """测试零被积函数的部分和为零"""
        t = np.linspace(1.0, 2.0, 5)
        assert np.array_equal(cumulative_integral(t, np.zeros(5)), np.zeros(5))

    def test_cumulative_needs_two_samples(self):
        """测试单个样本无法积分"""
        with pytest.raises(ValueError):
            cumulative_integral(np.ones(1), np.ones(1))

    def test_dyadic_windows(self):
        """测试二进窗口"""
        assert dyadic_windows(1.0, 10.0) == [(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)]

    def test_dyadic_increments_converging(self):
        """测试收敛积分的二进增量尾部递减"""
        t = np.geomspace(1.0, 256.0, 2000)
        increments = dyadic_increments(t, cumulative_integral(t, t**-1.5), 1.0)
        assert increments.size == 8
        assert tail_decreasing(increments)

    def test_tail_not_decreasing(self):
        """测试增量不递减时返回 False"""
        assert not tail_decreasing(np.array([1.0, 2.0, 3.0, 4.0]))
        assert not tail_decreasing(np.array([1.0]))

    def test_head_tail_ratio(self):
        """测试尾部最大值与头部最大值之比"""
        t = np.linspace(1.0, 10.0, 91)
        assert head_tail_ratio(t, 1.0 / t, 1.0) == pytest.approx(0.5)

    def test_oscillations_and_variation(self):
        """测试局部极大值个数与全变差"""
        values = np.array([0.0, 1.0, 0.0, 2.0, 0.0])
        assert oscillation_count(values) == 2
        assert total_variation(values) == pytest.approx(6.0)
        assert oscillation_count(np.exp(-np.linspace(0, 5, 50))) == 0


class TestHypotheses:
    """测试假设检查"""

    def test_rank_one_parameters(self, rank_one_params):
        """测试秩一示例参数满足强收敛结论"""
        report = check_hypotheses(rank_one_params)
        assert report.base_ok
        assert report.thm42_ok
        assert not report.thm31_ok
        assert report.case_label == CASE_LOW
        strict = report.margins(HypothesisGroup.THM42)[2:]
        assert strict == pytest.approx([0.577, 0.047, 0.003], abs=1e-9)
        assert report.holds("42")
        assert report.holds()
        assert not report.holds("31")

    @pytest.mark.parametrize("q, margins", [
        (0.6, [0.1, 0.3]),
        (0.7, [0.1, 0.2]),
        (0.8, [0.1, 0.1]),
    ])
    def test_least_squares_parameters(self, q, margins):
        """测试最小二乘示例参数满足速率结论"""
        params = DynamicsParams(alpha=3.0, q=q, s=0.4, p=2.3, c=5.0, gamma=0.8, t0=1.0)
        report = check_hypotheses(params)
        assert report.thm31_ok
        assert report.holds("31")
        assert report.margins(HypothesisGroup.THM31) == pytest.approx(margins, abs=1e-9)
        assert report.case_label == CASE_HIGH

    def test_boundary_failure(self):
        """测试 s = max(0, p - 2) 时速率结论不成立"""
        params = DynamicsParams(alpha=3.0, q=0.5, s=1.0, p=3.0, c=1.0, gamma=0.5)
        report = check_hypotheses(params)
        failed = [c.name for c in report.checks if c.status == CheckStatus.FAILED]
        assert "s>max(0,p-2)" in failed
        assert not report.thm31_ok

    def test_predicted_rates(self, rank_one_params):
        """测试预测速率指数"""
        rates = check_hypotheses(rank_one_params).predicted
        assert rates.gap == pytest.approx(0.845)
        assert rates.residual == pytest.approx(0.42)
        assert rates.lt_gap == pytest.approx(0.848)
        assert rates.distance == pytest.approx(0.0015)
        assert rates.combined_gap == pytest.approx(0.0015)

    def test_reports(self, rank_one_params):
        """测试文本、键值与 Markdown 报告"""
        report = check_hypotheses(rank_one_params)
        lines = report.to_key_values()
        assert "thm42_ok=true" in lines
        assert "case=q+2p<1" in lines
        assert "PASS" in report.to_text()
        assert "| thm42 |" in report.to_markdown()

    def test_unknown_theorem(self, rank_one_params):
        """测试未知定理编号"""
        with pytest.raises(ValueError):
            check_hypotheses(rank_one_params).holds("99")
