# -*- coding: utf-8 -*-
"""
Saddle Flow 动力系统单元测试
"""

import numpy as np
import pytest

from saddle_flow.dynamics import (
    DomainError,
    DynamicsError,
    DynamicsParams,
    ParameterError,
    State,
    accelerations,
    aug_lagrangian,
    forces,
    grad_x_Lt,
    grad_y_Lt,
    make_rhs,
    mass_matrix,
    parameter_violations,
    phase_rhs,
    theta,
    theta_dot,
    theta_pair,
)
from saddle_flow.dynamics import system
from saddle_flow.problem import (
    MatrixCoupling,
    ProblemSpec,
    QuadraticFn,
    make_example_51,
    make_random_instance,
)

LOG_GRID = np.geomspace(1.0, 1e4, 25)


class TestDynamicsParams:
    """测试 DynamicsParams"""

    def test_defaults(self):
        """测试默认参数"""
        params = DynamicsParams()
        assert (params.alpha, params.q, params.s, params.p) == (2.5, 0.42, 0.005, 0.268)
        assert (params.c, params.gamma, params.t0) == (10.0, 0.8, 1.0)

    @pytest.mark.parametrize("changes, invariant", [
        ({"alpha": 1.0}, "alpha>1"),
        ({"q": 1.5}, "0<q<1"),
        ({"s": 0.0}, "s>0"),
        ({"p": 0.0}, "p>0"),
        ({"c": -1.0}, "c>=0"),
        ({"gamma": -0.1}, "gamma>=0"),
        ({"t0": 0.3}, "t0>(gamma*q)^(1/(s+1))"),
    ])
    def test_invariant_violations(self, changes, invariant):
        """测试违反不变量时报出名称"""
        with pytest.raises(ParameterError) as exc_info:
            DynamicsParams().replace(**changes)
        assert exc_info.value.invariant == invariant

    def test_violations_list(self):
        """测试一次列出全部违反项"""
        violations = parameter_violations(1.0, 1.5, 0.005, 0.268, 10.0, 0.8, 1.0)
        names = [name for name, _ in violations]
        assert "alpha>1" in names
        assert "0<q<1" in names

    def test_t0_threshold(self):
        """测试 (γq)^(1/(s+1)) ≈ 0.338 < 1"""
        params = DynamicsParams()
        assert (params.gamma * params.q) ** (1 / (params.s + 1)) == pytest.approx(0.338, abs=1e-3)


class TestState:
    """测试 State"""

    def test_phase_round_trip(self, small_random, make_state):
        """测试相空间向量往返"""
        problem, _ = small_random
        state = make_state(problem, 2.0)
        restored = State.from_phase(2.0, state.to_phase(), problem.n, problem.m)
        assert np.array_equal(restored.x, state.x)
        assert np.array_equal(restored.vy, state.vy)

    def test_phase_length_checked(self):
        """测试相空间向量长度检查"""
        with pytest.raises(ValueError):
            State.from_phase(1.0, np.zeros(5), 1, 1)


class TestTheta:
    """测试外推参数"""

    def test_rank_one_value(self, rank_one_params):
        """测试 θ(1) ≈ 1.13253"""
        assert theta(rank_one_params, 1.0) == pytest.approx(1.128 / 0.996, rel=1e-9)

    def test_gamma_zero_closed_form(self):
        """测试 γ = 0 时 θ = t^q / (α - 1)"""
        params = DynamicsParams(alpha=2.5, q=0.42, s=0.3, gamma=0.0)
        for t in LOG_GRID:
            assert theta(params, t) == pytest.approx(t**0.42 / 1.5, rel=1e-14)

    def test_denominator_positive(self, rank_one_params):
        """测试 [t0, ∞) 上 θ 有定义且为正"""
        assert all(theta(rank_one_params, t) > 0 for t in LOG_GRID)

    def test_domain_error(self, rank_one_params):
        """测试 t < t0 报错"""
        with pytest.raises(DomainError):
            theta(rank_one_params, 0.5)
        with pytest.raises(DomainError):
            theta_dot(rank_one_params, 0.5)

    def test_theta_dot_closed_form(self):
        """测试 γ = 0 时 θ' = q t^(q-1) / (α - 1) = 0.25"""
        params = DynamicsParams(alpha=2.0, q=0.5, s=0.5, gamma=0.0)
        assert theta_dot(params, 4.0) == pytest.approx(0.25, rel=1e-14)

    @pytest.mark.parametrize("params", [
        DynamicsParams(),
        DynamicsParams(alpha=3.0, q=0.6, s=0.4, p=2.3, c=5.0, gamma=0.8),
        DynamicsParams(alpha=3.0, q=0.8, s=0.4, p=2.3, c=5.0, gamma=2.0, t0=2.0),
    ])
    def test_theta_dot_matches_finite_differences(self, params):
        """测试 θ' 与中心差分一致"""
        for t in np.geomspace(params.t0 * 1.01, 1e4, 25):
            h = 1e-6 * t
            approx = (theta(params, t + h) - theta(params, t - h)) / (2 * h)
            assert theta_dot(params, t) == pytest.approx(approx, rel=1e-6, abs=1e-12)


class TestAugmentedLagrangian:
    """测试增广拉格朗日函数及其梯度"""

    def test_hand_value(self, example51, rank_one_params):
        """测试手算值 L_t = 1"""
        value = aug_lagrangian(
            example51, rank_one_params, 1.0, np.array([1.0, 0.0]), np.array([0.0, 1.0])
        )
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_without_regularizer(self, example51, make_state):
        """测试 c = 0 时退化为 L"""
        params = DynamicsParams(c=0.0)
        state = make_state(example51, 3.0)
        assert aug_lagrangian(example51, params, 3.0, state.x, state.y) == pytest.approx(
            example51.lagrangian(state.x, state.y)
        )

    def test_origin(self, example51, rank_one_params):
        """测试原点处为零"""
        assert aug_lagrangian(example51, rank_one_params, 2.0, np.zeros(2), np.zeros(2)) == 0.0

    def test_gradient_without_coupling(self, rng):
        """测试 K = 0, c = 0 时 ∇ₓL_t = ∇f"""
        problem = ProblemSpec(
            f=QuadraticFn(np.diag([1.0, 2.0])),
            g=QuadraticFn(np.eye(1)),
            K=MatrixCoupling(np.zeros((1, 2))),
        )
        params = DynamicsParams(c=0.0)
        x, y = rng.standard_normal(2), rng.standard_normal(1)
        assert np.allclose(grad_x_Lt(problem, params, 1.0, x, y), problem.f.gradient(x))

    def test_gradients_match_finite_differences(self, small_random, rank_one_params, rng):
        """测试两个梯度与差分一致"""
        problem, _ = small_random
        t, h = 3.0, 1e-6
        for _ in range(20):
            x, y = rng.standard_normal(problem.n), rng.standard_normal(problem.m)
            gx = grad_x_Lt(problem, rank_one_params, t, x, y)
            gy = grad_y_Lt(problem, rank_one_params, t, x, y)
            fx = np.array([
                (aug_lagrangian(problem, rank_one_params, t, x + h * e, y)
                 - aug_lagrangian(problem, rank_one_params, t, x - h * e, y)) / (2 * h)
                for e in np.eye(problem.n)
            ])
            fy = np.array([
                (aug_lagrangian(problem, rank_one_params, t, x, y + h * e)
                 - aug_lagrangian(problem, rank_one_params, t, x, y - h * e)) / (2 * h)
                for e in np.eye(problem.m)
            ])
            assert np.linalg.norm(gx - fx) <= 1e-6 * max(1.0, np.linalg.norm(gx))
            assert np.linalg.norm(gy - fy) <= 1e-6 * max(1.0, np.linalg.norm(gy))

    def test_strong_convexity(self, small_random, rank_one_params, rng):
        """测试 L_t(·, y) 强凸、L_t(x, ·) 强凹"""
        problem, _ = small_random
        t = 5.0
        eps = rank_one_params.c / t**rank_one_params.p
        for _ in range(100):
            x1, x2 = rng.standard_normal(problem.n), rng.standard_normal(problem.n)
            y1, y2 = rng.standard_normal(problem.m), rng.standard_normal(problem.m)
            lhs = aug_lagrangian(problem, rank_one_params, t, x2, y1)
            rhs = (
                aug_lagrangian(problem, rank_one_params, t, x1, y1)
                + grad_x_Lt(problem, rank_one_params, t, x1, y1) @ (x2 - x1)
                + 0.5 * eps * np.sum((x1 - x2) ** 2)
            )
            assert lhs >= rhs - 1e-10
            lhs = aug_lagrangian(problem, rank_one_params, t, x1, y2)
            rhs = (
                aug_lagrangian(problem, rank_one_params, t, x1, y1)
                + grad_y_Lt(problem, rank_one_params, t, x1, y1) @ (y2 - y1)
                - 0.5 * eps * np.sum((y1 - y2) ** 2)
            )
            assert lhs <= rhs + 1e-10


class TestAccelerations:
    """测试块系统求解"""

    def test_gamma_zero_is_explicit(self, small_random, make_state):
        """测试 γ = 0 时加速度等于右端力"""
        problem, _ = small_random
        params = DynamicsParams(gamma=0.0)
        state = make_state(problem, 2.0)
        fx, fy = forces(problem, params, state)
        ax, ay = accelerations(problem, params, state)
        assert np.array_equal(ax, fx)
        assert np.array_equal(ay, fy)

    def test_zero_coupling_decouples(self, rank_one_params, make_state):
        """测试 K = 0 时块系统解耦"""
        problem = ProblemSpec(
            f=QuadraticFn(np.eye(2)),
            g=QuadraticFn(np.eye(3)),
            K=MatrixCoupling(np.zeros((3, 2))),
        )
        state = make_state(problem, 1.5)
        fx, fy = forces(problem, rank_one_params, state)
        ax, ay = accelerations(problem, rank_one_params, state)
        assert np.allclose(ax, fx) and np.allclose(ay, fy)

    def test_block_residual(self, rank_one_params, least_squares_params, rng):
        """测试 1000 个随机状态的块系统残差"""
        problems = [make_example_51(1, 10, 10, 1), make_random_instance(20, 50, seed=2)[0]]
        for i in range(1000):
            problem = problems[i % 2]
            params = rank_one_params if i % 2 == 0 else least_squares_params
            t = float(np.exp(rng.uniform(0.0, np.log(1e2))))
            state = State(
                t,
                rng.standard_normal(problem.n),
                rng.standard_normal(problem.m),
                rng.standard_normal(problem.n),
                rng.standard_normal(problem.m),
            )
            fx, fy = forces(problem, params, state)
            ax, ay = accelerations(problem, params, state)
            F = np.concatenate([fx, fy])
            residual = mass_matrix(problem, params, t) @ np.concatenate([ax, ay]) - F
            assert np.linalg.norm(residual) <= 1e-10 * (1.0 + np.linalg.norm(F))

    def test_agrees_with_dense_solve(self, rank_one_params, make_state):
        """测试与完整块矩阵的稠密分解一致"""
        for problem in (make_example_51(1, 10, 10, 1), make_random_instance(6, 8, seed=4)[0]):
            for t in (1.0, 7.0, 300.0):
                state = make_state(problem, t)
                fx, fy = forces(problem, rank_one_params, state)
                dense = np.linalg.solve(
                    mass_matrix(problem, rank_one_params, t), np.concatenate([fx, fy])
                )
                ax, ay = accelerations(problem, rank_one_params, state)
                scale = 1.0 + np.linalg.norm(dense)
                assert np.linalg.norm(np.concatenate([ax, ay]) - dense) <= 1e-10 * scale

    def test_rest_at_saddle(self, example51):
        """测试 c = 0 鞍点处静止时加速度为零"""
        params = DynamicsParams(c=0.0, gamma=0.8)
        x = np.array([-10.0, 1.0])
        y = np.array([-1.0, 10.0])
        state = State(2.0, x, y, np.zeros(2), np.zeros(2))
        ax, ay = accelerations(example51, params, state)
        assert np.allclose(ax, 0.0, atol=1e-12)
        assert np.allclose(ay, 0.0, atol=1e-12)

    def test_conjugate_gradient_branch(self, rank_one_params, make_state):
        """测试 n 超过稠密上限时共轭梯度解满足块系统"""
        problem, _ = make_random_instance(300, 600, seed=11)
        assert problem.n > system.DENSE_SCHUR_LIMIT
        for t in (2.0, 40.0):
            state = make_state(problem, t)
            fx, fy = forces(problem, rank_one_params, state)
            ax, ay = accelerations(problem, rank_one_params, state)
            F = np.concatenate([fx, fy])
            block = mass_matrix(problem, rank_one_params, t)
            residual = block @ np.concatenate([ax, ay]) - F
            assert np.linalg.norm(residual) <= 1e-9 * (1.0 + np.linalg.norm(F))
            dense = np.linalg.solve(block, F)
            error = np.linalg.norm(np.concatenate([ax, ay]) - dense)
            assert error <= 1e-7 * (1.0 + np.linalg.norm(F))

    def test_branches_agree(self, small_random, rank_one_params, make_state, monkeypatch):
        """测试同一问题上 Cholesky 与共轭梯度结果一致"""
        problem, _ = small_random
        state = make_state(problem, 3.0)
        dense = np.concatenate(accelerations(problem, rank_one_params, state))
        monkeypatch.setattr(system, "DENSE_SCHUR_LIMIT", 0)
        iterative = np.concatenate(accelerations(problem, rank_one_params, state))
        assert np.allclose(iterative, dense, rtol=1e-9, atol=1e-10)


class TestPhaseRhs:
    """测试相空间右端项"""

    def test_layout(self, small_random, rank_one_params, make_state):
        """测试输出为 [ẋ | ẏ | ẍ | ÿ]"""
        problem, _ = small_random
        state = make_state(problem, 2.0)
        out = phase_rhs(problem, rank_one_params, 2.0, state.to_phase())
        n, m = problem.n, problem.m
        ax, ay = accelerations(problem, rank_one_params, state)
        assert np.array_equal(out[:n], state.vx)
        assert np.array_equal(out[n:n + m], state.vy)
        assert np.allclose(out[n + m:], np.concatenate([ax, ay]))

    def test_rejects_nonfinite(self, small_random, rank_one_params, make_state):
        """测试非有限输入报错"""
        problem, _ = small_random
        phase = make_state(problem, 2.0).to_phase()
        phase[0] = np.nan
        with pytest.raises(DynamicsError):
            phase_rhs(problem, rank_one_params, 2.0, phase)

    def test_bound_rhs_matches_components(self, rank_one_params, least_squares_params, rng):
        """测试绑定后的 rhs（特征分解求解）与逐项计算一致且不修改输入"""
        for problem, params in (
            (make_example_51(1, 10, 10, 1), rank_one_params),
            (make_random_instance(5, 9, seed=3)[0], least_squares_params),
            (make_random_instance(5, 9, seed=3)[0], DynamicsParams(gamma=0.0)),
        ):
            rhs = make_rhs(problem, params)
            for t in (1.0, 4.5, 250.0):
                state = State(
                    t,
                    rng.standard_normal(problem.n),
                    rng.standard_normal(problem.m),
                    rng.standard_normal(problem.n),
                    rng.standard_normal(problem.m),
                )
                phase = state.to_phase()
                before = phase.copy()
                out = rhs(t, phase)
                ax, ay = accelerations(problem, params, state)
                expected = np.concatenate([state.vx, state.vy, ax, ay])
                assert np.allclose(out, expected, rtol=1e-9, atol=1e-10)
                assert np.array_equal(phase, before)
                assert not np.shares_memory(out, phase)

    def test_theta_pair(self, rank_one_params):
        """测试 (θ, θ') 与单独计算一致"""
        for t in LOG_GRID:
            th, th_dot = theta_pair(rank_one_params, float(t))
            assert th == theta(rank_one_params, float(t))
            assert th_dot == pytest.approx(theta_dot(rank_one_params, float(t)), rel=1e-15)

    def test_view_state_is_read_only(self, small_random, make_state):
        """测试视图状态共享相空间缓冲区且只读"""
        problem, _ = small_random
        phase = make_state(problem, 2.0).to_phase()
        state = State.from_phase(2.0, phase, problem.n, problem.m, copy=False)
        assert np.shares_memory(state.x, phase)
        with pytest.raises(ValueError):
            state.x[0] = 1.0
        copied = State.from_phase(2.0, phase, problem.n, problem.m)
        assert not np.shares_memory(copied.x, phase)
