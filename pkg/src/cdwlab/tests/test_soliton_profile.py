"""
孤子剖面与动量谱测试
包含属性测试（Property 5-8: 对称性、有界性、系数连续性、部分和单调性）
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdwlab.errors import DomainError
from cdwlab.physics.soliton_profile import (
    BoxProfile,
    ProfileSpec,
    action_momentum_space,
    action_position_space,
    box_profile,
    build_mode_grid,
    mode_coefficient,
    phase_profile,
    profile_series,
    reconstruct_profile,
    spectrum_series,
)

TWO_PI = 2.0 * math.pi
BOX_ACTION = TWO_PI**2


# ==================== 属性测试 ====================

@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=5.0), st.floats(min_value=4.0, max_value=60.0))
def test_profile_symmetric(d, b):
    """
    Property 5: 镜像放置的壁关于中心对称

    *For any* d，φ₀(c + d) = φ₀(c − d)
    """
    spec = ProfileSpec.centered(b, 1.0)
    assert phase_profile(spec, d) == pytest.approx(phase_profile(spec, -d), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-20.0, max_value=20.0), st.floats(min_value=4.0, max_value=100.0))
def test_profile_bounded(x, b):
    """
    Property 6: 剖面不超过 2π

    *For any* x，0 ≤ φ₀(x) < 2π + 1e-9
    """
    value = phase_profile(ProfileSpec.centered(b, 1.0), x)
    assert 0.0 <= value < TWO_PI + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-15, max_value=1e-9), st.floats(min_value=0.1, max_value=10.0))
def test_mode_coefficient_continuous_and_even(eps, length):
    """
    Property 7: 系数为偶函数并在 k = 0 连续

    *For any* 小 ε，|φ(ε) − φ(−ε)| < 1e-12 且 φ(ε) 接近 √(2/π)·L/2
    """
    assert abs(mode_coefficient(length, eps) - mode_coefficient(length, -eps)) < 1e-12
    limit = math.sqrt(2.0 / math.pi) * length / 2.0
    assert abs(mode_coefficient(length, eps) - limit) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=300))
def test_momentum_action_monotone(n_max):
    """
    Property 8: 部分和单调

    *For any* n_max，action_momentum_space(full) 随 n_max 不减
    """
    smaller = action_momentum_space(build_mode_grid(1.0, n_max))
    larger = action_momentum_space(build_mode_grid(1.0, n_max + 1))
    assert larger >= smaller


# ==================== 单元测试 ====================

class TestPhaseProfile:
    """测试薄壁剖面"""

    spec = ProfileSpec(b=10.0, x_a=-0.5, x_b=0.5)

    def test_plateau_and_walls(self):
        assert phase_profile(self.spec, 0.0) == pytest.approx(TWO_PI, abs=1e-3)
        assert phase_profile(self.spec, -0.5) == pytest.approx(math.pi, abs=1e-3)
        assert phase_profile(self.spec, 100.0) == pytest.approx(0.0, abs=1e-12)
        assert phase_profile(self.spec, -100.0) == pytest.approx(0.0, abs=1e-12)

    def test_array_input(self):
        values = phase_profile(self.spec, np.array([-0.5, 0.0, 0.5]))
        assert values.shape == (3,)
        assert values[0] == pytest.approx(values[2])

    def test_validation(self):
        with pytest.raises(DomainError):
            ProfileSpec(b=0.0, x_a=0.0, x_b=1.0)
        with pytest.raises(DomainError):
            ProfileSpec(b=10.0, x_a=1.0, x_b=1.0)
        with pytest.raises(DomainError):
            ProfileSpec(b=3.0, x_a=0.0, x_b=1.0)

    def test_series_export(self):
        series = profile_series(self.spec, np.linspace(-1.0, 1.0, 21))
        assert len(series) == 21
        assert series.header() == ["x", "phi"]
        assert series.params == {"b": 10.0, "x_a": -0.5, "x_b": 0.5}


class TestModeGrid:
    """测试动量网格"""

    def test_coefficient_values(self):
        assert mode_coefficient(1.0, 0.0) == pytest.approx(0.398942, abs=1e-6)
        assert mode_coefficient(1.0, TWO_PI) == pytest.approx(0.0, abs=1e-15)
        assert mode_coefficient(2.0, math.pi / 2) == pytest.approx(0.507949, abs=1e-6)

    def test_single_mode(self):
        grid = build_mode_grid(1.0, 1)
        assert grid.k[0] == pytest.approx(math.pi)
        assert grid.coefficients[0] == pytest.approx(0.253974, abs=1e-6)
        assert grid.n1 == 1.0

    def test_midpoint_grid(self):
        grid = build_mode_grid(2.0, 2)
        np.testing.assert_allclose(grid.k, [math.pi / 2, 3 * math.pi / 2])
        assert np.all(np.diff(grid.k) > 0)

    def test_grid_is_read_only(self):
        grid = build_mode_grid(1.0, 4)
        with pytest.raises(ValueError):
            grid.k[0] = 0.0

    def test_validation(self):
        with pytest.raises(DomainError):
            build_mode_grid(1.0, 0)
        with pytest.raises(DomainError):
            build_mode_grid(1.0, 4, n1=1.5)

    def test_spectrum_export(self):
        series = spectrum_series(build_mode_grid(1.0, 8))
        assert series.header() == ["k", "phi_k"]
        assert len(series) == 8


class TestActions:
    """测试位置空间与动量空间作用量"""

    def test_box_action(self):
        assert action_position_space(1.0, box_profile(1.0)) == pytest.approx(BOX_ACTION, rel=1e-12)

    def test_matching_reference_gives_zero(self):
        assert action_position_space(1.0, BoxProfile(1.0, height=0.0)) == 0.0

    def test_tanh_wall_deficit(self):
        tanh = action_position_space(1.0, ProfileSpec.centered(10.0, 1.0))
        assert tanh == pytest.approx(BOX_ACTION - 4.0 * math.pi**2 / 10.0, rel=1e-6)

    def test_steep_walls_approach_box(self):
        tanh = action_position_space(1.0, ProfileSpec.centered(200.0, 1.0))
        assert tanh == pytest.approx(BOX_ACTION, rel=0.02)

    def test_half_width_too_small(self):
        with pytest.raises(DomainError):
            action_position_space(1.0, box_profile(2.0), half_width=0.5)

    def test_residual_weight(self):
        assert action_momentum_space(build_mode_grid(1.0, 64, n1=1.0), "residual") == 0.0
        free = build_mode_grid(1.0, 64, n1=0.0)
        assert action_momentum_space(free, "residual") == action_momentum_space(free, "full")
        with pytest.raises(DomainError):
            action_momentum_space(free, "partial")

    def test_momentum_sum_tends_to_pi(self):
        assert action_momentum_space(build_mode_grid(1.0, 4096)) == pytest.approx(math.pi, rel=1e-3)

    def test_ratio_is_scale_invariant(self):
        ratios = []
        for length in (0.5, 1.0, 2.0):
            momentum = action_momentum_space(build_mode_grid(length, 4096))
            position = action_position_space(1.0 / length, box_profile(length))
            ratios.append(momentum / position)
        assert max(ratios) == pytest.approx(min(ratios), rel=0.01)
        assert ratios[1] == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-3)


class TestReconstruction:
    """测试逆变换重建"""

    grid = build_mode_grid(1.0, 512)

    def test_unit_box_recovered(self):
        assert reconstruct_profile(self.grid, 0.0) == pytest.approx(1.0, rel=0.02)

    def test_vanishes_at_walls(self):
        assert reconstruct_profile(self.grid, 0.5) == pytest.approx(0.0, abs=1e-10)
        assert reconstruct_profile(self.grid, -0.5) == pytest.approx(0.0, abs=1e-10)

    def test_anti_periodic(self):
        for x in (0.0, 0.13, 0.31):
            assert reconstruct_profile(self.grid, x + 1.0) == pytest.approx(
                -reconstruct_profile(self.grid, x), abs=1e-9
            )
        assert reconstruct_profile(self.grid, 5.0) == pytest.approx(-1.0, rel=0.02)

    def test_single_mode_hump(self):
        assert reconstruct_profile(build_mode_grid(1.0, 1), 0.0) > 0.0
