"""
成对产生率测试
包含属性测试（Property 15-16: 一维级数与闭式一致、三维字面式一致）
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdwlab.errors import DomainError, UndefinedMetricError
from cdwlab.physics.pair_production import (
    PairProductionParams,
    linearity_metric,
    rate,
    rate_1d_closed,
    rate_3d_literal,
    rate_curve,
)
from cdwlab.series import CurveSeries


# ==================== 属性测试 ====================

@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.05, max_value=2.0))
def test_one_dimensional_series_matches_closed_form(E):
    """
    Property 15: D = 1 的级数等于闭式对数

    *For any* 0.05 ≤ E ≤ 2，rate(D=1) = −(E/2π)·ln(1 − e^{−π/E})
    """
    assert rate(PairProductionParams(1, E)) == pytest.approx(rate_1d_closed(E), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.01, max_value=5.0))
def test_three_dimensional_matches_literal(E):
    """
    Property 16: D = 3 的通用式等于字面展开式

    *For any* E > 0，两者在机器精度内相同
    """
    assert rate(PairProductionParams(3, E)) == pytest.approx(rate_3d_literal(E), rel=1e-13)


# ==================== 单元测试 ====================

class TestRate:
    """测试产生率数值"""

    def test_three_dimensional_reference(self):
        assert rate(PairProductionParams(3, 1.0)) == pytest.approx(3.5227e-4, abs=1e-7)

    def test_one_dimensional_reference(self):
        assert rate(PairProductionParams(1, 1.0)) == pytest.approx(7.03e-3, abs=1e-5)

    def test_weak_field_underflows_to_zero(self):
        assert rate(PairProductionParams(3, 1e-4)) == 0.0
        assert rate_1d_closed(1e-4) == 0.0

    def test_two_dimensional_prefactor(self):
        E = 0.8
        q = math.exp(-math.pi / E)
        expected = E**1.5 / (2.0 * math.pi) ** 2 * sum(q**n / n**1.5 for n in range(1, 60))
        assert rate(PairProductionParams(2, E)) == pytest.approx(expected, rel=1e-12)

    def test_validation(self):
        with pytest.raises(DomainError):
            PairProductionParams(4, 1.0)
        with pytest.raises(DomainError):
            PairProductionParams(1, 0.0)
        with pytest.raises(DomainError):
            PairProductionParams(1, 1.0, n_max=0)
        with pytest.raises(DomainError):
            rate_3d_literal(-1.0)


class TestRateCurve:
    """测试产生率曲线"""

    def test_curve_shape(self):
        series = rate_curve(1, np.linspace(0.05, 1.0, 50))
        assert len(series) == 50
        assert series.label == "w_1d"
        assert series.equation == "eq52"
        assert series.y[-1] == pytest.approx(7.03e-3, abs=1e-5)
        assert np.all(np.diff(series.y) >= 0)

    def test_equation_tags(self):
        grid = [0.5, 1.0]
        assert rate_curve(3, grid).equation == "eq51"
        assert rate_curve(2, grid).equation == "eq50"


class TestLinearity:
    """测试线性度指标"""

    def test_one_dimensional_more_linear(self):
        grid = np.linspace(0.05, 1.0, 50)
        assert linearity_metric(rate_curve(1, grid)) > linearity_metric(rate_curve(3, grid))

    def test_exact_line(self):
        x = np.linspace(0.0, 1.0, 20)
        series = CurveSeries("line", x, 2.0 * x + 1.0)
        assert linearity_metric(series) == pytest.approx(1.0, abs=1e-12)

    def test_constant_series(self):
        x = np.linspace(0.0, 1.0, 20)
        with pytest.raises(UndefinedMetricError):
            linearity_metric(CurveSeries("flat", x, np.full(20, 3.0)))

    def test_too_few_points(self):
        x = np.linspace(0.0, 1.0, 5)
        with pytest.raises(DomainError):
            linearity_metric(CurveSeries("short", x, x))
