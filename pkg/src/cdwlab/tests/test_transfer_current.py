"""
动量核、极点、|T_IF| 与 S-S' 电流测试
包含属性测试（Property 12-14: 核的奇对称、电流非负、电流随场强单调）
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cdwlab.errors import DomainError, PoleProximityError
from cdwlab.physics import transfer_current
from cdwlab.physics.transfer_current import (
    TransferParams,
    current_curve,
    current_from_matrix_element,
    f_kernel,
    field_ratio,
    find_poles,
    kernel_denominator,
    pair_separation,
    sspair_shape,
    t_if_limit,
    t_if_magnitude,
    transfer_params_from_vacuum,
    write_pole_report,
)
from cdwlab.physics.vacuum_landscape import PotentialParams, solve_vacua

# tan u = 2u, u > 0
REAL_ROOTS_U = (1.1656, 4.6042, 7.7899, 10.9499, 14.1017, 17.2498)


# ==================== 属性测试 ====================

@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.05, max_value=30.0), st.floats(min_value=0.2, max_value=5.0))
def test_kernel_odd_on_real_axis(k, length):
    """
    Property 12: x = 0 时 f 在实轴上为实奇函数

    *For any* 远离极点的实 k，f(−k) = −f(k) 且虚部为零
    """
    assume(abs(kernel_denominator(length, 0.0, k)) > 1e-6)
    forward = f_kernel(length, 0.0, k)
    backward = f_kernel(length, 0.0, -k)
    assert backward == pytest.approx(-forward, rel=1e-9, abs=1e-12)
    assert abs(forward.imag) <= 1e-12 * max(1.0, abs(forward))


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-3, max_value=100.0), st.floats(min_value=0.01, max_value=50.0))
def test_sspair_shape_non_negative(E, tau):
    """
    Property 13: S-S' 电流形状非负且有限

    *For any* E > 0, τ > 0，形状 ∈ [0, ∞)
    """
    value = sspair_shape(tau, E)
    assert math.isfinite(value)
    assert value >= 0.0


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.05, max_value=0.9), st.floats(min_value=1.0001, max_value=1.5))
def test_sspair_shape_increasing_below_threshold(E, factor):
    """
    Property 14: 阈值以下电流随场强单调上升

    *For any* 0 < E₁ < E₂ ≤ τ，I(E₁) < I(E₂)
    """
    tau = 1.0
    assert sspair_shape(tau, E) < sspair_shape(tau, min(E * factor, tau))


# ==================== 单元测试 ====================

class TestKernel:
    """测试动量核 f(k)"""

    def test_small_k_limit(self):
        assert f_kernel(1.0, 0.0, 1e-10) == 0j

    def test_finite_value(self):
        # u = 1: (cos 1 − sin 1)/(cos 1 − sin 1/2)
        expected = (math.cos(1.0) - math.sin(1.0)) / (math.cos(1.0) - 0.5 * math.sin(1.0))
        assert f_kernel(1.0, 0.0, 2.0) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("k", [math.pi, 2.0 * math.pi])
    def test_reference_values(self, k):
        assert abs(f_kernel(1.0, 0.0, k) - math.pi) < 1e-12

    def test_pole_guard(self, monkeypatch):
        k_star = 2.0 * 1.16556
        monkeypatch.setattr(transfer_current, "POLE_GUARD", 1e-3)
        with pytest.raises(PoleProximityError):
            f_kernel(1.0, 0.0, k_star)

    def test_non_finite_k(self):
        with pytest.raises(DomainError):
            f_kernel(1.0, 0.0, complex(math.nan, 0.0))
        with pytest.raises(DomainError):
            f_kernel(0.0, 0.0, 1.0)


class TestPoles:
    """测试极点搜索"""

    def test_real_poles_for_zero_offset(self):
        poles = find_poles(1.0)
        assert len(poles) == 2 * len(REAL_ROOTS_U)
        assert poles.dropped == []
        positive = [k.real / 2.0 for k in poles.poles if k.real > 0]
        assert positive == pytest.approx(list(REAL_ROOTS_U), abs=1e-3)
        assert all(abs(k.imag) < 1e-12 for k in poles.poles)
        assert all(g < transfer_current.POLE_RESIDUAL_TOL for g in poles.residuals)

    def test_sorted_and_mirrored(self):
        poles = find_poles(1.0)
        reals = [k.real for k in poles.poles]
        assert reals == sorted(reals)
        assert reals[0] == pytest.approx(-reals[-1], rel=1e-12)

    def test_residues_match_contour(self):
        poles = find_poles(1.0, max_count=2)
        assert len(poles) == 4
        for analytic, contour in zip(poles.residues, poles.contour_residues):
            assert contour == pytest.approx(analytic, rel=1e-6, abs=1e-9)
        # odd kernel: equal residues at ±k*
        assert poles.residues[0] == pytest.approx(poles.residues[-1], rel=1e-9)

    def test_scaling_with_length(self):
        short = find_poles(1.0, max_count=1)
        long = find_poles(2.0, max_count=1)
        assert long.poles[-1].real == pytest.approx(short.poles[-1].real / 2.0, rel=1e-10)

    def test_offset_moves_poles(self):
        poles = find_poles(1.0, x=0.1, max_count=3)
        assert len(poles) + len(poles.dropped) == 6
        assert all(g < transfer_current.POLE_RESIDUAL_TOL for g in poles.residuals)
        assert any(abs(k.imag) > 1e-6 for k in poles.poles)

    def test_region_validation(self):
        with pytest.raises(DomainError):
            find_poles(1.0, region=(5.0, 2.0))
        with pytest.raises(DomainError):
            find_poles(1.0, region=(0.0, 25.0))

    def test_region_below_first_pole(self):
        poles = find_poles(1.0, 0.0, region=(0.0, 1.0))
        assert len(poles) == 0
        assert poles.dropped == []

    def test_report(self, tmp_path):
        path = write_pole_report(find_poles(1.0, max_count=1), tmp_path / "poles.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# provenance: eq41 label=poles")
        assert lines[1] == "re_k,im_k,abs_g,re_res,im_res"
        assert len(lines) == 4


class TestMatrixElement:
    """测试 |T_IF|"""

    def test_reference_value(self):
        tp = TransferParams()
        assert t_if_magnitude(tp) == pytest.approx(0.3822935, rel=1e-5)
        assert t_if_limit(tp) == pytest.approx(0.764587, rel=1e-5)

    def test_limit_is_twice_general_form(self):
        tp = TransferParams(m_star=2.0, x_bar=0.3, alpha=0.7, c1=1.3, c2=0.8)
        assert t_if_limit(tp) == pytest.approx(2.0 * t_if_magnitude(tp), rel=1e-14)

    def test_suppressed_at_small_length_scale(self):
        value = t_if_magnitude(TransferParams(x_bar=0.01))
        assert value == pytest.approx(4.93e-20, rel=5e-3)
        assert value < 1e-19

    def test_vanishes_without_overlap(self):
        assert t_if_magnitude(TransferParams(n1=0.0)) == 0.0

    def test_validation(self):
        with pytest.raises(DomainError):
            TransferParams(m_star=0.0)
        with pytest.raises(DomainError):
            TransferParams(n1=1.5)
        with pytest.raises(DomainError):
            TransferParams(alpha=-1.0)
        assert "c_tilde" in TransferParams(c1=2.0).as_dict()

    def test_chained_from_vacuum(self):
        solution = solve_vacua(PotentialParams())
        tp = transfer_params_from_vacuum(solution)
        length = 1.0 / solution.gap_direct
        assert tp.L == pytest.approx(length)
        assert tp.alpha == pytest.approx(solution.gap_direct)
        assert tp.c2 == pytest.approx((length / math.sqrt(2.0 * math.pi)) ** -0.5)


class TestCurrent:
    """测试电流-场强曲线"""

    def test_helpers(self):
        assert pair_separation(1.0, 1.0, 2.0) == 1.0
        assert field_ratio(1.0, 2.0, 4.0) == 0.5
        with pytest.raises(DomainError):
            pair_separation(1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            field_ratio(1.0, 1.0, 0.0)

    def test_value_at_threshold(self):
        assert sspair_shape(1.0, 1.0) == pytest.approx(0.399896, rel=1e-5)

    def test_shape_limits(self):
        assert sspair_shape(1.0, 0.0) == 0.0
        assert sspair_shape(1.0, 1e-4) == 0.0
        with pytest.raises(DomainError):
            sspair_shape(0.0, 1.0)

    def test_curve(self):
        grid = np.linspace(0.1, 5.0, 50)
        series = current_curve(2.0, 1.0, 1.0, grid)
        assert series.header() == ["E", "I"]
        assert series.equation == "eq47"
        assert np.allclose(series.y, 2.0 * sspair_shape(1.0, grid))

    def test_curve_rejects_non_positive_field(self):
        with pytest.raises(DomainError, match="point 2"):
            current_curve(1.0, 1.0, 1.0, [0.5, 1.0, 0.0, 2.0])

    def test_matrix_element_curve(self):
        tp = TransferParams()
        series = current_from_matrix_element(tp, [0.5, 1.0, 2.0])
        assert series.y[1] == pytest.approx(t_if_limit(tp), rel=1e-12)
        assert series.params["alpha_L"] == 1.0
        assert series.header() == ["E", "I", "L_pair"]
        assert np.allclose(series.extra["L_pair"], [4.0, 2.0, 1.0], rtol=1e-15)

    def test_suppressed_far_below_threshold(self):
        c_tilde, e_t, c_v = 2.5, 2.0, 1.5
        tau = e_t * c_v
        series = current_curve(c_tilde, e_t, c_v, [0.05 * tau])
        assert 0.0 <= series.y[0] < 1e-6 * c_tilde

    def test_monotone_above_threshold(self):
        c_tilde, e_t, c_v = 2.5, 2.0, 1.5
        tau = e_t * c_v
        series = current_curve(c_tilde, e_t, c_v, np.linspace(tau, 20.0 * tau, 100))
        assert series.y[0] == pytest.approx(0.39989 * c_tilde, abs=1e-4 * c_tilde)
        assert np.all(np.diff(series.y) > 0)

    def test_separation_from_params(self):
        tp = TransferParams(delta_s=3.0, e_star=2.0)
        assert tp.separation_at(1.5) == pytest.approx(pair_separation(3.0, 2.0, 1.5))
        assert tp.separation_at(3.0) == pytest.approx(0.5 * tp.separation_at(1.5))
        with pytest.raises(DomainError):
            TransferParams(e_star=0.0).separation_at(1.0)
