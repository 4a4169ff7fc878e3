from fractions import Fraction

import pytest

from flatland.core import builders
from flatland.core.config import Budget
from flatland.core.cutstack import odometer_steps, to_iet
from flatland.core.enums import TraceStatus
from flatland.core.errors import DomainError, PartialResult
from flatland.core.flow import (
    Transversal,
    cylinders_in_direction,
    first_return_iet,
    multitwist_check,
    saddle_connections_in_direction,
    trace,
    twist_matrix,
    two_marked_torus,
)
from flatland.core.iet import baker_vertical_iet
from flatland.core.mat2 import Mat2
from flatland.core.scalar import QuadExt


def test_rational_direction_closes_on_torus(torus):
    traj = trace(torus, 0, (Fraction(1, 3), Fraction(1, 7)), (2, 1))
    assert traj.status == TraceStatus.CLOSED
    # 方向 (2,1) 的闭轨长度 |(2,1)| = √5
    assert traj.length2 == 5
    assert traj.crossings == 3


def test_trace_hits_a_vertex(l_shape):
    traj = trace(l_shape, 0, (Fraction(1, 2), Fraction(1, 2)), (1, 1))
    assert traj.status == TraceStatus.SINGULAR_HIT
    assert traj.length2 == Fraction(1, 2)
    assert traj.end_point == (1, 1)


def test_trace_from_a_vertex_is_singular(l_shape):
    traj = trace(l_shape, 0, (0, 0), (1, 2))
    assert traj.status == TraceStatus.SINGULAR_HIT
    assert traj.segments == []


def test_trace_budget_and_bad_input(torus):
    sqrt2 = QuadExt.make(0, 1, 2)
    traj = trace(torus, 0, (Fraction(1, 2), Fraction(1, 3)), (1, sqrt2), budget=Budget(max_crossings=50))
    assert traj.status == TraceStatus.BUDGET_EXHAUSTED
    assert traj.crossings == 50
    with pytest.raises(DomainError):
        trace(torus, 0, (Fraction(1, 2), Fraction(1, 2)), (0, 0))
    with pytest.raises(DomainError):
        trace(torus, 0, (2, 2), (1, 0))


def test_horizontal_trace_closes_in_a_staircase_window():
    # R_0 的右边贴 R_{-1}，R_{-1} 的右边又贴回 R_0：两格的水平柱面
    s = builders.staircase(3)
    traj = trace(s, 0, (Fraction(1, 7), Fraction(1, 11)), (1, 0), window=5)
    assert traj.status == TraceStatus.CLOSED
    assert traj.crossings == 2


def test_trace_leaves_a_one_square_staircase_window():
    s = builders.staircase(3)
    traj = trace(s, 0, (Fraction(1, 7), Fraction(1, 11)), (1, 0), window=[0])
    assert traj.status == TraceStatus.LEFT_WINDOW


# ============================================================
# 鞍点连接
# ============================================================


def test_l_shape_vertical_saddle_connections(l_shape):
    # 每个方格的角都是那个 6π 锥点：三条向上的分界线各走 1 就回到它
    found = saddle_connections_in_direction(l_shape, (0, 1), Fraction(5, 2))
    assert [s.length2 for s in found] == [1, 1, 1]
    assert all(s.start_class == s.end_class == 0 for s in found)


def test_marked_point_on_torus_is_passed_through(torus):
    plain = saddle_connections_in_direction(torus, (1, 0), Fraction(7, 2))
    assert [s.length2 for s in plain] == [1]
    through = saddle_connections_in_direction(torus, (1, 0), Fraction(7, 2), through_regular=True)
    assert [s.length2 for s in through] == [1, 4, 9]
    assert through[-1].holonomy == (3, 0)


# ============================================================
# 首次返回映射
# ============================================================


def test_first_return_on_two_marked_torus():
    surface, transversal = two_marked_torus()
    f = first_return_iet(surface, transversal, (3, 4))
    assert len(f.pieces) == 3
    assert sorted(p.length for p in f.pieces) == [Fraction(3, 5), Fraction(4, 5), Fraction(4, 5)]
    assert f.total == Fraction(11, 5)
    assert f.bottom_order() == list(reversed(f.top_order()))


def test_baker_vertical_first_return_is_the_odometer():
    half = Fraction(1, 2)
    b = builders.baker(half)
    n = 5
    window = builders.baker_window(b, n + 2)
    t = Transversal.from_edges(b.restrict(window), builders.baker_top_side(b, n))
    f = first_return_iet(b, t, (0, 1), window=window, allow_partial=True)
    odometer = to_iet(odometer_steps(n)).iet
    # A_1 … A_{n−1} 各自是一个整分量，落到 A_0 里的 [2^{-j-1}, 2^{-j}]
    for j in range(1, n):
        p = f.piece_at(1 - half**j + half ** (j + 2))
        assert (p.top, p.length) == (1 - half**j, half ** (j + 1))
        assert p.shift == half ** (j + 1) - (1 - half**j)
        assert p.time == 1
    # A_0 中落在已知顶边上的部分平移 1/2
    samples = [Fraction(k, 64) for k in range(1, 64, 2) if Fraction(k, 64) < half - half**n]
    samples += [1 - half**j + half ** (j + 2) for j in range(1, n)]
    for x in samples:
        assert f.eval(x) == odometer.eval(x) == baker_vertical_iet(half, n).eval(x)
    assert f.total == 1 - half**n


def test_first_return_partial_when_window_too_small():
    s = builders.staircase(3)
    t = Transversal.from_edges(s.restrict([0]), [builders.EdgeRef(0, builders.BOTTOM)])
    with pytest.raises(PartialResult) as info:
        first_return_iet(s, t, (1, 5), window=[0])
    assert info.value.partial is not None
    assert info.value.covered == 0
    # √26 不在 ℚ(√5) 里，宽度保持未归一化的 cross(e, d)
    assert info.value.partial.total == 5 * s.polygon(0).vertex(1)[0]
    partial = first_return_iet(s, t, (1, 5), window=[0], allow_partial=True)
    assert partial.pieces == []
    assert partial.domain_measure() == 0


# ============================================================
# 柱面与多重扭转
# ============================================================


def test_l_shape_horizontal_cylinders(l_shape):
    cyls = cylinders_in_direction(l_shape, (1, 0))
    assert sorted(c.modulus for c in cyls) == [Fraction(1, 2), 1]
    assert sum(c.area for c in cyls) == 3
    assert sorted(c.circumference for c in cyls) == [1, 2]


def test_torus_cylinder_in_a_slanted_direction(torus):
    # 横截线同时含竖边与横边，返回时间在分量内随位置线性变化
    cyls = cylinders_in_direction(torus, (2, 1))
    assert len(cyls) == 1
    assert cyls[0].modulus == Fraction(1, 5)
    assert cyls[0].area == 1
    assert cyls[0].circumference2 == 5


def test_torus_twist_is_an_affine_automorphism(torus):
    assert twist_matrix((1, 0), 1) == Mat2.of(1, 1, 0, 1)
    assert multitwist_check(torus, (1, 0), 1)
    assert not multitwist_check(torus, (1, 0), 2)


def test_staircase_moduli_equal_inverse_lambda():
    s = builders.staircase(2)
    for direction in ((1, 0), (0, 1)):
        cyls = cylinders_in_direction(s, direction, window=20)
        assert cyls
        assert all(c.modulus == Fraction(1, 2) for c in cyls)
    assert multitwist_check(s, (1, 0), 2, window=20)


def test_staircase_origami_cylinders_and_strips(staircase_origami):
    window = 20
    # p + q 为奇数时分解为柱面，为偶数时是两条带，窗口里没有闭轨
    cyls = cylinders_in_direction(staircase_origami, (5, 2), window=window)
    assert len(cyls) >= 3
    assert all(c.modulus > 0 for c in cyls)
    assert cylinders_in_direction(staircase_origami, (5, 1), window=window) == []
