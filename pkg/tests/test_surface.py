from collections import Counter
from fractions import Fraction

import pytest

from flatland.core import builders
from flatland.core.billiards import BilliardPolygon, rank, unfold_billiard
from flatland.core.enums import VertexKind, ViolationKind
from flatland.core.errors import DomainError, NotFinite
from flatland.core.isomorphism import isomorphic
from flatland.core.mat2 import Mat2
from flatland.core.scalar import QuadExt, parse_scalar
from flatland.core.surface import (
    EdgeRef,
    FiniteSurface,
    Polygon,
    apply_matrix,
    as_finite,
    euler_genus,
    validate,
    vertex_classes,
)

UNIT = ((0, 0), (1, 0), (1, 1), (0, 1))


def _cone_angles(surface):
    return Counter(c.total_angle_over_pi for c in vertex_classes(surface))


# ============================================================
# 经典例子的亏格与锥角
# ============================================================


def test_l_shape_has_one_6pi_point(l_shape):
    assert validate(l_shape).ok
    assert euler_genus(l_shape) == 2
    classes = vertex_classes(l_shape)
    assert len(classes) == 1
    assert classes[0].total_angle_over_pi == 6
    assert classes[0].kind == VertexKind.CONICAL


def test_torus_is_genus_one(torus):
    assert euler_genus(torus) == 1
    [c] = vertex_classes(torus)
    assert c.kind == VertexKind.REGULAR


def test_octagon():
    s = builders.octagon()
    assert validate(s).ok
    assert euler_genus(s) == 2
    assert _cone_angles(s) == Counter({6: 1})
    # 边心距 1 的正八边形面积 8(√2 − 1)
    assert s.area() == QuadExt.make(-8, 8, 2)


def test_eierlegende():
    s = builders.eierlegende()
    assert validate(s).ok
    assert euler_genus(s) == 3
    assert _cone_angles(s) == Counter({4: 4})


def test_two_square_torus_has_two_marked_points(two_square_torus):
    assert euler_genus(two_square_torus) == 1
    assert all(c.kind == VertexKind.REGULAR for c in vertex_classes(two_square_torus))
    assert len(vertex_classes(two_square_torus)) == 2
    assert two_square_torus.pair_labels == ["A", "B", "C"]


# ============================================================
# 校验
# ============================================================


def test_mismatched_pair_is_reported():
    tall = ((0, 0), (1, 0), (1, 2), (0, 2))
    pairs = [((0, 1), (1, 3)), ((0, 3), (1, 1)), ((0, 0), (0, 2)), ((1, 0), (1, 2))]
    s = FiniteSurface([Polygon(UNIT), Polygon(tall)], pairs)
    report = validate(s)
    assert not report.ok
    assert ViolationKind.MISMATCHED_EDGE in report.kinds()


def test_unpaired_and_disconnected():
    s = FiniteSurface([Polygon(UNIT)], [((0, 0), (0, 2))])
    assert ViolationKind.UNPAIRED in validate(s).kinds()
    pairs = [((0, 0), (0, 2)), ((0, 1), (0, 3)), ((1, 0), (1, 2)), ((1, 1), (1, 3))]
    two = FiniteSurface([Polygon(UNIT), Polygon(UNIT)], pairs)
    assert validate(two).kinds() == [ViolationKind.DISCONNECTED]


def test_clockwise_polygon_and_bad_index():
    cw = FiniteSurface([Polygon(tuple(reversed(UNIT)))], [((0, 0), (0, 2)), ((0, 1), (0, 3))])
    assert ViolationKind.NON_POSITIVE_AREA in validate(cw).kinds()
    bad = FiniteSurface([Polygon(UNIT)], [((0, 0), (0, 7))])
    assert validate(bad).kinds() == [ViolationKind.BAD_EDGE_INDEX]


def test_edge_in_two_pairs_is_not_involutive():
    s = FiniteSurface([Polygon(UNIT)], [((0, 0), (0, 2)), ((0, 0), (0, 2)), ((0, 1), (0, 3)), ((0, 2), (0, 1))])
    assert ViolationKind.NON_INVOLUTIVE in validate(s).kinds()


def test_euler_genus_refuses_lazy_surfaces():
    with pytest.raises(NotFinite):
        euler_genus(builders.staircase(2))


# ============================================================
# 惰性曲面
# ============================================================


def test_staircase_rectangles_follow_the_recurrence():
    s = builders.staircase(Fraction(5, 2))
    h = builders.staircase_heights(Fraction(5, 2))
    for n in range(-4, 5):
        w, ht = (h(n + 1), h(n)) if n % 2 == 0 else (h(n), h(n + 1))
        assert s.polygon(n).vertices[2] == (w, ht)
        assert h(n - 1) + h(n + 1) == Fraction(5, 2) * h(n)
    assert s.opposite(EdgeRef(0, builders.RIGHT)) == EdgeRef(-1, builders.LEFT)
    assert s.opposite(EdgeRef(0, builders.TOP)) == EdgeRef(1, builders.BOTTOM)


def test_staircase_window_is_valid_and_truncated():
    s = builders.staircase(3)
    report = validate(s, 12)
    assert report.ok
    assert report.window_only
    kinds = {c.kind for c in vertex_classes(s, 12)}
    assert VertexKind.BOUNDARY_TRUNCATED in kinds


def test_nine_square_staircase_window_sees_the_four_infinite_vertices():
    s = builders.staircase(2)
    classes = vertex_classes(s, 9)
    assert len(classes) == 4
    assert all(c.kind == VertexKind.BOUNDARY_TRUNCATED for c in classes)
    # 每个方格的四个角分属四个顶点
    assert all(len(c.corners) == 9 for c in classes)
    assert all(len({poly for poly, _ in c.corners}) == 9 for c in classes)


def test_staircase_lambda_below_two_is_rejected():
    with pytest.raises(DomainError):
        builders.staircase(Fraction(3, 2))


def test_staircase_origami_matches_lambda_two(staircase_origami):
    s = builders.staircase(2)
    for n in range(-5, 6):
        assert s.polygon(n) == staircase_origami.polygon(n)
        for i in range(4):
            assert s.opposite(EdgeRef(n, i)) == staircase_origami.opposite(EdgeRef(n, i))


def test_staircase_origami_window_vertices_are_regular_or_truncated(staircase_origami):
    fs = as_finite(staircase_origami, list(range(-20, 21)))
    angles = {c.total_angle_over_pi for c in vertex_classes(fs) if c.kind != VertexKind.BOUNDARY_TRUNCATED}
    assert angles <= {2}


def test_baker_surface_window():
    s = builders.baker(Fraction(1, 2))
    assert s.area() == 1
    window = builders.baker_window(s, 6)
    assert validate(s, window).ok
    top = builders.baker_top_side(s, 4)
    lengths = [s.edge_vector(e)[0] for e in top]
    assert lengths == [Fraction(-1, 2), Fraction(-1, 4), Fraction(-1, 8), Fraction(-1, 16)]


def test_zd_cover_connectivity():
    base = builders.two_square_torus()
    cover = builders.zd_cover(base, builders.Cocycle({"A": [1], "B": [-1], "C": [0]}))
    assert cover.hints["connected"]
    assert validate(cover, 10).ok
    with pytest.warns(UserWarning):
        flat = builders.zd_cover(base, builders.Cocycle({"A": [1, 0], "B": [-1, 0], "C": [0, 0]}))
    assert not flat.hints["connected"]


def test_generalized_staircase_and_step_surface_windows():
    m = builders.malaga_staircase(lambda n: Fraction(1, 1 + abs(n)))
    assert validate(m, 9).ok
    step = builders.step_surface(ratio=Fraction(1, 2))
    assert step.area() == 4
    assert validate(step, 16).ok
    with pytest.raises(DomainError):
        builders.step_surface(lambda n: 1)
    with pytest.raises(DomainError):
        builders.step_surface([1, 1, 1])


def test_origami_must_be_transitive():
    with pytest.raises(DomainError):
        builders.square_tiled(builders.OrigamiData(r=[0, 1], u=[0, 1], indices=[0, 1]))


# ============================================================
# 台球展开
# ============================================================


def test_unfolding_of_right_triangle_with_angle_pi_over_8():
    table = BilliardPolygon(
        [(0, 0), (1, 0), (0, parse_scalar("-1+1r2"))],
        [Fraction(1, 2), Fraction(1, 8), Fraction(3, 8)],
    )
    surface, stats = unfold_billiard(table)
    assert (stats.N, stats.copies, stats.genus) == (8, 16, 2)
    assert stats.genus_formula == 2
    assert validate(surface).ok
    assert [c.k for c in vertex_classes(surface)].count(3) == 1


def test_unfolding_infers_rational_angles():
    table = BilliardPolygon([(0, 0), (1, 0), (0, 1)])
    assert table.angles == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    surface, stats = unfold_billiard(table)
    assert stats.copies == 8
    assert stats.genus == 1


def test_billiard_rank():
    assert rank([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]) == 0
    irrational = QuadExt.make(0, Fraction(1, 4), 2)
    assert rank([irrational, 1 - irrational, Fraction(1, 2), Fraction(1, 2)]) == 1
    with pytest.raises(DomainError):
        rank([Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)])


# ============================================================
# GL(2) 作用与同构
# ============================================================


def test_shear_and_reflection_keep_the_surface_valid(l_shape):
    for m in (Mat2.of(1, 1, 0, 1), Mat2.of(-1, 0, 0, 1)):
        image = apply_matrix(m, l_shape)
        assert validate(image).ok
        assert euler_genus(image) == 2
        assert image.area() == 3


def test_relabelled_l_shape_is_isomorphic(l_shape):
    relabelled = builders.square_tiled(
        builders.OrigamiData(r={0: 2, 1: 1, 2: 0}, u={0: 0, 1: 2, 2: 1}, indices=[0, 1, 2])
    )
    assert isomorphic(l_shape, relabelled)


def test_torus_is_isomorphic_to_itself_and_to_its_square_shear():
    torus = builders.torus()
    assert isomorphic(torus, torus)
    assert isomorphic(torus, apply_matrix(Mat2.of(1, 1, 0, 1), torus))


def test_octagon_is_the_unfolding_of_the_pi_over_8_triangle():
    table = BilliardPolygon(
        [(0, 0), (1, 0), (0, parse_scalar("-1+1r2"))],
        [Fraction(1, 2), Fraction(1, 8), Fraction(3, 8)],
    )
    surface, _ = unfold_billiard(table)
    assert isomorphic(builders.octagon(), surface)
    assert not isomorphic(builders.octagon(), builders.l_shape())


def test_different_surfaces_are_not_isomorphic(l_shape):
    cylinder = builders.square_tiled(builders.OrigamiData(r=[1, 2, 0], u=[0, 1, 2], indices=[0, 1, 2]))
    assert not isomorphic(l_shape, cylinder)
    assert not isomorphic(l_shape, builders.torus())


def test_isomorphism_needs_finite_surfaces(l_shape):
    with pytest.raises(NotFinite):
        isomorphic(l_shape, builders.staircase(2))


def test_step_billiard_return_lengths():
    lengths, tail = builders.step_billiard_lengths(Fraction(1, 2), (1, 1), 2)
    assert lengths == [
        ("C0", 1),
        ("A1", Fraction(1, 4)),
        ("D1", Fraction(1, 4)),
        ("C1", Fraction(1, 2)),
        ("C-1", Fraction(1, 2)),
    ]
    assert tail == Fraction(3, 2)
    lengths, _ = builders.step_billiard_lengths(Fraction(1, 2), (1, 3), 1)
    assert lengths == [("B0", Fraction(1, 3)), ("C0", Fraction(2, 3))]
    with pytest.raises(DomainError):
        builders.step_billiard_lengths(1, (1, 1), 2)
    with pytest.raises(DomainError):
        builders.step_billiard_lengths(Fraction(1, 2), (0, 1), 2)
