from fractions import Fraction

import pytest

from flatland.core.enums import OrbitStatus
from flatland.core.errors import DomainError, ModeError, TruncationTooCoarse, Undefined
from flatland.core.iet import (
    IET,
    Piece,
    abramov,
    baker_iet,
    baker_vertical_iet,
    entropy_upper_bound,
    find_connections,
    golden_rotation,
    orbit,
    periodic_components,
    rotation_iet,
    tail_from_lengths,
)
from flatland.core.keane import (
    check_deltas,
    coding_period,
    default_delta,
    in_cantor,
    keane_counterexample,
    keane_unperturbed,
)
from flatland.core.malaga import (
    malaga_from_staircase,
    malaga_orbit,
    malaga_step,
    malaga_trace_staircase,
    sixths_preserved,
)

THIRD = Fraction(1, 3)


@pytest.fixture
def third_rotation():
    return rotation_iet(THIRD)


# ============================================================
# 求值与轨道
# ============================================================


def test_rotation_eval(third_rotation):
    assert third_rotation.top_order() == ["A", "B"]
    assert third_rotation.bottom_order() == ["B", "A"]
    assert third_rotation.eval(Fraction(1, 2)) == Fraction(5, 6)
    assert third_rotation(Fraction(5, 6)) == Fraction(1, 6)
    assert third_rotation.inverse(Fraction(5, 6)) == Fraction(1, 2)
    with pytest.raises(Undefined):
        third_rotation.eval(Fraction(2, 3))


def test_orbit_of_rotation(third_rotation):
    o = orbit(third_rotation, Fraction(1, 6), 3)
    assert o.points == [Fraction(1, 6), Fraction(1, 2), Fraction(5, 6), Fraction(1, 6)]
    assert o.labels == ["A", "A", "B"]
    assert o.status == OrbitStatus.COMPLETE


def test_orbit_stops_at_singularity(third_rotation):
    o = orbit(third_rotation, Fraction(0), 5)
    assert o.points == [0]
    assert o.status == OrbitStatus.LEFT_DOMAIN


def test_orbit_into_unresolved_region_is_truncated():
    f = baker_vertical_iet(Fraction(1, 2), 3)
    o = orbit(f, Fraction(15, 16), 2)
    assert o.status == OrbitStatus.TRUNCATED


def test_overlapping_pieces_are_rejected():
    with pytest.raises(DomainError):
        IET([Piece("A", 0, Fraction(1, 2), 0), Piece("B", Fraction(1, 4), Fraction(1, 2), Fraction(1, 2))])
    with pytest.raises(DomainError):
        IET.from_orders(["A", "B"], ["A", "C"], {"A": 1, "B": 1, "C": 1})
    with pytest.raises(DomainError):
        rotation_iet(1)


# ============================================================
# 连接与周期分量
# ============================================================


def test_rational_rotation_connection_and_periods(third_rotation):
    assert [(c.m, c.x, c.y) for c in find_connections(third_rotation, 5)] == [(1, THIRD, 2 * THIRD)]
    comps = periodic_components(third_rotation, 3)
    assert [(c.lo, c.hi, c.period) for c in comps] == [
        (0, THIRD, 3),
        (THIRD, 2 * THIRD, 3),
        (2 * THIRD, 1, 3),
    ]
    assert comps[0].coding == ("A", "A", "B")


def test_golden_rotation_has_no_connection():
    assert find_connections(golden_rotation(), 50) == []
    assert periodic_components(golden_rotation(), 20) == []


def test_float_iet_refuses_exact_searches():
    f = IET.from_orders(["A", "B"], ["B", "A"], {"A": 0.3, "B": 0.7})
    with pytest.raises(ModeError):
        find_connections(f, 3)


def test_baker_vertical_connections():
    f = baker_vertical_iet(Fraction(1, 2), 8)
    found = {c.x: c for c in find_connections(f, 200)}
    for k in range(2, 6):
        c = found[Fraction(1, 2**k)]
        assert c.y == 1 - Fraction(1, 2**k)
        assert c.m == 2 ** (k - 1) - 1


def test_periodic_strict_mode_refuses_truncation():
    f = keane_unperturbed(3)
    with pytest.raises(TruncationTooCoarse):
        periodic_components(f, 10, strict=True)


def test_baker_iet_pieces_match_the_direction():
    f = baker_iet(Fraction(1, 2), (1, 2), 4)
    assert f.piece("A1").length == 1
    assert f.piece("B1").length == Fraction(1, 2)
    assert f.total == 3
    assert f.undefined_measure() == Fraction(3, 16)


# ============================================================
# 熵
# ============================================================


def test_baker_entropy_bound_tends_to_zero():
    f = baker_vertical_iet(Fraction(1, 2), 60)
    assert f.tail(5) == Fraction(1, 32)
    bound = entropy_upper_bound(f.tail, range(2, 46))
    assert bound.ms[-1] == 45
    assert bound.last < 1e-9
    assert all(a >= b for a, b in zip(bound.values, bound.values[1:]))
    assert all(a >= b for a, b in zip(bound.running_inf, bound.running_inf[1:]))


def test_tail_from_lengths():
    tail = tail_from_lengths([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)], remainder=Fraction(1, 8))
    assert tail(0) == 1
    assert tail(2) == Fraction(1, 4)
    with pytest.raises(TruncationTooCoarse):
        tail(5)
    with pytest.raises(DomainError):
        tail_from_lengths([Fraction(1, 4), Fraction(1, 2)])
    assert tail_from_lengths([Fraction(1, 4), Fraction(1, 2)], sort=True)(1) == Fraction(1, 4)


def test_abramov():
    assert abramov(Fraction(1), Fraction(2)) == Fraction(1, 2)
    with pytest.raises(DomainError):
        abramov(1, 0)


# ============================================================
# Keane 反例
# ============================================================


def test_keane_constraints_hold():
    assert check_deltas(default_delta, 30).ok
    with pytest.raises(DomainError):
        check_deltas(lambda i: Fraction(1, 2 * i), 5)


def test_keane_counterexample_has_no_connection():
    f = keane_counterexample(n=30)
    assert find_connections(f, 20) == []


def test_keane_counterexample_keeps_cantor_endpoints():
    f = keane_counterexample(n=30)
    assert f.piece("a1").shift == 2 * THIRD
    for x in (Fraction(2, 9), Fraction(1, 9), Fraction(2, 27), Fraction(8, 27), Fraction(20, 81)):
        assert in_cantor(x)
        assert in_cantor(f.eval(x))


def _triadic_endpoints(depth):
    ends = set()
    lefts = [Fraction(0)]
    for m in range(1, depth + 1):
        lefts = [x + d * THIRD**m for x in lefts for d in (0, 2)]
        ends.update(lefts)
        ends.update(x + THIRD**m for x in lefts)
    return sorted(ends)


def test_keane_counterexample_maps_triadic_endpoints_into_the_cantor_set():
    f = keane_counterexample(n=30)
    points = _triadic_endpoints(10)
    assert len(points) == 2**11
    checked = 0
    for x in points:
        try:
            y = f.eval(x)
        except (Undefined, TruncationTooCoarse):
            # 0、1/3 是分量端点，1 在未展开的尾部
            continue
        assert in_cantor(y)
        checked += 1
    assert checked == len(points) - 3


def test_in_cantor():
    assert in_cantor(Fraction(1, 4))
    assert in_cantor(THIRD)
    assert not in_cantor(Fraction(1, 2))
    assert not in_cantor(Fraction(5, 4))


def test_unperturbed_periodic_codings():
    assert coding_period(3) == ["b3", "a1", "a2", "a1"]
    codings = {c.coding for c in periodic_components(keane_unperturbed(4), 4)}
    assert ("b1",) in codings
    assert ("b2", "a1") in codings
    assert tuple(coding_period(3)) in codings


# ============================================================
# Málaga 映射
# ============================================================


def test_malaga_orbit():
    steps = malaga_orbit(lambda n: THIRD, (Fraction(0), 0), 3)
    assert steps == [(0, 0), (THIRD, 1), (2 * THIRD, 0), (0, 1)]
    with pytest.raises(DomainError):
        malaga_step(lambda n: Fraction(3, 2), (Fraction(0), 0))


def test_sixths_preserved():
    assert sixths_preserved(lambda n: THIRD if n % 2 else 2 * THIRD, range(-3, 4))
    assert not sixths_preserved(lambda n: Fraction(1, 4), [0])


def test_staircase_flow_replays_malaga_orbit():
    h = lambda n: 1  # noqa: E731
    direction = (1, 3)
    alphas = malaga_from_staircase(h, direction)
    assert alphas(0) == 2 * THIRD
    start = (Fraction(1, 10), 0)
    replay = malaga_trace_staircase(h, direction, start, 6)
    assert replay.states == malaga_orbit(alphas, start, 6)
