from fractions import Fraction

import pytest

from flatland.core.cutstack import (
    CutStackStep,
    StackFamily,
    apply_step,
    build_family,
    figure_steps,
    odometer_steps,
    shields_example,
    shields_steps,
    steps_from_json,
    steps_to_json,
    to_bratteli,
    to_iet,
)
from flatland.core.errors import DomainError
from flatland.core.iet import baker_vertical_iet


def _spans(iet):
    return [(p.top, p.length, p.shift) for p in iet.pieces]


def test_odometer_is_the_baker_vertical_map():
    k = 4
    stacked = to_iet(odometer_steps(k))
    assert _spans(stacked.iet) == _spans(baker_vertical_iet(Fraction(1, 2), k))
    assert stacked.undefined_measure == Fraction(1, 2**k)


def test_empty_steps_give_the_empty_map():
    stacked = to_iet([])
    assert stacked.iet.pieces == []
    assert stacked.undefined_measure == 1


def test_figure_example():
    family = build_family(figure_steps())
    assert [s.height for s in family.stacks] == [2, 2, 1, 3]
    assert all(s.width == Fraction(1, 8) for s in family.stacks)
    assert family.measure() == 1
    stacked = to_iet(figure_steps())
    assert stacked.undefined_measure == Fraction(1, 2)
    assert stacked.iet.domain_measure() == Fraction(1, 2)


def test_steps_survive_json():
    steps = figure_steps()
    again = steps_from_json(steps_to_json(steps))
    assert [s.cuts for s in again] == [s.cuts for s in steps]
    assert [s.words for s in again] == [s.words for s in steps]


def test_bad_steps_are_rejected():
    unit = StackFamily.unit()
    with pytest.raises(DomainError):
        apply_step(unit, CutStackStep([[Fraction(1, 4), Fraction(3, 4)]], [[(1, 1), (1, 2)]]))
    with pytest.raises(DomainError):
        apply_step(unit, CutStackStep([[Fraction(1, 2), Fraction(1, 2)]], [[(1, 1)]]))
    with pytest.raises(DomainError):
        apply_step(unit, CutStackStep([[Fraction(1, 2), Fraction(1, 3)]], [[(1, 1)], [(1, 2)]]))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_shields_invariant_is_log_two(k):
    result = shields_example(k)
    assert result.log2_coefficient == 1
    assert len(result.family.stacks) == result.q
    assert all(s.width == result.w for s in result.family.stacks)
    assert result.family.measure() == 1


def test_shields_bratteli_levels():
    k = 3
    diagram = to_bratteli(shields_steps(k))
    assert diagram.level_sizes() == [1, 2, 4, 16]
    assert diagram.level_sizes()[-1] == 2 ** (2 ** (k - 1))
    assert len(diagram.edges) == 2 + 8 + 32
    dot = diagram.to_dot(header="flatland bratteli")
    assert dot.startswith("// flatland")
    assert "digraph bratteli {" in dot
