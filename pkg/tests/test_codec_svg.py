import json
from fractions import Fraction

import pytest

from flatland.core import builders
from flatland.core.codec import iet_from_json, iet_to_json, surface_from_json, surface_to_json
from flatland.core.cutstack import shields_steps, to_bratteli
from flatland.core.errors import UsageError
from flatland.core.flow import trace
from flatland.core.iet import baker_vertical_iet, rotation_iet
from flatland.core.isomorphism import isomorphic
from flatland.core.surface import validate
from flatland.core.svg_export import develop, surface_to_svg


def test_surface_json_keeps_the_surface(l_shape):
    obj = json.loads(json.dumps(surface_to_json(l_shape, provenance={"tool": "flatland"})))
    assert obj["provenance"] == {"tool": "flatland"}
    again = surface_from_json(obj)
    assert validate(again).ok
    assert isomorphic(l_shape, again)


def test_staircase_window_json_has_a_boundary():
    obj = surface_to_json(builders.staircase(2), window=3)
    assert obj["boundary"]
    assert len(obj["polygons"]) == len(obj["labels"])
    assert surface_from_json(obj).allow_boundary


@pytest.mark.parametrize("obj", [{}, {"polygons": 3, "pairing": []}, {"polygons": [[["x", 0]]], "pairing": []}])
def test_malformed_surface_json(obj):
    with pytest.raises(UsageError):
        surface_from_json(obj)


def test_full_iet_is_written_as_permutation_and_lengths():
    obj = iet_to_json(rotation_iet(Fraction(1, 3)))
    assert obj["alphabet"] == ["A", "B"]
    assert obj["top"] == [0, 1]
    assert obj["bottom"] == [1, 0]
    assert obj["lengths"] == [{"rat": [2, 3]}, {"rat": [1, 3]}]
    assert iet_from_json(obj).eval(Fraction(1, 2)) == Fraction(5, 6)


def test_partial_iet_is_written_as_pieces():
    obj = iet_to_json(baker_vertical_iet(Fraction(1, 2), 3))
    assert len(obj["pieces"]) == 3
    assert iet_from_json(obj).undefined_measure() == Fraction(1, 8)


def test_iet_generators_and_errors():
    f = iet_from_json({"generator": "rotation", "params": {"a": "1/3"}})
    assert f(Fraction(5, 6)) == Fraction(1, 6)
    with pytest.raises(UsageError):
        iet_from_json({"generator": "nope"})
    with pytest.raises(UsageError):
        iet_from_json({"alphabet": ["A", "B"], "top": [0, 0], "bottom": [1, 0], "lengths": [1, 1]})


def test_development_places_glued_squares_side_by_side(l_shape):
    offsets = develop(l_shape)
    assert len(offsets) == 3
    assert len(set(offsets.values())) == 3


def test_l_shape_svg(l_shape, golden):
    traj = trace(l_shape, 0, (Fraction(1, 3), Fraction(1, 5)), (2, 1))
    segments = [(s.poly, s.start, s.end) for s in traj.segments]
    # 0 → 1 → 1（上边贴自己的下边）→ 0，回到起点
    assert [poly for poly, _, _ in segments] == [0, 1, 1, 0]
    svg = surface_to_svg(l_shape, segments=segments, header="flatland test")
    assert svg.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<!-- flatland test -->')
    assert svg.count("<polygon") == 3
    assert svg.count("<text") == 12
    assert svg.count("<line") == len(segments)
    golden("l_shape.svg", svg)


def test_shields_bratteli_dot(golden):
    dot = to_bratteli(shields_steps(2)).to_dot(header="flatland shields k=2")
    assert dot.count(" -> ") == 10
    golden("shields_2.dot", dot)
