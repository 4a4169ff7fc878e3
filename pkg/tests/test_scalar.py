from fractions import Fraction

import pytest

from flatland.core.config import get_database_url, tolerance
from flatland.core.enums import ScalarMode
from flatland.core.errors import DomainError, ModeError, UsageError
from flatland.core.scalar import (
    QuadExt,
    cmp,
    floor_scalar,
    format_scalar,
    mode_of,
    parse_scalar,
    scalar_from_json,
    scalar_to_json,
    solve_char_quadratic,
    sqrt_scalar,
)

SQRT2 = QuadExt.make(0, 1, 2)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3", Fraction(3)),
        ("-2/6", Fraction(-1, 3)),
        ("2+1r5", QuadExt.make(2, 1, 5)),
        ("1/2-3/4√2", QuadExt.make(Fraction(1, 2), Fraction(-3, 4), 2)),
        ("r2", SQRT2),
        ("2r4", Fraction(4)),
    ],
)
def test_parse_exact_forms(text, expected):
    assert parse_scalar(text) == expected


def test_parse_decimal_is_float():
    x = parse_scalar("0.25")
    assert isinstance(x, float)
    assert mode_of(x) == ScalarMode.FLOAT


@pytest.mark.parametrize("text", ["", "1/0", "abc", "inf"])
def test_parse_rejects(text):
    with pytest.raises(UsageError):
        parse_scalar(text)


def test_quad_arithmetic_is_exact():
    x = QuadExt.make(1, 1, 2)
    assert x * x == QuadExt.make(3, 2, 2)
    assert (x - 1) * (x - 1) == 2
    assert 1 / SQRT2 == QuadExt.make(0, Fraction(1, 2), 2)
    assert x.conjugate() * x == -1


def test_quad_sign_and_order():
    assert QuadExt.make(-1, 1, 2) > 0
    assert QuadExt.make(3, -2, 2) > 0
    assert QuadExt.make(1, -1, 2) < 0
    assert cmp(SQRT2, Fraction(141, 100)) > 0


def test_mixing_fields_is_a_mode_error():
    with pytest.raises(ModeError):
        cmp(SQRT2, QuadExt.make(0, 1, 3))


def test_sqrt_stays_in_field():
    assert sqrt_scalar(Fraction(9, 4)) == Fraction(3, 2)
    assert sqrt_scalar(QuadExt.make(3, 2, 2)) == QuadExt.make(1, 1, 2)
    with pytest.raises(ModeError):
        sqrt_scalar(SQRT2)
    with pytest.raises(DomainError):
        sqrt_scalar(Fraction(-1))


def test_floor_of_quadratic_irrational():
    assert floor_scalar(QuadExt.make(0, 10, 2)) == 14
    assert floor_scalar(QuadExt.make(0, -1, 2)) == -2


def test_char_quadratic_roots():
    r_plus, r_minus = solve_char_quadratic(Fraction(5, 2))
    assert (r_plus, r_minus) == (2, Fraction(1, 2))
    r_plus, r_minus = solve_char_quadratic(3)
    assert r_plus * r_minus == 1
    assert r_plus + r_minus == 3
    with pytest.raises(DomainError):
        solve_char_quadratic(Fraction(3, 2))


def test_json_forms():
    assert scalar_to_json(Fraction(2, 3)) == {"rat": [2, 3]}
    assert scalar_to_json(QuadExt.make(1, Fraction(1, 2), 5)) == {"quad": [1, 1, 1, 2, 5]}
    assert scalar_from_json({"f64": 0.5}) == 0.5
    assert scalar_from_json("1+1r2") == QuadExt.make(1, 1, 2)
    with pytest.raises(UsageError):
        scalar_from_json(True)


def test_format_scalar():
    assert format_scalar(Fraction(3, 4)) == "3/4"
    assert format_scalar(QuadExt.make(0, Fraction(1, 3), 2)) == "1/3√2"
    assert format_scalar(QuadExt.make(1, -1, 5)) == "1-√5"


def test_float_comparison_uses_tolerance():
    assert cmp(0.1 + 0.2, 0.3) == 0
    with tolerance(1e-20):
        assert cmp(0.1 + 0.2, 0.3) != 0
    with pytest.raises(ValueError):
        with tolerance(0):
            pass


def test_database_url_follows_the_data_dir(monkeypatch, tmp_path):
    home = tmp_path / "home"
    monkeypatch.delenv("FLATLAND_DB_URL", raising=False)
    monkeypatch.setenv("FLATLAND_HOME", str(home))
    assert get_database_url() == f"sqlite:///{home / 'runs.db'}"
    assert home.is_dir()
    monkeypatch.setenv("FLATLAND_DB_URL", "sqlite://")
    assert get_database_url() == "sqlite://"
