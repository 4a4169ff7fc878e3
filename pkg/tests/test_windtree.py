import math
import os
from fractions import Fraction

import numpy as np
import pytest

from flatland.core.errors import DomainError
from flatland.core.windtree import in_E, windtree_diffusion, windtree_path, windtree_table

HALF = Fraction(1, 2)


def _nowhere(m, n):
    return np.zeros(np.shape(m), dtype=bool)


def test_table_parameters():
    with pytest.raises(DomainError):
        windtree_table(1, HALF)
    t = windtree_table(HALF, Fraction(1, 4))
    assert t.rectangle(2, -1) == (Fraction(7, 4), Fraction(9, 4), Fraction(-9, 8), Fraction(-7, 8))
    assert t.blocked(0.1, 0.1)
    assert not t.blocked(0.4, 0.0)


def test_exceptional_set():
    assert in_E(Fraction(1, 3), HALF)
    assert in_E(Fraction(3, 5), Fraction(1, 4))
    assert not in_E(HALF, HALF)
    assert not in_E(Fraction(1, 3), Fraction(1, 3))
    assert not in_E(0.3, 0.5)


def test_path_reflects_off_a_vertical_face():
    table = windtree_table(HALF, HALF)
    events = windtree_path(table, (0.4, 0.05), (-1, 0.1), max_events=2)
    first, second = events
    assert math.isclose(first.point[0], 0.25)
    assert first.direction[0] > 0
    assert math.isclose(first.direction[1], 0.1 / math.hypot(1, 0.1))
    assert math.isclose(second.point[0], 0.5)


def test_path_without_obstacles_is_a_straight_line():
    table = windtree_table(HALF, HALF, obstacle=_nowhere)
    events = windtree_path(table, (0.1, 0.2), (1, 0.7), max_events=25)
    last = events[-1]
    dx, dy = 1 / math.hypot(1, 0.7), 0.7 / math.hypot(1, 0.7)
    assert math.isclose(last.point[0], 0.1 + last.time * dx, abs_tol=1e-9)
    assert math.isclose(last.point[1], 0.2 + last.time * dy, abs_tol=1e-9)


def test_path_rejects_bad_starts():
    table = windtree_table(HALF, HALF)
    with pytest.raises(DomainError):
        windtree_path(table, (0.0, 0.0), (1, 0.3))
    with pytest.raises(DomainError):
        windtree_path(table, (0.4, 0.4), (1, 0))


def _run(seed, direction=0.7):
    return windtree_diffusion(
        HALF, HALF, direction, horizon=200.0, n_orbits=8, seed=seed, grid_points=10, bootstrap=50
    )


def test_diffusion_is_reproducible():
    a, b = _run(3), _run(3)
    assert a.slopes == b.slopes
    assert (a.median, a.ci_low, a.ci_high) == (b.median, b.ci_low, b.ci_high)
    assert len(a.slopes) == 8
    assert a.ci_low <= a.ci_high
    assert not np.isnan(np.array(a.distances)).any()
    assert a.generic_direction


def test_diffusion_flags_rational_directions():
    assert not _run(1, direction=(1, 2)).generic_direction
    with pytest.raises(DomainError):
        windtree_diffusion(HALF, HALF, 0.7, horizon=5.0)
    with pytest.raises(DomainError):
        windtree_diffusion(HALF, HALF, (1, 0))


def test_empty_table_diffuses_ballistically():
    result = windtree_diffusion(
        HALF, HALF, 0.7, horizon=1000.0, n_orbits=4, seed=5, grid_points=8, bootstrap=20, obstacle=_nowhere
    )
    assert all(math.isclose(s, 1.0, abs_tol=1e-6) for s in result.slopes)
    assert math.isclose(result.median, 1.0, abs_tol=1e-6)


@pytest.mark.slow
@pytest.mark.skipif(not os.environ.get("FLATLAND_SLOW"), reason="set FLATLAND_SLOW=1 to run")
def test_half_half_diffusion_slope_is_sub_ballistic():
    result = windtree_diffusion(HALF, HALF, 0.7, horizon=1e6, n_orbits=100, seed=2024)
    assert 0.5 <= result.median <= 0.85
