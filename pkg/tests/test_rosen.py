import math
from fractions import Fraction

import numpy as np
import pytest

from flatland.core.enums import ExpansionStatus, MatrixClass
from flatland.core.errors import DomainError
from flatland.core.mat2 import Mat2, classify
from flatland.core.rosen import (
    expansion,
    funnel_generator,
    funnel_length,
    in_fundamental_domain,
    in_gap,
    inverse_word,
    limit_set_gap,
    max_limit_point,
    reduce_to_domain,
    rosen_map,
    word_matrix,
)

LAM = Fraction(5, 2)


def test_single_digit_expansion():
    e = expansion(Fraction(2, 5), LAM)
    assert e.digits == [(1, 1)]
    assert e.status == ExpansionStatus.TERMINATED
    assert e.convergents() == [Fraction(2, 5)]


def test_rosen_map_domain():
    assert rosen_map(Fraction(0), LAM).terminated
    with pytest.raises(DomainError):
        rosen_map(Fraction(9, 10), LAM)


def test_max_limit_point_orbit():
    x = max_limit_point(LAM)
    assert x == Fraction(1, 2)
    e = expansion(x, LAM, 10)
    assert e.digits == [(1, 1)] + [(-1, 1)] * 9
    assert e.status == ExpansionStatus.DEPTH_REACHED
    assert e.growth_ok and e.approximation_ok


@pytest.mark.parametrize("lam", [LAM, Fraction(3)])
def test_random_expansions_respect_growth_and_approximation(lam):
    rng = np.random.default_rng(20240611)
    limit = int(997 * 2 / lam)
    for num in rng.integers(-limit, limit + 1, size=1000):
        e = expansion(Fraction(int(num), 997), lam, 30)
        assert e.growth_ok
        assert e.approximation_ok
        assert all(q > 0 for q in e.q)


def test_gap_endpoints_are_fixed_points_of_the_funnel_generator():
    lo, hi = limit_set_gap(LAM)
    assert (lo, hi) == (Fraction(1, 2), 2)
    m = funnel_generator(LAM)
    for z in (lo, hi):
        assert m.c * z * z + (m.d - m.a) * z - m.b == 0
    assert classify(m) == MatrixClass.HYPERBOLIC
    assert in_gap(1, LAM)
    assert not in_gap(2, LAM)
    with pytest.raises(DomainError):
        limit_set_gap(2)


def test_funnel_length_trace_identity():
    ell = funnel_length(LAM)
    assert math.isclose(2 * math.cosh(ell / 2), float(LAM * LAM - 2), rel_tol=1e-12)


def test_reduction_into_the_fundamental_domain():
    z = (Fraction(7, 3), Fraction(1, 10))
    red = reduce_to_domain(z, LAM)
    assert red.word == [("h", -1), ("v", 2)]
    assert red.point == (Fraction(2, 25), Fraction(9, 25))
    assert in_fundamental_domain(red.point, LAM)
    assert red.matrix(LAM).mobius(z) == red.point
    with pytest.raises(DomainError):
        reduce_to_domain((0, 0), LAM)


def test_random_points_reduce_into_the_fundamental_domain():
    rng = np.random.default_rng(20240612)
    xs = rng.integers(-5000, 5001, size=1000)
    ys = rng.integers(1, 1001, size=1000)
    for a, b in zip(xs, ys):
        # Im z ∈ [0.01, 10]
        z = (Fraction(int(a), 100), Fraction(int(b), 100))
        red = reduce_to_domain(z, LAM)
        assert in_fundamental_domain(red.point, LAM)
        assert red.matrix(LAM).mobius(z) == red.point


def test_word_matrix_composes_in_action_order():
    word = [("h", 1), ("v", -1)]
    m = word_matrix(word, LAM)
    assert m == Mat2.v(-LAM) @ Mat2.h(LAM)
    assert (word_matrix(inverse_word(word), LAM) @ m).is_identity()
    assert m.det() == 1
