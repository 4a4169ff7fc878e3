from fractions import Fraction

import pytest

from flatland.core import builders, htv
from flatland.core.config import RunConfig
from flatland.core.enums import CommandEnum, HarmonicFamily, TailKind
from flatland.core.errors import DomainError, TruncationTooCoarse
from flatland.core.flow import cylinders_in_direction, multitwist_check
from flatland.core.mat2 import Mat2
from flatland.core.scalar import QuadExt, cmp
from flatland.core.surface import EdgeRef, apply_matrix, euler_genus, validate
from flatland.services.htv_service import HTVService, harmonic_for


def test_z_graph_with_constant_h_is_the_staircase():
    h = htv.harmonic_closed_form(HarmonicFamily.Z, 2)
    surface = htv.assemble_surface(h.graph, h, window=8)
    stairs = builders.staircase(2)
    for n in range(-4, 5):
        assert surface.polygon(n) == stairs.polygon(n)
        for side in range(4):
            assert surface.opposite(EdgeRef(n, side)) == stairs.opposite(EdgeRef(n, side))


@pytest.mark.parametrize("lam, target", [(2, Fraction(1, 2)), (Fraction(5, 2), Fraction(2, 5))])
def test_z_graph_moduli_are_inverse_lambda(lam, target):
    h = htv.harmonic_closed_form(HarmonicFamily.Z, lam)
    surface = htv.assemble_surface(h.graph, h, window=6)
    report = htv.cylinder_moduli(h.graph, surface, h.graph.ball(6))
    assert report.horizontal and report.vertical
    assert report.all_equal(target)


@pytest.mark.parametrize("direction", [(1, 0), (0, 1)])
def test_z_graph_multitwist_at_five_halves(direction):
    h = htv.harmonic_closed_form(HarmonicFamily.Z, Fraction(5, 2))
    surface = htv.assemble_surface(h.graph, h, window=10)
    cyls = cylinders_in_direction(surface, direction, window=20)
    assert len(cyls) >= 2
    assert multitwist_check(surface, direction, Fraction(5, 2), window=20)
    assert not multitwist_check(surface, direction, 2, window=20)


def test_modified_n_moduli():
    h = htv.harmonic_closed_form(HarmonicFamily.MODIFIED_N, 3, k=3)
    assert h(("leaf", 1)) == Fraction(1, 3)
    assert h(1) == 2
    surface = htv.assemble_surface(h.graph, h, window=8)
    report = htv.cylinder_moduli(h.graph, surface, h.graph.ball(8))
    assert report.horizontal[0] == Fraction(1, 3)
    assert report.all_equal(Fraction(1, 3))
    assert h.tail == TailKind.DIVERGENT
    assert htv.area(h.graph, h, 5).infinite


def test_tree_with_constant_h():
    h = htv.harmonic_closed_form(HarmonicFamily.TREE, 3, q=2)
    assert h((4, (1, 0))) == 1
    htv.check_harmonic(h.graph, h, h.graph.ball(4))


@pytest.mark.parametrize(
    "family, lam, params",
    [
        (HarmonicFamily.Z, 2, {"B": 1}),
        (HarmonicFamily.MODIFIED_N, 2, {"k": 5}),
        (HarmonicFamily.TREE, 3, {"q": 3}),
    ],
)
def test_non_positive_or_impossible_h_is_rejected(family, lam, params):
    # 默认参数下同一个 λ 可行，拒绝来自 params
    assert htv.harmonic_closed_form(family, lam).lam == lam
    with pytest.raises(DomainError):
        htv.harmonic_closed_form(family, lam, **params)


def test_finite_graph_uses_perron_frobenius():
    g = htv.FiniteRibbonGraph([0], [0], [(0, 0), (0, 0)], name="two squares")
    h = htv.pf_harmonic_finite(g)
    assert abs(h.lam - 2) < 1e-9
    surface = htv.assemble_surface(g, h)
    assert validate(surface).ok
    report = htv.cylinder_moduli(g, surface, g.vertices())
    assert report.horizontal
    assert report.all_equal(1 / h.lam)
    assert cmp(htv.area(g, h).value, 2) == 0


def test_single_edge_graph_is_the_unit_torus():
    g = htv.FiniteRibbonGraph([0], [0], [(0, 0)], name="K2")
    h = htv.pf_harmonic_finite(g)
    assert abs(h.lam - 1) < 1e-9
    assert abs(h(("I", 0)) - h(("J", 0))) < 1e-9
    surface = htv.assemble_surface(g, h)
    assert validate(surface).ok
    assert euler_genus(surface) == 1
    assert abs(htv.area(g, h).value - 1) < 1e-9


def test_finite_graph_rejects_bad_input():
    with pytest.raises(DomainError):
        htv.FiniteRibbonGraph([0], [0], [])
    with pytest.raises(DomainError):
        htv.FiniteRibbonGraph([0, 1], [0, 1], [(0, 0), (1, 1)])


def test_baker_normalizer_moduli():
    n = htv.baker_htv_normalizer(2)
    sqrt2 = QuadExt.make(0, 1, 2)
    assert n.moduli["H0"] == sqrt2
    assert n.common_modulus == sqrt2 / 3
    assert n.subdivisions == 3
    assert n.lam == QuadExt.make(0, Fraction(3, 2), 2)
    with pytest.raises(DomainError):
        htv.baker_htv_normalizer(1)


@pytest.mark.parametrize("q", [2, 3])
def test_baker_sheared_moduli_are_measured_on_the_surface(q):
    a = Fraction(1, q)
    n = htv.baker_htv_normalizer(q)
    assert n.sheared_moduli == {"H0": 1 - a, "Hj": a * (1 - a) / (1 + a), "V": 1 / ((1 + a) * (1 - a))}


def test_sheared_baker_has_vertical_cylinders_of_one_modulus():
    b = builders.baker(Fraction(1, 2))
    image = apply_matrix(htv.baker_htv_normalizer(2).shear, b)
    vertical = cylinders_in_direction(image, (0, 1), window=builders.baker_window(b, 6))
    assert len(vertical) >= 2
    assert all(c.modulus == Fraction(4, 3) for c in vertical)


def test_service_summary_reports_equal_moduli():
    h = harmonic_for("modifiedN", 3, k=3)
    _, summary = HTVService().assemble(RunConfig(command=CommandEnum.HTV, window=6), h)
    assert summary["moduli"]["all_equal"]
    assert summary["moduli"]["target"] == "1/3"
    assert summary["area"]["infinite"]


def test_adjacency_apply_on_the_z_graph():
    g = htv.z_graph()
    out = htv.adjacency_apply(g, lambda n: Fraction(2) ** n, [-2, 0, 3])
    assert out == {-2: Fraction(5, 8), 0: Fraction(5, 2), 3: 20}
    with pytest.raises(TruncationTooCoarse):
        htv.adjacency_apply(g, {0: 1}, [0])


def test_spectral_bounds_from_degrees():
    bounds = htv.spectral_bounds(htv.z_graph())
    assert (bounds.min_degree, bounds.max_degree) == (2, 2)
    assert bounds.lower == 2.0
    assert bounds.upper == 2
    loop = htv.FiniteRibbonGraph([0], [0], [(0, 0), (0, 0)])
    assert htv.spectral_bounds(loop).upper == 2


def test_multitwist_matrices():
    h, v = htv.multitwist_matrices(Fraction(5, 2))
    assert h == Mat2.of(1, Fraction(5, 2), 0, 1)
    assert v == Mat2.of(1, 0, Fraction(-5, 2), 1)
    with pytest.raises(DomainError):
        htv.multitwist_matrices(0)
