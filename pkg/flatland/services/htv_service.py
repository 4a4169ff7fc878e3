"""
HTV 服务：由图族或有限带状图得到调和函数，拼装曲面并从几何读出模数与面积
"""

import logging
from typing import Any, Dict, Hashable, Mapping, Optional, Tuple

from flatland.core import htv
from flatland.core.config import RunConfig
from flatland.core.enums import HarmonicFamily
from flatland.core.errors import PartialResult, UsageError
from flatland.core.mat2 import Mat2
from flatland.core.scalar import Scalar, cmp, format_scalar
from flatland.core.surface import Surface
from flatland.services.run_service import LedgerMixin, RunService

logger = logging.getLogger(__name__)

DEFAULT_RADIUS = 10


def _mat(m: Mat2) -> list:
    return [format_scalar(v) for v in (m.a, m.b, m.c, m.d)]


def _distinct(values: Mapping[Hashable, Scalar]) -> list:
    out = []
    for v in values.values():
        if not any(cmp(v, w) == 0 for w in out):
            out.append(v)
    return [format_scalar(v) for v in out]


def harmonic_for(
    family: Optional[str] = None,
    lam: Optional[Scalar] = None,
    graph: Optional[Mapping[str, Any]] = None,
    **params: Any,
) -> htv.HarmonicFunction:
    """图族给出闭式解；有限图 JSON 走 Perron-Frobenius"""
    if graph is not None:
        return htv.pf_harmonic_finite(htv.FiniteRibbonGraph.from_json(graph))
    if family is None or lam is None:
        raise UsageError("give either a graph or a family with λ")
    try:
        fam = HarmonicFamily(family)
    except ValueError:
        raise UsageError(f"unknown family {family!r}; known: {[f.value for f in HarmonicFamily]}") from None
    return htv.harmonic_closed_form(fam, lam, **{k: v for k, v in params.items() if v is not None})


class HTVService(LedgerMixin):
    def __init__(self, runs: Optional[RunService] = None):
        self.runs = runs

    def assemble(self, config: RunConfig, h: htv.HarmonicFunction) -> Tuple[Surface, Dict[str, Any]]:
        radius = config.window or DEFAULT_RADIUS
        g = h.graph
        surface = htv.assemble_surface(g, h, window=radius)
        summary = self.report(g, h, surface, radius)
        status = "ok" if summary["moduli"]["all_equal"] else "error"
        self._record(config, summary, status=status)
        return surface, summary

    @staticmethod
    def report(g: htv.RibbonGraph, h: htv.HarmonicFunction, surface: Surface, radius: int) -> Dict[str, Any]:
        vertices = g.vertices() if g.is_finite else g.ball(radius)
        moduli = htv.cylinder_moduli(g, surface, vertices)
        target = 1 / h.lam
        try:
            a = htv.area(g, h, radius)
            area = {
                "value": None if a.value is None else format_scalar(a.value),
                "partial": format_scalar(a.partial),
                "tail": None if a.tail is None else format_scalar(a.tail),
                "infinite": a.infinite,
            }
        except PartialResult as exc:
            area = {"value": None, "partial": format_scalar(exc.partial.partial), "tail": None, "infinite": None}
        bounds = htv.spectral_bounds(g, radius)
        h_mat, v_mat = htv.multitwist_matrices(h.lam)
        return {
            "graph": g.name,
            "lambda": format_scalar(h.lam),
            "tail": h.tail.value,
            "vertices_checked": len(vertices),
            "moduli": {
                "horizontal": _distinct(moduli.horizontal),
                "vertical": _distinct(moduli.vertical),
                "cylinders": len(moduli.horizontal) + len(moduli.vertical),
                "target": format_scalar(target),
                "all_equal": moduli.all_equal(target),
            },
            "area": area,
            "spectral_bounds": {"lower": bounds.lower, "upper": bounds.upper},
            "multitwists": {"horizontal": _mat(h_mat), "vertical": _mat(v_mat)},
            "params": {k: format_scalar(v) if v is not None and not isinstance(v, (int, str)) else v
                       for k, v in h.params.items()},
        }

    def baker(self, config: RunConfig, q: int) -> Dict[str, Any]:
        n = htv.baker_htv_normalizer(q)
        summary = {
            "q": n.q,
            "alpha": format_scalar(n.alpha),
            "lambda": format_scalar(n.lam),
            "shear": _mat(n.shear),
            "beta2": format_scalar(n.beta2),
            "matrix": list(n.matrix()),
            "sheared_moduli": {k: format_scalar(v) for k, v in n.sheared_moduli.items()},
            "moduli": {k: format_scalar(v) for k, v in n.moduli.items()},
            "common_modulus": format_scalar(n.common_modulus),
            "subdivisions": n.subdivisions,
            "veech_generators": [_mat(m) for m in n.veech_generators()],
        }
        self._record(config, summary)
        return summary
