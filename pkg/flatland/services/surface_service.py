"""
曲面服务：按族名构造曲面，汇总校验、顶点类与亏格，判定同构，追踪方向流
"""

import logging
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from flatland.core import builders
from flatland.core.billiards import BilliardPolygon, rank, unfold_billiard
from flatland.core.codec import surface_from_json
from flatland.core.config import RunConfig
from flatland.core.errors import DomainError, NotFinite, UsageError
from flatland.core.flow import (
    Trajectory,
    cylinders_in_direction,
    multitwist_check,
    saddle_connections_in_direction,
    trace,
)
from flatland.core.isomorphism import isomorphic
from flatland.core.scalar import Scalar, format_scalar, scalar_from_json
from flatland.core.surface import FiniteSurface, Surface, as_finite, euler_genus, validate, vertex_classes
from flatland.services.run_service import LedgerMixin, RunService

logger = logging.getLogger(__name__)

Extras = Dict[str, Any]
SurfaceFactory = Callable[[Mapping[str, Any]], Tuple[Surface, Extras]]


# ============================================================
# 参数解析：命令行给字符串，API 给 JSON，两者都接受
# ============================================================


def param_scalar(params: Mapping[str, Any], key: str, default: Any = None) -> Scalar:
    value = params.get(key, default)
    if value is None:
        raise UsageError(f"missing parameter {key!r}")
    return scalar_from_json(value)


def param_scalars(value: Any) -> List[Scalar]:
    """`1/2,1/4` 或 JSON 列表"""
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)) or not value:
        raise UsageError(f"expected a non-empty list of scalars, got {value!r}")
    return [scalar_from_json(v) for v in value]


def param_points(value: Any) -> List[Tuple[Scalar, Scalar]]:
    """`x,y;x,y;...` 或 [[x, y], ...]"""
    if isinstance(value, str):
        value = [p.split(",") for p in value.split(";") if p.strip()]
    try:
        pts = [(scalar_from_json(x), scalar_from_json(y)) for x, y in value]
    except (TypeError, ValueError):
        raise UsageError(f"expected a list of points, got {value!r}") from None
    if len(pts) < 3:
        raise UsageError("a polygon needs at least three vertices")
    return pts


def _plain(make: Callable[[Mapping[str, Any]], Surface]) -> SurfaceFactory:
    return lambda p: (make(p), {})


def _periodic_heights(p: Mapping[str, Any]) -> Callable[[int], Scalar]:
    hs = param_scalars(p.get("h", "1"))
    return lambda n: hs[n % len(hs)]


def _billiard(p: Mapping[str, Any]) -> Tuple[Surface, Extras]:
    if "vertices" not in p:
        raise UsageError("billiard needs vertices=x,y;x,y;...")
    angles = [Fraction(str(a)) for a in param_scalars(p["angles"])] if p.get("angles") else None
    table = BilliardPolygon(param_points(p["vertices"]), angles)
    surface, stats = unfold_billiard(table)
    extras = {
        "N": stats.N,
        "copies": stats.copies,
        "genus_formula": format_scalar(stats.genus_formula),
        "angles_over_pi": [format_scalar(a) for a in table.angles],
        "rank": rank(table.angles),
    }
    return surface, extras


def _zd_cover(p: Mapping[str, Any]) -> Tuple[Surface, Extras]:
    """底曲面取 2×1 环面，上同调类按边对标签 A、B、C 给出，例如 A=1,B=-1,C=0"""
    raw = p.get("cocycle")
    if raw is None:
        raise UsageError("zd_cover needs cocycle=A:1,B:-1,C:0")
    if isinstance(raw, str):
        raw = {k: [int(x) for x in v.split("|")] for k, v in (item.split(":") for item in raw.split(","))}
    surface = builders.zd_cover(builders.two_square_torus(), builders.Cocycle(raw))
    return surface, {"rank": surface.hints["rank"], "connected": surface.hints["connected"]}


SURFACE_FAMILIES: Dict[str, SurfaceFactory] = {
    "torus": _plain(lambda p: builders.torus()),
    "l_shape": _plain(lambda p: builders.l_shape()),
    "octagon": _plain(lambda p: builders.octagon()),
    "eierlegende": _plain(lambda p: builders.eierlegende()),
    "two_square_torus": _plain(lambda p: builders.two_square_torus()),
    "staircase": _plain(
        lambda p: builders.staircase(
            param_scalar(p, "lambda", 2), param_scalar(p, "h0", 1), param_scalar(p, "A", 1), param_scalar(p, "B", 0)
        )
    ),
    "staircase_origami": _plain(
        lambda p: builders.square_tiled(builders.staircase_origami(), name="staircase origami")
    ),
    "baker": _plain(lambda p: builders.baker(param_scalar(p, "alpha", "1/2"))),
    "generalized_staircase": _plain(lambda p: builders.malaga_staircase(_periodic_heights(p))),
    "step": _plain(lambda p: builders.step_surface(ratio=param_scalar(p, "ratio", "1/2"))),
    "billiard": _billiard,
    "zd_cover": _zd_cover,
}


def build_surface(family: str, params: Mapping[str, Any]) -> Tuple[Surface, Extras]:
    if family not in SURFACE_FAMILIES:
        raise UsageError(f"unknown surface family {family!r}; known: {sorted(SURFACE_FAMILIES)}")
    return SURFACE_FAMILIES[family](params)


def resolve_surface(
    surface: Optional[Mapping[str, Any]] = None, family: Optional[str] = None, params: Optional[Mapping[str, Any]] = None
) -> Surface:
    """曲面 JSON 优先，否则按族名构造"""
    if surface is not None:
        return surface_from_json(surface)
    if family is not None:
        return build_surface(family, params or {})[0]
    raise UsageError("give a surface JSON or a family name")


def _is_closed(surface: Surface) -> bool:
    return isinstance(surface, FiniteSurface) and not surface.allow_boundary


def describe_surface(surface: Surface, window: Optional[int] = None) -> Dict[str, Any]:
    """校验结果、顶点类与（闭曲面时的）亏格；惰性曲面只看窗口"""
    fs = as_finite(surface, window)
    report = validate(surface, window)
    classes = vertex_classes(fs)
    out: Dict[str, Any] = {
        "name": surface.name,
        "finite": _is_closed(surface),
        "polygons": len(fs.polygons),
        "edge_pairs": len(fs.pairs),
        "boundary_edges": len(fs.boundary_edges()),
        "valid": report.ok,
        "violations": [{"kind": v.kind.value, "where": v.where, "detail": v.detail} for v in report.violations],
        "vertex_classes": [
            {"corners": len(c.corners), "kind": c.kind.value, "angle_over_pi": c.total_angle_over_pi} for c in classes
        ],
    }
    if _is_closed(surface) and report.ok:
        out["genus"] = euler_genus(surface)
    try:
        out["area"] = format_scalar(surface.area())
    except NotFinite:
        out["area"] = None
    return out


def trajectory_summary(traj: Trajectory) -> Dict[str, Any]:
    end = traj.end_point
    return {
        "status": traj.status.value,
        "crossings": traj.crossings,
        "segments": len(traj.segments),
        "length": traj.length,
        "length2": format_scalar(traj.length2),
        "end_point": None if end is None else [format_scalar(end[0]), format_scalar(end[1])],
        "period": None if traj.period_t is None else format_scalar(traj.period_t),
    }


class SurfaceService(LedgerMixin):
    def __init__(self, runs: Optional[RunService] = None):
        self.runs = runs

    def build(self, config: RunConfig, family: str, params: Mapping[str, Any]) -> Tuple[Surface, Dict[str, Any]]:
        surface, extras = build_surface(family, params)
        summary = describe_surface(surface, config.window)
        summary["family"] = family
        summary.update(extras)
        logger.info("构造 %s：%s 个多边形，合法=%s", family, summary["polygons"], summary["valid"])
        self._record(config, summary)
        return surface, summary

    def describe(self, config: RunConfig, surface: Surface) -> Dict[str, Any]:
        summary = describe_surface(surface, config.window)
        self._record(config, summary)
        return summary

    def isomorphic(self, config: RunConfig, first: Surface, second: Surface, forget_marked: bool = True) -> bool:
        same = isomorphic(first, second, forget_marked=forget_marked)
        self._record(config, {"isomorphic": same, "forget_marked": forget_marked})
        return same

    def trace(
        self,
        config: RunConfig,
        surface: Surface,
        poly: Any,
        point: Sequence[Scalar],
        direction: Sequence[Scalar],
    ) -> Tuple[Trajectory, Dict[str, Any]]:
        traj = trace(surface, poly, point, direction, budget=config.budget, window=config.window)
        summary = trajectory_summary(traj)
        self._record(config, summary)
        return traj, summary

    def cylinders(self, config: RunConfig, surface: Surface, direction: Sequence[Scalar]) -> Dict[str, Any]:
        cyls = cylinders_in_direction(surface, direction, budget=config.budget, window=config.window)
        summary = {
            "direction": [format_scalar(x) for x in direction],
            "count": len(cyls),
            "cylinders": [
                {
                    "modulus": format_scalar(c.modulus),
                    "period": c.period,
                    "area": format_scalar(c.area),
                    "height": format_scalar(c.height),
                    "circumference": format_scalar(c.circumference),
                }
                for c in cyls
            ],
        }
        self._record(config, summary)
        return summary

    def saddle_connections(
        self, config: RunConfig, surface: Surface, direction: Sequence[Scalar], L: Scalar, through_regular: bool = False
    ) -> Dict[str, Any]:
        found = saddle_connections_in_direction(
            surface, direction, L, window=config.window, through_regular=through_regular, budget=config.budget
        )
        summary = {
            "count": len(found),
            "connections": [
                {
                    "start_class": s.start_class,
                    "end_class": s.end_class,
                    "length": s.length,
                    "length2": format_scalar(s.length2),
                    "holonomy": [format_scalar(s.holonomy[0]), format_scalar(s.holonomy[1])],
                }
                for s in found
            ],
        }
        self._record(config, summary)
        return summary

    def multitwist(self, config: RunConfig, surface: Surface, direction: Sequence[Scalar], lam: Scalar) -> bool:
        if lam is None:
            raise DomainError("multitwist needs λ")
        ok = multitwist_check(surface, direction, lam, window=config.window, budget=config.budget)
        self._record(config, {"multitwist": ok, "lambda": format_scalar(lam)})
        return ok
