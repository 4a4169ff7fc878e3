"""
平移曲面数据模型

FiniteSurface：物化的多边形族 + 边配对；LazySurface：以提供函数描述的可数族，
所有全局计算都通过显式窗口进行。
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from flatland.core.enums import VertexKind, ViolationKind
from flatland.core.errors import DomainError, NotFinite
from flatland.core.mat2 import Mat2
from flatland.core.plane import Vec, cross, dot, is_zero, segments_cross, signed_area2, vadd, vsub
from flatland.core.scalar import Scalar, exact, sign

logger = logging.getLogger(__name__)


class EdgeRef(NamedTuple):
    poly: Hashable
    edge: int


@dataclass(frozen=True)
class Polygon:
    """逆时针顶点序列"""

    vertices: Tuple[Vec, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple((exact(x), exact(y)) for x, y in self.vertices))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex(self, i: int) -> Vec:
        return self.vertices[i % self.n]

    def edge(self, i: int) -> Vec:
        return vsub(self.vertex(i + 1), self.vertex(i))

    def area(self) -> Scalar:
        return signed_area2(self.vertices) / 2

    def translate(self, t: Vec) -> "Polygon":
        return Polygon(tuple(vadd(v, t) for v in self.vertices))

    def is_convex(self) -> bool:
        for i in range(self.n):
            if sign(cross(self.edge(i - 1), self.edge(i))) < 0:
                return False
        return True

    def is_simple(self) -> bool:
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if segments_cross(self.vertex(i), self.vertex(i + 1), self.vertex(j), self.vertex(j + 1)):
                    return False
        # 相邻边不可反向折回
        for i in range(n):
            a, b = self.edge(i - 1), self.edge(i)
            if sign(cross(a, b)) == 0 and sign(dot(a, b)) < 0:
                return False
        return True

    def contains(self, p: Vec, closed: bool = True) -> bool:
        """凸多边形的点包含测试"""
        for i in range(self.n):
            s = sign(cross(self.edge(i), vsub(p, self.vertex(i))))
            if s < 0 or (s == 0 and not closed):
                return False
        return True


PairList = Iterable[Tuple[Sequence, Sequence]]


def _as_edge(e) -> EdgeRef:
    if isinstance(e, EdgeRef):
        return e
    p, i = e
    return EdgeRef(p, int(i))


class FiniteSurface:
    """物化曲面；allow_boundary=True 时允许未配对边（用于窗口截断）"""

    is_finite = True

    def __init__(
        self,
        polygons: Union[Mapping[Hashable, Polygon], Sequence[Polygon]],
        pairs: PairList,
        allow_boundary: bool = False,
        name: Optional[str] = None,
        pair_labels: Optional[Sequence[str]] = None,
    ):
        if isinstance(polygons, Mapping):
            items = list(polygons.items())
        else:
            items = list(enumerate(polygons))
        self.polygons: Dict[Hashable, Polygon] = {
            k: (p if isinstance(p, Polygon) else Polygon(tuple(p))) for k, p in items
        }
        self.pairs: List[Tuple[EdgeRef, EdgeRef]] = []
        self.pairing: Dict[EdgeRef, EdgeRef] = {}
        self.conflicts: List[EdgeRef] = []
        for a, b in pairs:
            a, b = _as_edge(a), _as_edge(b)
            self.pairs.append((a, b))
            for x, y in ((a, b), (b, a)):
                if x in self.pairing and self.pairing[x] != y:
                    self.conflicts.append(x)
                self.pairing[x] = y
        self.allow_boundary = allow_boundary
        self.name = name
        self.pair_labels = list(pair_labels) if pair_labels else None

    def indices(self) -> List[Hashable]:
        return list(self.polygons.keys())

    def polygon(self, idx: Hashable) -> Polygon:
        try:
            return self.polygons[idx]
        except KeyError:
            raise DomainError(f"polygon {idx!r} is not in the surface") from None

    def opposite(self, e: EdgeRef) -> Optional[EdgeRef]:
        return self.pairing.get(_as_edge(e))

    def edge_vector(self, e: EdgeRef) -> Vec:
        return self.polygon(e.poly).edge(e.edge)

    def area(self) -> Scalar:
        total = 0
        for p in self.polygons.values():
            total = total + p.area()
        return total

    def boundary_edges(self) -> List[EdgeRef]:
        out = []
        for idx, p in self.polygons.items():
            for i in range(p.n):
                if EdgeRef(idx, i) not in self.pairing:
                    out.append(EdgeRef(idx, i))
        return out

    def __repr__(self):
        return f"FiniteSurface({self.name or ''}, polygons={len(self.polygons)}, pairs={len(self.pairs)})"


class LazySurface:
    """惰性曲面：polygon_at(idx) 与 pair(EdgeRef) 必须是纯函数"""

    is_finite = False

    def __init__(
        self,
        polygon_at: Callable[[Hashable], Polygon],
        pair: Callable[[EdgeRef], EdgeRef],
        seed: EdgeRef,
        name: Optional[str] = None,
        default_window: int = 20,
        area: Optional[Scalar] = None,
        hints: Optional[dict] = None,
    ):
        self._polygon_at = polygon_at
        self._pair = pair
        self.seed = _as_edge(seed)
        self.name = name
        self.default_window = default_window
        self.area_value = area
        self.hints = dict(hints or {})
        self._cache: Dict[Hashable, Polygon] = {}

    def polygon(self, idx: Hashable) -> Polygon:
        p = self._cache.get(idx)
        if p is None:
            p = self._polygon_at(idx)
            if not isinstance(p, Polygon):
                p = Polygon(tuple(p))
            self._cache[idx] = p
        return p

    def opposite(self, e: EdgeRef) -> Optional[EdgeRef]:
        r = self._pair(_as_edge(e))
        return None if r is None else _as_edge(r)

    def edge_vector(self, e: EdgeRef) -> Vec:
        return self.polygon(e.poly).edge(e.edge)

    def area(self) -> Scalar:
        if self.area_value is None:
            raise NotFinite(f"area of {self.name or 'lazy surface'} is not known in closed form")
        return self.area_value

    def window(self, n: Optional[int] = None) -> List[Hashable]:
        """从种子多边形出发按边序号广度优先探索 n 个多边形"""
        n = n or self.default_window
        start = self.seed.poly
        seen = [start]
        known = {start}
        queue = deque([start])
        while queue and len(seen) < n:
            idx = queue.popleft()
            poly = self.polygon(idx)
            for i in range(poly.n):
                o = self.opposite(EdgeRef(idx, i))
                if o is None or o.poly in known:
                    continue
                known.add(o.poly)
                seen.append(o.poly)
                queue.append(o.poly)
                if len(seen) >= n:
                    break
        return seen

    def ball_window(self, radius: int) -> List[Hashable]:
        """组合距离不超过 radius 的多边形"""
        start = self.seed.poly
        dist = {start: 0}
        order = [start]
        queue = deque([start])
        while queue:
            idx = queue.popleft()
            if dist[idx] >= radius:
                continue
            poly = self.polygon(idx)
            for i in range(poly.n):
                o = self.opposite(EdgeRef(idx, i))
                if o is None or o.poly in dist:
                    continue
                dist[o.poly] = dist[idx] + 1
                order.append(o.poly)
                queue.append(o.poly)
        return order

    def restrict(self, indices: Iterable[Hashable]) -> FiniteSurface:
        """把窗口物化为带边界的有限曲面；离开窗口的边成为边界"""
        idxs = list(dict.fromkeys(indices))
        inside = set(idxs)
        pairs = []
        done = set()
        for idx in idxs:
            poly = self.polygon(idx)
            for i in range(poly.n):
                e = EdgeRef(idx, i)
                if e in done:
                    continue
                o = self.opposite(e)
                if o is None or o.poly not in inside:
                    continue
                done.add(e)
                done.add(o)
                pairs.append((e, o))
        return FiniteSurface(
            {idx: self.polygon(idx) for idx in idxs},
            pairs,
            allow_boundary=True,
            name=f"{self.name or 'lazy'}[window {len(idxs)}]",
        )

    def __repr__(self):
        return f"LazySurface({self.name or ''})"


Surface = Union[FiniteSurface, LazySurface]


def as_finite(surface: Surface, window: Optional[Union[int, Iterable[Hashable]]] = None) -> FiniteSurface:
    if isinstance(surface, FiniteSurface):
        return surface
    if window is None or isinstance(window, int):
        return surface.restrict(surface.window(window))
    return surface.restrict(window)


def require_finite(surface: Surface, what: str) -> FiniteSurface:
    if not isinstance(surface, FiniteSurface) or surface.allow_boundary:
        raise NotFinite(f"{what} needs a finite closed surface")
    return surface


# ============================================================
# validate
# ============================================================


@dataclass
class Violation:
    kind: ViolationKind
    where: str
    detail: str = ""


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)
    polygons_checked: int = 0
    window_only: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> List[ViolationKind]:
        return [v.kind for v in self.violations]

    def add(self, kind: ViolationKind, where, detail: str = "") -> None:
        self.violations.append(Violation(kind, str(where), detail))


def _check_polygon(report: ValidationReport, idx, poly: Polygon) -> None:
    if poly.n < 3:
        report.add(ViolationKind.NON_SIMPLE, idx, "fewer than 3 vertices")
        return
    if sign(poly.area()) <= 0:
        report.add(ViolationKind.NON_POSITIVE_AREA, idx, f"signed area {poly.area()}")
    if not poly.is_simple():
        report.add(ViolationKind.NON_SIMPLE, idx)


def _check_edge(report: ValidationReport, surface: Surface, e: EdgeRef, n_edges: int, boundary_ok: bool) -> None:
    if not 0 <= e.edge < n_edges:
        report.add(ViolationKind.BAD_EDGE_INDEX, e)
        return
    o = surface.opposite(e)
    if o is None:
        if not boundary_ok:
            report.add(ViolationKind.UNPAIRED, e)
        return
    if o == e:
        report.add(ViolationKind.FIXED_EDGE, e)
        return
    try:
        back = surface.opposite(o)
        vo = surface.edge_vector(o)
        if not 0 <= o.edge < surface.polygon(o.poly).n:
            raise IndexError
    except (DomainError, IndexError):
        report.add(ViolationKind.BAD_EDGE_INDEX, o, f"paired with {e}")
        return
    if back != e:
        report.add(ViolationKind.NON_INVOLUTIVE, e, f"{e} → {o} → {back}")
    if not is_zero(vadd(surface.edge_vector(e), vo)):
        report.add(ViolationKind.MISMATCHED_EDGE, e, f"paired with {o}")


def validate(surface: Surface, window: Optional[Union[int, Iterable[Hashable]]] = None) -> ValidationReport:
    """检查多边形合法性与配对的对合性、平移性、连通性；所有问题写进报告而不抛异常"""
    report = ValidationReport()
    if isinstance(surface, LazySurface):
        idxs = surface.window(window) if window is None or isinstance(window, int) else list(window)
        report.window_only = True
        for idx in idxs:
            poly = surface.polygon(idx)
            _check_polygon(report, idx, poly)
            for i in range(poly.n):
                _check_edge(report, surface, EdgeRef(idx, i), poly.n, boundary_ok=False)
        report.polygons_checked = len(idxs)
        return report

    for e in surface.conflicts:
        report.add(ViolationKind.NON_INVOLUTIVE, e, "edge appears in two pairs")
    for idx, poly in surface.polygons.items():
        _check_polygon(report, idx, poly)
    for a, b in surface.pairs:
        for e in (a, b):
            if e.poly not in surface.polygons or not 0 <= e.edge < surface.polygons[e.poly].n:
                report.add(ViolationKind.BAD_EDGE_INDEX, e)
    if any(v.kind == ViolationKind.BAD_EDGE_INDEX for v in report.violations):
        report.polygons_checked = len(surface.polygons)
        return report
    for idx, poly in surface.polygons.items():
        for i in range(poly.n):
            _check_edge(report, surface, EdgeRef(idx, i), poly.n, boundary_ok=surface.allow_boundary)
    if surface.polygons and not surface.allow_boundary:
        if len(connected_component(surface)) != len(surface.polygons):
            report.add(ViolationKind.DISCONNECTED, surface.name or "surface")
    report.polygons_checked = len(surface.polygons)
    return report


def connected_component(surface: FiniteSurface, start: Optional[Hashable] = None) -> List[Hashable]:
    if start is None:
        start = next(iter(surface.polygons))
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        idx = queue.popleft()
        for i in range(surface.polygons[idx].n):
            o = surface.opposite(EdgeRef(idx, i))
            if o is not None and o.poly in surface.polygons and o.poly not in seen:
                seen.add(o.poly)
                order.append(o.poly)
                queue.append(o.poly)
    return order


# ============================================================
# 顶点类
# ============================================================

Corner = Tuple[Hashable, int]


@dataclass
class VertexClass:
    corners: List[Corner]
    k: Optional[int]
    kind: VertexKind

    @property
    def total_angle_over_pi(self) -> Optional[int]:
        """总角 / π = 2k；截断或无穷度的类返回 None"""
        return None if self.k is None else 2 * self.k

    @property
    def total_angle(self) -> float:
        return math.inf if self.k is None else 2 * self.k * math.pi


def _rel_before(a: Vec, b: Vec, ref: Vec) -> bool:
    """以 ref 为零方向，arg(a) < arg(b)（取值 [0, 2π)）"""

    def half(v: Vec) -> int:
        c = sign(cross(ref, v))
        if c > 0 or (c == 0 and sign(dot(ref, v)) > 0):
            return 0
        return 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return ha < hb
    return sign(cross(a, b)) > 0


def _next_corner(surface: FiniteSurface, c: Corner) -> Optional[Corner]:
    t, i = c
    n = surface.polygons[t].n
    o = surface.opposite(EdgeRef(t, (i - 1) % n))
    if o is None or o.poly not in surface.polygons:
        return None
    return (o.poly, o.edge)


def _prev_corner(surface: FiniteSurface, c: Corner) -> Optional[Corner]:
    t, i = c
    o = surface.opposite(EdgeRef(t, i))
    if o is None or o.poly not in surface.polygons:
        return None
    return (o.poly, (o.edge + 1) % surface.polygons[o.poly].n)


def _corner_directions(surface: FiniteSurface, c: Corner) -> Tuple[Vec, Vec]:
    """角 (t,i) 从出边方向 e_i 逆时针扫到 −e_{i−1}"""
    poly = surface.polygons[c[0]]
    u = poly.edge(c[1])
    prev = poly.edge(c[1] - 1)
    return u, (-prev[0], -prev[1])


def vertex_classes(
    surface: Surface,
    window: Optional[Union[int, Iterable[Hashable]]] = None,
    corner_budget: int = 1000,
) -> List[VertexClass]:
    """按配对绕顶点旋转，把角分组；总角 2kπ 中的 k 由精确的绕数得到"""
    fs = as_finite(surface, window)
    visited = set()
    classes: List[VertexClass] = []
    for idx, poly in fs.polygons.items():
        for i in range(poly.n):
            c0 = (idx, i)
            if c0 in visited:
                continue
            # 先向后走到链的起点（若是开链）
            start = c0
            steps = 0
            open_chain = False
            while True:
                p = _prev_corner(fs, start)
                if p is None:
                    open_chain = True
                    break
                if p == c0:
                    break
                start = p
                steps += 1
                if steps > corner_budget:
                    break
            corners = [start]
            visited.add(start)
            ref = _corner_directions(fs, start)[0]
            wraps = 0
            cur = start
            kind = None
            while True:
                u, w = _corner_directions(fs, cur)
                if _rel_before(w, u, ref):
                    wraps += 1
                nxt = _next_corner(fs, cur)
                if nxt is None:
                    kind = VertexKind.BOUNDARY_TRUNCATED
                    break
                if nxt == start and not open_chain:
                    break
                if nxt in visited:
                    kind = VertexKind.BOUNDARY_TRUNCATED
                    break
                if len(corners) >= corner_budget:
                    kind = VertexKind.INFINITE_DEGREE
                    break
                corners.append(nxt)
                visited.add(nxt)
                cur = nxt
            if kind is None:
                kind = VertexKind.REGULAR if wraps == 1 else VertexKind.CONICAL
                classes.append(VertexClass(corners, wraps, kind))
            else:
                classes.append(VertexClass(corners, None, kind))
    return classes


def euler_genus(surface: Surface) -> int:
    """2 − 2g = V − E + F"""
    fs = require_finite(surface, "euler_genus")
    classes = vertex_classes(fs)
    if any(c.k is None for c in classes):
        raise NotFinite("surface has truncated or infinite-degree vertices")
    V, E, F = len(classes), len(fs.pairs), len(fs.polygons)
    twice = 2 - V + E - F
    if twice % 2 != 0 or twice < 0:
        raise DomainError(f"inconsistent Euler characteristic V={V} E={E} F={F}")
    return twice // 2


# ============================================================
# GL(2,ℝ) 作用
# ============================================================


def _remap_edge(i: int, n: int, flip: bool) -> int:
    return (-i - 1) % n if flip else i


def _transform_polygon(A: Mat2, poly: Polygon, flip: bool) -> Polygon:
    if not flip:
        return Polygon(tuple(A.apply(v) for v in poly.vertices))
    n = poly.n
    return Polygon(tuple(A.apply(poly.vertex(-k)) for k in range(n)))


def apply_matrix(A: Mat2, surface: Surface) -> Surface:
    """所有顶点左乘 A；det < 0 时反转顶点次序以保持逆时针，配对随之重编号"""
    det = A.det()
    if sign(det) == 0:
        raise DomainError("singular matrix cannot act on a surface")
    flip = sign(det) < 0
    if isinstance(surface, FiniteSurface):
        polys = {k: _transform_polygon(A, p, flip) for k, p in surface.polygons.items()}
        pairs = []
        for a, b in surface.pairs:
            na, nb = surface.polygons[a.poly].n, surface.polygons[b.poly].n
            pairs.append(
                (EdgeRef(a.poly, _remap_edge(a.edge, na, flip)), EdgeRef(b.poly, _remap_edge(b.edge, nb, flip)))
            )
        return FiniteSurface(
            polys, pairs, allow_boundary=surface.allow_boundary, name=surface.name, pair_labels=surface.pair_labels
        )

    base = surface

    def polygon_at(idx):
        return _transform_polygon(A, base.polygon(idx), flip)

    def pair(e: EdgeRef):
        n = base.polygon(e.poly).n
        o = base.opposite(EdgeRef(e.poly, _remap_edge(e.edge, n, flip)))
        if o is None:
            return None
        return EdgeRef(o.poly, _remap_edge(o.edge, base.polygon(o.poly).n, flip))

    seed_n = base.polygon(base.seed.poly).n
    area = None if base.area_value is None else base.area_value * (det if not flip else -det)
    return LazySurface(
        polygon_at,
        pair,
        EdgeRef(base.seed.poly, _remap_edge(base.seed.edge, seed_n, flip)),
        name=base.name,
        default_window=base.default_window,
        area=area,
        hints=base.hints,
    )
