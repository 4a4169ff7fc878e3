"""
平移流：精确光线追踪、分界线与鞍点连接、首次返回 IET、柱面分解与多重扭转检查

所有全局计算都在有限窗口上进行：惰性曲面先经 as_finite 物化，离开窗口即 LeftWindow。
方向向量 d 不要求单位长度；轨迹时间 t 对应长度 t·|d|，精确模式下报告长度的平方。
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple, Union

from flatland.core.builders import two_square_torus
from flatland.core.config import Budget
from flatland.core.enums import TraceStatus, VertexKind
from flatland.core.errors import DomainError, ModeError, PartialResult, TruncationTooCoarse
from flatland.core.iet import IET, Piece, periodic_components
from flatland.core.isomorphism import isomorphic
from flatland.core.mat2 import Mat2
from flatland.core.plane import Vec, cross, dot, is_zero, norm2, same_point, vadd, vneg, vscale, vsub
from flatland.core.scalar import QuadExt, Scalar, cmp, exact, is_exact, scalar_key, sign, sqrt_scalar, to_float
from flatland.core.surface import (
    Corner,
    EdgeRef,
    FiniteSurface,
    Polygon,
    Surface,
    VertexClass,
    _corner_directions,
    _rel_before,
    apply_matrix,
    as_finite,
    vertex_classes,
)

logger = logging.getLogger(__name__)

Window = Optional[Union[int, Iterable[Hashable]]]


# ============================================================
# 单个多边形内的几何
# ============================================================


def point_in_polygon(poly: Polygon, p: Vec) -> bool:
    """闭多边形包含测试（射线穿越数，适用于非凸多边形），边界上的点算在内"""
    n = poly.n
    for i in range(n):
        a, b = poly.vertex(i), poly.vertex(i + 1)
        if sign(cross(vsub(b, a), vsub(p, a))) == 0 and sign(dot(vsub(p, a), vsub(p, b))) <= 0:
            return True
    inside = False
    for i in range(n):
        a, b = poly.vertex(i), poly.vertex(i + 1)
        if (cmp(a[1], p[1]) > 0) != (cmp(b[1], p[1]) > 0):
            # 交点横坐标 > p.x ⇔ 下式与 (b.y − a.y) 同号
            lhs = (p[1] - a[1]) * (b[0] - a[0]) - (p[0] - a[0]) * (b[1] - a[1])
            if sign(lhs) * sign(b[1] - a[1]) > 0:
                inside = not inside
    return inside


@dataclass
class _Exit:
    t: Scalar
    edge: Optional[int] = None
    vertex: Optional[int] = None

    @property
    def singular(self) -> bool:
        return self.vertex is not None


def _exit(poly: Polygon, p: Vec, d: Vec) -> _Exit:
    """从 p 沿 d 到多边形边界的第一个交点；先撞顶点则为奇异"""
    best_t: Optional[Scalar] = None
    best_edge = None
    for i in range(poly.n):
        a, e = poly.vertex(i), poly.edge(i)
        den = cross(d, e)
        if sign(den) == 0:
            continue
        w = vsub(a, p)
        t = cross(w, e) / den
        s = cross(w, d) / den
        if sign(s) < 0 or cmp(s, 1) > 0:
            continue
        st = sign(t)
        if st < 0:
            continue
        if st == 0:
            # 起点在边的内部且方向朝外：立即穿过
            if sign(s) > 0 and cmp(s, 1) < 0 and sign(cross(e, d)) < 0:
                return _Exit(t=Fraction(0), edge=i)
            continue
        if best_t is None or cmp(t, best_t) < 0:
            best_t, best_edge = t, i
    best_v = None
    best_vt: Optional[Scalar] = None
    dd = norm2(d)
    for i in range(poly.n):
        w = vsub(poly.vertex(i), p)
        if sign(cross(w, d)) != 0 or sign(dot(w, d)) <= 0:
            continue
        t = dot(w, d) / dd
        if best_vt is None or cmp(t, best_vt) < 0:
            best_vt, best_v = t, i
    if best_vt is not None and (best_t is None or cmp(best_vt, best_t) <= 0):
        return _Exit(t=best_vt, vertex=best_v)
    if best_t is None:
        raise DomainError(f"ray from {p} does not leave the polygon; is the point inside?")
    return _Exit(t=best_t, edge=best_edge)


def _crossing_translation(fs: FiniteSurface, e: EdgeRef, o: EdgeRef) -> Vec:
    """穿过 e 进入配对边 o：q ↦ q + (Q 的 o 起点 − P 的 e 终点)"""
    return vsub(fs.polygon(o.poly).vertex(o.edge), fs.polygon(e.poly).vertex(e.edge + 1))


# ============================================================
# trace
# ============================================================


@dataclass(frozen=True)
class Segment:
    poly: Hashable
    start: Vec
    end: Vec


@dataclass
class Trajectory:
    direction: Vec
    segments: List[Segment]
    status: TraceStatus
    total_t: Scalar
    end_corner: Optional[Corner] = None
    period_t: Optional[Scalar] = None
    crossings: int = 0

    @property
    def length2(self) -> Scalar:
        """精确长度的平方 t²|d|²"""
        return self.total_t * self.total_t * norm2(self.direction)

    @property
    def length(self) -> float:
        return math.sqrt(to_float(self.length2))

    @property
    def end_point(self) -> Optional[Vec]:
        return self.segments[-1].end if self.segments else None


def _check_direction(direction: Sequence[Scalar]) -> Vec:
    d = (exact(direction[0]), exact(direction[1]))
    if is_zero(d):
        raise DomainError("direction must be nonzero")
    return d


def _within_length(t: Scalar, d: Vec, max_length: Optional[float]) -> bool:
    if max_length is None:
        return True
    return to_float(t * t * norm2(d)) <= float(max_length) ** 2 * (1 + 1e-12)


def _trace_finite(
    fs: FiniteSurface,
    poly: Hashable,
    point: Vec,
    d: Vec,
    budget: Budget,
    detect_closure: bool = True,
) -> Trajectory:
    exact_mode = is_exact(point[0]) and is_exact(point[1]) and is_exact(d[0]) and is_exact(d[1])
    start = (poly, point)
    segments: List[Segment] = []
    total: Scalar = Fraction(0)
    crossings = 0
    cur_poly, cur = poly, point
    while True:
        P = fs.polygon(cur_poly)
        ex = _exit(P, cur, d)
        end = vadd(cur, vscale(ex.t, d))
        if exact_mode and detect_closure and cur_poly == start[0] and (crossings > 0 or segments):
            w = vsub(start[1], cur)
            if sign(cross(w, d)) == 0 and sign(dot(w, d)) > 0:
                t0 = dot(w, d) / norm2(d)
                if cmp(t0, ex.t) <= 0:
                    segments.append(Segment(cur_poly, cur, start[1]))
                    total = total + t0
                    return Trajectory(d, segments, TraceStatus.CLOSED, total, period_t=total, crossings=crossings)
        if sign(ex.t) > 0:
            segments.append(Segment(cur_poly, cur, end))
            total = total + ex.t
        if ex.singular:
            return Trajectory(d, segments, TraceStatus.SINGULAR_HIT, total, end_corner=(cur_poly, ex.vertex), crossings=crossings)
        if not _within_length(total, d, budget.max_length) or crossings >= budget.max_crossings:
            return Trajectory(d, segments, TraceStatus.BUDGET_EXHAUSTED, total, crossings=crossings)
        e = EdgeRef(cur_poly, ex.edge)
        o = fs.opposite(e)
        if o is None or o.poly not in fs.polygons:
            return Trajectory(d, segments, TraceStatus.LEFT_WINDOW, total, crossings=crossings)
        cur = vadd(end, _crossing_translation(fs, e, o))
        cur_poly = o.poly
        crossings += 1
        if exact_mode and detect_closure and cur_poly == start[0] and same_point(cur, start[1]) and segments:
            return Trajectory(d, segments, TraceStatus.CLOSED, total, period_t=total, crossings=crossings)


def trace(
    surface: Surface,
    poly: Hashable,
    point: Sequence[Scalar],
    direction: Sequence[Scalar],
    budget: Optional[Budget] = None,
    window: Window = None,
) -> Trajectory:
    """从多边形 poly 中的 point 沿 direction 追踪直线流

    撞到顶点为 SingularHit；精确模式下回到起点状态为 Closed；离开窗口为 LeftWindow。
    """
    budget = budget or Budget()
    d = _check_direction(direction)
    p = (exact(point[0]), exact(point[1]))
    fs = as_finite(surface, window)
    if poly not in fs.polygons:
        raise DomainError(f"polygon {poly!r} is outside the atlas window")
    P = fs.polygon(poly)
    if not point_in_polygon(P, p):
        raise DomainError(f"point {p} is not in polygon {poly!r}")
    for i in range(P.n):
        if same_point(P.vertex(i), p):
            return Trajectory(d, [], TraceStatus.SINGULAR_HIT, Fraction(0), end_corner=(poly, i))
    traj = _trace_finite(fs, poly, p, d, budget)
    logger.debug("trace %s → %s，穿越 %s 次", p, traj.status.value, traj.crossings)
    return traj


def in_sector(fs: FiniteSurface, corner: Corner, d: Vec) -> bool:
    """d 是否落在角 (t,i) 的半开扇形 [e_i, −e_{i−1})"""
    u, w = _corner_directions(fs, corner)
    return _rel_before(d, w, u)


def trace_from_corner(fs: FiniteSurface, corner: Corner, d: Vec, budget: Budget) -> Trajectory:
    poly, i = corner
    return _trace_finite(fs, poly, fs.polygon(poly).vertex(i), d, budget, detect_closure=False)


# ============================================================
# 鞍点连接
# ============================================================


@dataclass
class SaddleConnection:
    start_class: int
    end_class: int
    length2: Scalar
    start_corner: Corner
    end_corner: Corner
    holonomy: Vec

    @property
    def length(self) -> float:
        return math.sqrt(to_float(self.length2))


def _corner_index(classes: List[VertexClass]) -> Dict[Corner, int]:
    out = {}
    for k, c in enumerate(classes):
        for corner in c.corners:
            out[corner] = k
    return out


def saddle_connections_in_direction(
    surface: Surface,
    direction: Sequence[Scalar],
    L: Scalar,
    window: Window = None,
    through_regular: bool = False,
    budget: Optional[Budget] = None,
) -> List[SaddleConnection]:
    """从每个顶点类的每条前向分界线出发，记录长度 ≤ L 内终止于顶点的鞍点连接

    through_regular=True 时穿过总角 2π 的标记点继续追踪，每次命中都记录一条。
    """
    if sign(exact(L)) <= 0:
        raise DomainError("L must be positive")
    d = _check_direction(direction)
    fs = as_finite(surface, window)
    classes = vertex_classes(fs)
    where = _corner_index(classes)
    budget = Budget(
        max_length=to_float(L),
        max_crossings=(budget or Budget()).max_crossings,
        max_leaves=(budget or Budget()).max_leaves,
    )
    L2 = exact(L) * exact(L)
    found: List[SaddleConnection] = []
    for k, cls in enumerate(classes):
        for corner in cls.corners:
            if not in_sector(fs, corner, d):
                continue
            total: Scalar = Fraction(0)
            cur = corner
            while True:
                traj = trace_from_corner(fs, cur, d, budget)
                total = total + traj.total_t
                if traj.status != TraceStatus.SINGULAR_HIT:
                    break
                length2 = total * total * norm2(d)
                if cmp(length2, L2) > 0:
                    break
                end = traj.end_corner
                found.append(SaddleConnection(k, where[end], length2, corner, end, vscale(total, d)))
                end_cls = classes[where[end]]
                if not (through_regular and end_cls.kind == VertexKind.REGULAR):
                    break
                nxt = [c for c in end_cls.corners if in_sector(fs, c, d)]
                if not nxt:
                    break
                cur = nxt[0]
                if len(found) > budget.max_leaves:
                    break
    found.sort(key=lambda s: (to_float(s.length2), s.start_class, s.end_class))
    logger.info("方向 %s 上找到 %s 条鞍点连接（L=%s）", d, len(found), L)
    return found


# ============================================================
# 横截线与首次返回映射
# ============================================================


@dataclass(frozen=True)
class TransversalPiece:
    """多边形 poly 中的线段 [a, b]；edge 非空时线段恰是该边"""

    poly: Hashable
    a: Vec
    b: Vec
    edge: Optional[int] = None

    def reversed(self) -> "TransversalPiece":
        return TransversalPiece(self.poly, self.b, self.a, self.edge)


@dataclass
class Transversal:
    pieces: List[TransversalPiece] = field(default_factory=list)

    def __post_init__(self):
        self.pieces = [
            p
            if isinstance(p, TransversalPiece)
            else TransversalPiece(p[0], (exact(p[1][0]), exact(p[1][1])), (exact(p[2][0]), exact(p[2][1])), *p[3:])
            for p in self.pieces
        ]

    @classmethod
    def from_edges(cls, fs: FiniteSurface, edges: Iterable[EdgeRef]) -> "Transversal":
        pieces = []
        for e in edges:
            P = fs.polygon(e.poly)
            pieces.append(TransversalPiece(e.poly, P.vertex(e.edge), P.vertex(e.edge + 1), e.edge))
        return cls(pieces)


@dataclass
class _Hit:
    piece: int
    point: Vec
    time: Scalar


def _in_surface_field(x: Scalar, fs: FiniteSurface, d: Vec) -> bool:
    """x 能否与曲面坐标和方向共处一个二次域；坐标全为有理数时总可以"""
    if not isinstance(x, QuadExt):
        return True
    fields = {c.D for c in d if isinstance(c, QuadExt)}
    for P in fs.polygons.values():
        for v in P.vertices:
            fields.update(c.D for c in v if isinstance(c, QuadExt))
    return not fields or x.D in fields


class _Chart:
    """横截线在曲面上的登记与自然参数 u = base + cross(x−a, d)/|d|"""

    def __init__(self, fs: FiniteSurface, transversal: Transversal, d: Vec, normalize: bool):
        self.fs = fs
        self.d = d
        self.norm: Scalar = Fraction(1)
        if normalize:
            try:
                root = sqrt_scalar(norm2(d))
            except ModeError:
                root = None
            if root is not None and _in_surface_field(root, fs, d):
                self.norm = root
            else:
                logger.info("|d|² = %s 的平方根不在曲面的数域里，长度不做归一化", norm2(d))
        self.pieces: List[TransversalPiece] = []
        self.base: List[Scalar] = []
        self.width: List[Scalar] = []
        acc: Scalar = Fraction(0)
        for p in transversal.pieces:
            if p.poly not in fs.polygons:
                raise DomainError(f"transversal piece lies in polygon {p.poly!r} outside the window")
            c = sign(cross(vsub(p.b, p.a), d))
            if c == 0:
                raise DomainError("transversal piece is parallel to the flow direction")
            if c < 0:
                p = p.reversed()
            w = cross(vsub(p.b, p.a), d) / self.norm
            self.pieces.append(p)
            self.base.append(acc)
            self.width.append(w)
            acc = acc + w
        self.total = acc
        # 每个多边形里登记的线段：(piece 序号, a, b)
        self.by_poly: Dict[Hashable, List[Tuple[int, Vec, Vec]]] = {}
        for k, p in enumerate(self.pieces):
            self.by_poly.setdefault(p.poly, []).append((k, p.a, p.b))
            if p.edge is not None:
                e = EdgeRef(p.poly, p.edge)
                o = fs.opposite(e)
                if o is not None and o.poly in fs.polygons:
                    T = _crossing_translation(fs, e, o)
                    self.by_poly.setdefault(o.poly, []).append((k, vadd(p.a, T), vadd(p.b, T)))

    def u_of(self, k: int, x: Vec) -> Scalar:
        p = self.pieces[k]
        return self.base[k] + cross(vsub(x, p.a), self.d) / self.norm

    def point_at(self, u: Scalar) -> Tuple[int, Vec]:
        for k in range(len(self.pieces)):
            lo, w = self.base[k], self.width[k]
            if cmp(u, lo) >= 0 and cmp(u, lo + w) <= 0:
                p = self.pieces[k]
                r = (u - lo) / w
                return k, vadd(p.a, vscale(r, vsub(p.b, p.a)))
        raise DomainError(f"u = {u} is outside the transversal")

    def first_hit(self, poly: Hashable, x: Vec, d: Vec, budget: Budget) -> Union[_Hit, TraceStatus]:
        """沿 d 走到第一次（t > 0）击中横截线；落在端点或顶点上返回 SINGULAR_HIT"""
        fs = self.fs
        total: Scalar = Fraction(0)
        crossings = 0
        cur_poly, cur = poly, x
        while True:
            P = fs.polygon(cur_poly)
            ex = _exit(P, cur, d)
            best: Optional[Tuple[Scalar, int, Scalar]] = None
            for k, a, b in self.by_poly.get(cur_poly, ()):
                seg = vsub(b, a)
                den = cross(d, seg)
                if sign(den) == 0:
                    continue
                w = vsub(a, cur)
                t = cross(w, seg) / den
                s = cross(w, d) / den
                if sign(t) <= 0 or cmp(t, ex.t) > 0 or sign(s) < 0 or cmp(s, 1) > 0:
                    continue
                if best is None or cmp(t, best[0]) < 0:
                    best = (t, k, s)
            if best is not None:
                t, k, s = best
                if sign(s) == 0 or cmp(s, 1) == 0 or (ex.singular and cmp(t, ex.t) == 0):
                    return TraceStatus.SINGULAR_HIT
                # 换回横截线所在多边形的坐标（命中的可能是对边上的平移副本）
                p = self.pieces[k]
                return _Hit(k, vadd(p.a, vscale(s, vsub(p.b, p.a))), total + t)
            if ex.singular:
                return TraceStatus.SINGULAR_HIT
            total = total + ex.t
            if crossings >= budget.max_crossings:
                return TraceStatus.BUDGET_EXHAUSTED
            e = EdgeRef(cur_poly, ex.edge)
            o = fs.opposite(e)
            if o is None or o.poly not in fs.polygons:
                return TraceStatus.LEFT_WINDOW
            cur = vadd(vadd(cur, vscale(ex.t, d)), _crossing_translation(fs, e, o))
            cur_poly = o.poly
            crossings += 1


def _label(i: int) -> str:
    letters = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        letters = chr(ord("A") + r) + letters
    return letters


def _sample_return(chart: _Chart, u: Scalar, budget: Budget) -> Optional[Tuple[Scalar, Scalar]]:
    """u 处的首次返回：(平移量, 返回时间)；无返回时为 None"""
    k, x = chart.point_at(u)
    hit = chart.first_hit(chart.pieces[k].poly, x, chart.d, budget)
    if not isinstance(hit, _Hit):
        return None
    return chart.u_of(hit.piece, hit.point) - u, hit.time


def _breakpoints(
    chart: _Chart, budget: Budget, regular: Optional[Set[Corner]] = None
) -> Tuple[List[Scalar], List[Scalar]]:
    """奇点与横截线端点的后向叶首次击中横截线的位置，加上端点本身

    另返回只由 regular 中的角（正则点）产生的分割点：这种点两侧属于同一个柱面。
    """
    fs = chart.fs
    back = vneg(chart.d)
    hard: List[Scalar] = []
    soft: List[Scalar] = []
    for k in range(len(chart.pieces)):
        hard += [chart.base[k], chart.base[k] + chart.width[k]]
    leaves = 0
    for idx, P in fs.polygons.items():
        for i in range(P.n):
            if leaves >= budget.max_leaves:
                logger.warning("后向叶数量达到上限 %s", budget.max_leaves)
                break
            if not in_sector(fs, (idx, i), back):
                continue
            leaves += 1
            hit = chart.first_hit(idx, P.vertex(i), back, budget)
            if isinstance(hit, _Hit):
                u = chart.u_of(hit.piece, hit.point)
                (soft if regular and (idx, i) in regular else hard).append(u)
    for k, p in enumerate(chart.pieces):
        for x in (p.a, p.b):
            P = fs.polygon(p.poly)
            if any(same_point(x, v) for v in P.vertices):
                continue
            hit = chart.first_hit(p.poly, x, back, budget)
            if isinstance(hit, _Hit):
                hard.append(chart.u_of(hit.piece, hit.point))
    uniq: List[Scalar] = []
    for u in sorted(hard + soft, key=to_float):
        if sign(u) < 0 or cmp(u, chart.total) > 0:
            continue
        if uniq and cmp(u, uniq[-1]) == 0:
            continue
        uniq.append(u)
    if soft:
        hard_keys = {scalar_key(u) for u in hard}
        soft = [u for u in soft if scalar_key(u) not in hard_keys]
    return uniq, soft


def _return_map(
    chart: _Chart, budget: Budget, regular: Optional[Set[Corner]] = None
) -> Tuple[IET, Scalar, List[Scalar]]:
    """(首次返回映射, 未覆盖的长度, 只由正则点产生的分割点)"""
    cuts, soft = _breakpoints(chart, budget, regular)
    raw: List[Tuple[Scalar, Scalar, Scalar, Scalar, Scalar]] = []
    uncovered: Scalar = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        us = (lo + (hi - lo) / 3, (lo + hi) / 2, lo + 2 * (hi - lo) / 3)
        samples = [_sample_return(chart, u, budget) for u in us]
        if any(s is None for s in samples):
            uncovered = uncovered + (hi - lo)
            continue
        (s1, t1), (s2, t2), (s3, t3) = samples
        if cmp(s1, s2) != 0 or cmp(s2, s3) != 0:
            raise TruncationTooCoarse(f"return map is not a translation on ({lo}, {hi}); widen the window")
        # 横截线各段方向不同时，返回时间在分量内仿射变化
        slope = (t2 - t1) / (us[1] - us[0])
        if cmp(t3, t2 + slope * (us[2] - us[1])) != 0:
            raise TruncationTooCoarse(f"return time is not affine on ({lo}, {hi})")
        time = t2 - slope * (us[1] - lo)
        if raw:
            p_lo, p_hi, p_shift, p_time, p_slope = raw[-1]
            if (
                cmp(p_hi, lo) == 0
                and cmp(p_shift, s2) == 0
                and cmp(p_slope, slope) == 0
                and cmp(p_time + p_slope * (lo - p_lo), time) == 0
            ):
                raw[-1] = (p_lo, hi, p_shift, p_time, p_slope)
                continue
        raw.append((lo, hi, s2, time, slope))
    pieces = [
        Piece(_label(i), lo, hi - lo, lo + shift, time, slope)
        for i, (lo, hi, shift, time, slope) in enumerate(raw)
    ]
    iet = IET(pieces, total=chart.total, name=f"first return in direction {chart.d}")
    return iet, uncovered, soft


def first_return_iet(
    surface: Surface,
    transversal: Transversal,
    direction: Sequence[Scalar],
    budget: Optional[Budget] = None,
    window: Window = None,
    allow_partial: bool = False,
    normalize: bool = True,
) -> IET:
    """沿 direction 的流在横截线上的首次返回映射

    定义域的分割点由奇点与端点的后向叶给出；每个子区间取三个内点追踪，平移量必须一致，返回时间必须仿射。
    """
    budget = budget or Budget()
    d = _check_direction(direction)
    fs = as_finite(surface, window)
    chart = _Chart(fs, transversal, d, normalize)
    iet, uncovered, _ = _return_map(chart, budget)
    covered = chart.total - uncovered
    logger.info("首次返回映射：%s 个分量，覆盖 %s / %s", len(iet.pieces), covered, chart.total)
    if sign(uncovered) > 0 and not allow_partial:
        raise PartialResult(
            f"first return covers {covered} of {chart.total}; widen the window or raise the budget",
            partial=iet,
            covered=covered,
        )
    return iet


# ============================================================
# 柱面
# ============================================================


@dataclass
class Cylinder:
    direction: Vec
    modulus: Scalar
    height2: Scalar
    circumference2: Scalar
    area: Scalar
    period: int
    height: Union[Scalar, float] = 0
    circumference: Union[Scalar, float] = 0


def _root(x: Scalar) -> Union[Scalar, float]:
    try:
        return sqrt_scalar(x)
    except ModeError:
        return math.sqrt(to_float(x))


def auto_transversal(fs: FiniteSurface, d: Vec) -> Transversal:
    """每对不平行于 d 的内部边取一条"""
    edges = []
    for a, b in fs.pairs:
        if a.poly not in fs.polygons or b.poly not in fs.polygons:
            continue
        if sign(cross(fs.edge_vector(a), d)) == 0:
            continue
        edges.append(a)
    return Transversal.from_edges(fs, edges)


@dataclass
class _Strip:
    """一个周期分量的轨道：穿过横截线的各段区间与一周的流时间"""

    key: Scalar
    width: Scalar
    time: Scalar
    period: int
    crossings: List[Tuple[Scalar, Scalar]]


def _orbit_strips(iet: IET, n_max: int) -> List[_Strip]:
    strips: Dict[tuple, _Strip] = {}
    for c in periodic_components(iet, n_max):
        x = (c.lo + c.hi) / 2
        half = (c.hi - c.lo) / 2
        crossings = []
        time: Scalar = Fraction(0)
        for _ in range(c.period):
            crossings.append((x - half, x + half))
            p = iet.piece_at(x)
            time = time + p.time_at(x)
            x = x + p.shift
        key = min((lo for lo, _ in crossings), key=to_float)
        strips.setdefault(scalar_key(key), _Strip(key, c.hi - c.lo, time, c.period, crossings))
    return list(strips.values())


def _join_strips(strips: List[_Strip], soft: List[Scalar]) -> List[List[_Strip]]:
    """正则点的叶两侧、流时间相同的带属于同一个极大柱面"""
    parent = list(range(len(strips)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    lower: Dict[tuple, int] = {}
    upper: Dict[tuple, int] = {}
    for n, s in enumerate(strips):
        for lo, hi in s.crossings:
            lower[scalar_key(hi)] = n
            upper[scalar_key(lo)] = n
    for u in soft:
        k = scalar_key(u)
        if k in lower and k in upper:
            a, b = lower[k], upper[k]
            if cmp(strips[a].time, strips[b].time) == 0:
                parent[find(a)] = find(b)
    groups: Dict[int, List[_Strip]] = {}
    for n, s in enumerate(strips):
        groups.setdefault(find(n), []).append(s)
    return list(groups.values())


def cylinders_in_direction(
    surface: Surface,
    direction: Sequence[Scalar],
    budget: Optional[Budget] = None,
    window: Window = None,
    n_max: Optional[int] = None,
) -> List[Cylinder]:
    """首次返回映射的周期分量按轨道分组，每组是一个极大柱面

    模数 = 高/周长 = w / (T·|d|²)，w 为未归一化宽度，T 为一周的流时间。
    多边形的正则顶点落在柱面内部时，它的叶把柱面切成几条带，这里再拼回去。
    """
    budget = budget or Budget()
    d = _check_direction(direction)
    fs = as_finite(surface, window)
    T = auto_transversal(fs, d)
    if not T.pieces:
        return []
    regular = {corner for c in vertex_classes(fs) if c.kind == VertexKind.REGULAR for corner in c.corners}
    chart = _Chart(fs, T, d, normalize=False)
    iet, _, soft = _return_map(chart, budget, regular)
    n_max = n_max or 2 * len(iet.pieces) + 2
    dd = norm2(d)
    cylinders: List[Tuple[Scalar, Cylinder]] = []
    for group in _join_strips(_orbit_strips(iet, n_max), soft):
        w = sum((s.width for s in group), Fraction(0))
        time = group[0].time
        height2 = w * w / dd
        circ2 = time * time * dd
        cyl = Cylinder(
            direction=d,
            modulus=w / (time * dd),
            height2=height2,
            circumference2=circ2,
            area=w * time,
            period=min(s.period for s in group),
            height=_root(height2),
            circumference=_root(circ2),
        )
        cylinders.append((min((s.key for s in group), key=to_float), cyl))
    cylinders.sort(key=lambda kc: to_float(kc[0]))
    logger.info("方向 %s 上找到 %s 个柱面", d, len(cylinders))
    return [c for _, c in cylinders]


def twist_matrix(direction: Sequence[Scalar], lam: Scalar) -> Mat2:
    """固定方向 d 的抛物矩阵 I + (λ/|d|²)·d·d⊥ᵀ，d⊥ = (−d_y, d_x)"""
    d = _check_direction(direction)
    c = exact(lam) / norm2(d)
    perp = (-d[1], d[0])
    return Mat2(1 + c * d[0] * perp[0], c * d[0] * perp[1], c * d[1] * perp[0], 1 + c * d[1] * perp[1])


def multitwist_check(
    surface: Surface,
    direction: Sequence[Scalar],
    lam: Scalar,
    window: Window = None,
    budget: Optional[Budget] = None,
) -> bool:
    """所有柱面模数都等于 1/λ，且（有限曲面上）twist_matrix 作用后与原曲面同构"""
    lam = exact(lam)
    if sign(lam) <= 0:
        raise DomainError("λ must be positive")
    cylinders = cylinders_in_direction(surface, direction, budget=budget, window=window)
    if not cylinders:
        raise PartialResult("no cylinder found in this direction", partial=[], covered=0)
    target = 1 / lam
    if any(cmp(c.modulus, target) != 0 for c in cylinders):
        return False
    if not isinstance(surface, FiniteSurface) or surface.allow_boundary:
        return True
    area: Scalar = Fraction(0)
    for c in cylinders:
        area = area + c.area
    if cmp(area, surface.area()) != 0:
        raise PartialResult(
            f"cylinders cover area {area} of {surface.area()}", partial=cylinders, covered=area
        )
    return isomorphic(apply_matrix(twist_matrix(direction, lam), surface), surface)


# ============================================================
# 例子
# ============================================================


def two_marked_torus() -> Tuple[FiniteSurface, Transversal]:
    """2×1 环面带两个标记点，横截线取连接两个不同标记点类的对角线 (0,1)→(2,0)"""
    s = two_square_torus()
    return s, Transversal([TransversalPiece(0, (Fraction(0), Fraction(1)), (Fraction(2), Fraction(0)))])
