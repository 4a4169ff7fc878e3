"""
平移曲面同构判定

流程：耳切三角化 → Lawson 翻转得到 Delaunay 三角剖分（精确内切圆行列式）
→ 去掉正则标记点 → 合并共圆三角形为 Delaunay 胞腔 → BFS 规范编码取最小。
Delaunay 分解只依赖曲面本身，所以规范码相同当且仅当曲面相差一个平移同构。
"""

import logging
from collections import Counter, deque
from typing import Dict, List, Optional, Sequence, Tuple

from flatland.core.enums import VertexKind
from flatland.core.errors import DomainError, ModeError, NotFinite
from flatland.core.plane import Vec, cross, vadd, vsub
from flatland.core.scalar import cmp, is_exact, scalar_key, sign
from flatland.core.surface import EdgeRef, FiniteSurface, Polygon, Surface, vertex_classes

logger = logging.getLogger(__name__)

HalfEdge = Tuple[int, int]
MAX_FLIPS = 100_000


# ============================================================
# 耳切
# ============================================================


def _in_closed_triangle(p: Vec, a: Vec, b: Vec, c: Vec) -> bool:
    return (
        sign(cross(vsub(b, a), vsub(p, a))) >= 0
        and sign(cross(vsub(c, b), vsub(p, b))) >= 0
        and sign(cross(vsub(a, c), vsub(p, c))) >= 0
    )


def ear_clip(points: Sequence[Vec]) -> List[Tuple[Tuple[int, int, int], List[tuple]]]:
    """
    简单多边形（可含共线顶点、非凸）的耳切三角化。

    返回 [(顶点下标三元组, 三条边的来源)]；来源为 ("side", a)（多边形第 a 条边）
    或 ("diag", 三角形序号, 边号)；None 表示这条对角线由之后切下的三角形负责粘合。
    """
    n = len(points)
    idx = list(range(n))
    source: Dict[Tuple[int, int], tuple] = {(a, (a + 1) % n): ("side", a) for a in range(n)}
    out: List[Tuple[Tuple[int, int, int], List[tuple]]] = []
    while len(idx) > 3:
        m = len(idx)
        for pos in range(m):
            p, c, q = idx[pos - 1], idx[pos], idx[(pos + 1) % m]
            A, B, C = points[p], points[c], points[q]
            if sign(cross(vsub(B, A), vsub(C, B))) <= 0:
                continue
            if any(_in_closed_triangle(points[o], A, B, C) for o in idx if o not in (p, c, q)):
                continue
            t = len(out)
            out.append(((p, c, q), [source[(p, c)], source[(c, q)], None]))
            source[(p, q)] = ("diag", t, 2)
            idx.pop(pos)
            break
        else:
            raise DomainError("polygon is not simple; ear clipping failed")
    p, c, q = idx
    out.append(((p, c, q), [source[(p, c)], source[(c, q)], source[(q, p)]]))
    return out


# ============================================================
# 三角剖分
# ============================================================


def _incircle(a: Vec, b: Vec, c: Vec, d: Vec) -> int:
    """d 在逆时针三角形 abc 外接圆内为正，圆上为 0"""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return sign(det)


class Triangulation:
    """带平移粘合的三角形集合；每个三角形保存自己坐标卡中的顶点"""

    def __init__(self):
        self.tris: Dict[int, List[Vec]] = {}
        self.adj: Dict[HalfEdge, HalfEdge] = {}
        self._next = 0

    def add(self, pts: Sequence[Vec]) -> int:
        t = self._next
        self._next += 1
        self.tris[t] = list(pts)
        return t

    def link(self, h1: HalfEdge, h2: HalfEdge) -> None:
        self.adj[h1] = h2
        self.adj[h2] = h1

    def remove(self, t: int) -> None:
        for k in range(3):
            self.adj.pop((t, k), None)
        del self.tris[t]

    @staticmethod
    def from_surface(surface: FiniteSurface) -> "Triangulation":
        tri = Triangulation()
        orig: Dict[EdgeRef, HalfEdge] = {}
        for idx, poly in surface.polygons.items():
            pieces = ear_clip(poly.vertices)
            ids = [tri.add([poly.vertices[i] for i in verts]) for verts, _ in pieces]
            for t_local, (_, srcs) in enumerate(pieces):
                for k, src in enumerate(srcs):
                    if src is None:
                        continue
                    if src[0] == "side":
                        orig[EdgeRef(idx, src[1])] = (ids[t_local], k)
                    else:
                        tri.link((ids[t_local], k), (ids[src[1]], src[2]))
        for a, b in surface.pairs:
            tri.link(orig[a], orig[b])
        return tri

    def as_surface(self) -> FiniteSurface:
        pairs = []
        seen = set()
        for h, o in self.adj.items():
            if h in seen:
                continue
            seen.add(h)
            seen.add(o)
            pairs.append((EdgeRef(*h), EdgeRef(*o)))
        boundary = len(self.adj) < 3 * len(self.tris)
        return FiniteSurface({t: Polygon(tuple(p)) for t, p in self.tris.items()}, pairs, allow_boundary=boundary)

    # ------------------------------------------------------------
    # 翻转
    # ------------------------------------------------------------
    def _quad(self, t: int, k: int):
        t2, k2 = self.adj[(t, k)]
        P, Q = self.tris[t], self.tris[t2]
        A, B, C = P[k], P[(k + 1) % 3], P[(k + 2) % 3]
        shift = vsub(A, Q[(k2 + 1) % 3])
        D = vadd(Q[(k2 + 2) % 3], shift)
        return t2, k2, A, B, C, D

    def edge_incircle(self, t: int, k: int) -> Optional[int]:
        if (t, k) not in self.adj:
            return None
        _, _, A, B, C, D = self._quad(t, k)
        return _incircle(A, B, C, D)

    def flip(self, t: int, k: int) -> Optional[Tuple[int, int]]:
        """翻转内部边；两侧是同一三角形或四边形非严格凸时返回 None"""
        if (t, k) not in self.adj:
            return None
        t2, k2, A, B, C, D = self._quad(t, k)
        if t2 == t:
            return None
        if sign(cross(vsub(A, C), vsub(D, A))) <= 0 or sign(cross(vsub(B, D), vsub(C, B))) <= 0:
            return None
        h_ca, h_bc = (t, (k + 2) % 3), (t, (k + 1) % 3)
        h_ad, h_db = (t2, (k2 + 1) % 3), (t2, (k2 + 2) % 3)
        n1 = self.add([C, A, D])
        n2 = self.add([D, B, C])
        remap = {h_ca: (n1, 0), h_ad: (n1, 1), h_db: (n2, 0), h_bc: (n2, 1)}
        links = []
        for old, new in remap.items():
            nb = self.adj.get(old)
            if nb is not None:
                links.append((new, remap.get(nb, nb)))
        self.remove(t)
        self.remove(t2)
        for new, nb in links:
            self.link(new, nb)
        self.link((n1, 2), (n2, 2))
        return n1, n2

    def make_delaunay(self) -> int:
        """Lawson 翻转，直到所有内部边都满足空圆条件；返回翻转次数"""
        queue = deque(self.adj.keys())
        flips = 0
        while queue:
            t, k = queue.popleft()
            if t not in self.tris or (t, k) not in self.adj:
                continue
            if self.edge_incircle(t, k) <= 0:
                continue
            res = self.flip(t, k)
            if res is None:
                logger.debug("跳过不可翻转的边 %s", (t, k))
                continue
            flips += 1
            if flips > MAX_FLIPS:
                raise DomainError("Delaunay flipping did not terminate")
            for n in res:
                for j in range(3):
                    queue.append((n, j))
        return flips

    # ------------------------------------------------------------
    # 去掉正则顶点
    # ------------------------------------------------------------
    def _remove_vertex(self, corners: List[Tuple[int, int]]) -> bool:
        tris = [t for t, _ in corners]
        if len(set(tris)) != len(tris) or len(corners) < 3:
            return False
        link_pts = []
        outer = []
        for t, c in corners:
            P = self.tris[t]
            link_pts.append(vsub(P[(c + 1) % 3], P[c]))
            outer.append((t, (c + 1) % 3))
        try:
            pieces = ear_clip(link_pts)
        except DomainError:
            return False
        nbs = [self.adj.get(h) for h in outer]
        ids = [self.add([link_pts[i] for i in verts]) for verts, _ in pieces]
        remap: Dict[HalfEdge, HalfEdge] = {}
        for t_local, (_, srcs) in enumerate(pieces):
            for k, src in enumerate(srcs):
                if src is not None and src[0] == "side":
                    remap[outer[src[1]]] = (ids[t_local], k)
        diag_links = []
        for t_local, (_, srcs) in enumerate(pieces):
            for k, src in enumerate(srcs):
                if src is not None and src[0] == "diag":
                    diag_links.append(((ids[t_local], k), (ids[src[1]], src[2])))
        for t in tris:
            self.remove(t)
        for h, nb in zip(outer, nbs):
            if nb is not None:
                self.link(remap[h], remap.get(nb, nb))
        for a, b in diag_links:
            self.link(a, b)
        return True

    def forget_regular_vertices(self) -> int:
        removed = 0
        while True:
            classes = vertex_classes(self.as_surface(), corner_budget=10 * len(self.tris) + 10)
            regular = [c for c in classes if c.kind == VertexKind.REGULAR]
            if not regular or (len(regular) == len(classes) and len(classes) == 1):
                self.make_delaunay()
                return removed
            done = False
            for cls in regular:
                if self._try_remove(cls.corners):
                    removed += 1
                    self.make_delaunay()
                    done = True
                    break
            if not done:
                self.make_delaunay()
                return removed

    def _try_remove(self, corners: List[Tuple[int, int]]) -> bool:
        for _ in range(len(corners) + 3):
            if self._remove_vertex(corners):
                return True
            # 星形不是圆盘：翻转一条辐边降低度数后重试
            flipped = False
            for t, c in corners:
                if self.flip(t, c) is not None:
                    flipped = True
                    break
            if not flipped:
                return False
            corners = self._corners_of(corners)
            if corners is None:
                return False
        return False

    def _corners_of(self, old: List[Tuple[int, int]]) -> Optional[List[Tuple[int, int]]]:
        """翻转后重新定位同一个顶点的角序列"""
        classes = vertex_classes(self.as_surface(), corner_budget=10 * len(self.tris) + 10)
        alive = {c for c in old if c[0] in self.tris}
        for cls in classes:
            if cls.kind == VertexKind.REGULAR and alive & set(cls.corners):
                return cls.corners
        return None


# ============================================================
# Delaunay 胞腔与规范码
# ============================================================


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def delaunay_cells(tri: Triangulation) -> List[List[Tuple[Vec, Optional[HalfEdge], HalfEdge]]]:
    """把共圆三角形合并成胞腔；每个胞腔给出逆时针边界 [(边向量, 对面半边, 本半边)]"""
    uf = _UnionFind(tri.tris.keys())
    merged = set()
    for (t, k), (t2, k2) in tri.adj.items():
        if t == t2:
            continue
        if tri.edge_incircle(t, k) == 0:
            uf.union(t, t2)
            merged.add((t, k))
    groups: Dict[int, List[int]] = {}
    for t in tri.tris:
        groups.setdefault(uf.find(t), []).append(t)
    cells = []
    for root in sorted(groups):
        offset: Dict[int, Vec] = {root: (0, 0)}
        queue = deque([root])
        while queue:
            t = queue.popleft()
            P = tri.tris[t]
            for k in range(3):
                if (t, k) not in merged:
                    continue
                t2, k2 = tri.adj[(t, k)]
                if t2 in offset:
                    continue
                Q = tri.tris[t2]
                # 把 t2 平移到 t 的坐标卡，再叠加 t 的偏移
                shift = vsub(P[k], Q[(k2 + 1) % 3])
                offset[t2] = vadd(offset[t], shift)
                queue.append(t2)
        starts: Dict[Vec, Tuple[Vec, Vec, HalfEdge]] = {}
        for t in groups[root]:
            P = tri.tris[t]
            for k in range(3):
                if (t, k) in merged:
                    continue
                s = vadd(P[k], offset[t])
                e = vadd(P[(k + 1) % 3], offset[t])
                starts[s] = (e, vsub(e, s), (t, k))
        first = min(starts, key=lambda p: (scalar_key(p[0]), scalar_key(p[1])))
        boundary = []
        cur = first
        for _ in range(len(starts)):
            end, vec, h = starts[cur]
            boundary.append((vec, tri.adj.get(h), h))
            cur = end
            if cur == first:
                break
        if len(boundary) != len(starts):
            raise DomainError("Delaunay cell boundary is not a simple cycle")
        cells.append(boundary)
    return cells


def _canonical_code(cells) -> tuple:
    where: Dict[HalfEdge, Tuple[int, int]] = {}
    for ci, cell in enumerate(cells):
        for pos, (_, _, h) in enumerate(cell):
            where[h] = (ci, pos)
    best = None
    for c0 in range(len(cells)):
        for p0 in range(len(cells[c0])):
            label = {c0: 0}
            entry = {c0: p0}
            order = [c0]
            code = []
            i = 0
            while i < len(order):
                c = order[i]
                i += 1
                cell = cells[c]
                m = len(cell)
                code.append(("cell", m))
                for step in range(m):
                    vec, nb, _ = cell[(entry[c] + step) % m]
                    if nb is None:
                        code.append((scalar_key(vec[0]), scalar_key(vec[1]), -1, -1))
                        continue
                    c2, p2 = where[nb]
                    if c2 not in label:
                        label[c2] = len(order)
                        entry[c2] = p2
                        order.append(c2)
                    off = (p2 - entry[c2]) % len(cells[c2])
                    code.append((scalar_key(vec[0]), scalar_key(vec[1]), label[c2], off))
            if len(order) != len(cells):
                code.append(("disconnected", len(cells) - len(order)))
            key = tuple(code)
            if best is None or key < best:
                best = key
    return best or ()


def _check_input(s: Surface) -> FiniteSurface:
    if not isinstance(s, FiniteSurface):
        raise NotFinite("isomorphism test needs finite surfaces")
    for p in s.polygons.values():
        for x, y in p.vertices:
            if not (is_exact(x) and is_exact(y)):
                raise ModeError("isomorphism test needs exact coordinates")
    return s


def canonical_form(surface: Surface, forget_marked: bool = True) -> tuple:
    fs = _check_input(surface)
    tri = Triangulation.from_surface(fs)
    tri.make_delaunay()
    if forget_marked:
        tri.forget_regular_vertices()
    return _canonical_code(delaunay_cells(tri))


def _cone_signature(fs: FiniteSurface, forget_marked: bool) -> Counter:
    ks = [c.k for c in vertex_classes(fs) if c.k is not None]
    if forget_marked:
        ks = [k for k in ks if k > 1]
    return Counter(ks)


def isomorphic(s1: Surface, s2: Surface, forget_marked: bool = True) -> bool:
    """两曲面是否相差一个平移同构（forget_marked 时忽略正则标记点）"""
    a, b = _check_input(s1), _check_input(s2)
    if cmp(a.area(), b.area()) != 0:
        return False
    if _cone_signature(a, forget_marked) != _cone_signature(b, forget_marked):
        return False
    return canonical_form(a, forget_marked) == canonical_form(b, forget_marked)


def triangle_count(surface: Surface) -> int:
    return len(Triangulation.from_surface(_check_input(surface)).tris)

