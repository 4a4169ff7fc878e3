"""
Hooper-Thurston-Veech 构造

二部带状图 (I, J, E, r, u) 加上正的 λ-调和函数 h，每条边 e 给出矩形
R_e = [0, h(p_J(e))] × [0, h(p_I(e))]；R_e 的右边贴 R_{r(e)} 的左边，上边贴 R_{u(e)} 的下边。
水平柱面对应 I 顶点、竖直柱面对应 J 顶点，模数都是 1/λ。
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from flatland.core.builders import BOTTOM, LEFT, RIGHT, TOP, baker, baker_window, rectangle_surface, staircase_heights
from flatland.core.enums import HarmonicFamily, TailKind
from flatland.core.errors import DomainError, PartialResult, TruncationTooCoarse
from flatland.core.flow import cylinders_in_direction
from flatland.core.mat2 import Mat2
from flatland.core.scalar import (
    QuadExt,
    Scalar,
    cmp,
    exact,
    is_exact,
    scalar_key,
    sign,
    solve_char_quadratic,
    sqrt_scalar,
    to_float,
)
from flatland.core.surface import EdgeRef, FiniteSurface, Surface, apply_matrix

logger = logging.getLogger(__name__)

SIDE_I = "I"
SIDE_J = "J"

PF_TOLERANCE = 1e-12
PF_MAX_ITER = 200_000
# 核对面包师曲面模数时，核心多边形之外再展开的 L 形块层数
BAKER_WINDOW_DEPTH = 4


# ============================================================
# 带状图
# ============================================================


class RibbonGraph:
    """二部带状图的公共接口；star(v) 按循环序列出 v 处的边（重边重复出现）"""

    name: str = "ribbon graph"
    is_finite = False

    def side(self, v: Hashable) -> str:
        raise NotImplementedError

    def star(self, v: Hashable) -> List[Hashable]:
        raise NotImplementedError

    def endpoints(self, e: Hashable) -> Tuple[Hashable, Hashable]:
        """(p_I(e), p_J(e))"""
        raise NotImplementedError

    @property
    def seed(self) -> Hashable:
        raise NotImplementedError

    def _cyclic(self, v: Hashable, e: Hashable, step: int) -> Hashable:
        s = self.star(v)
        return s[(s.index(e) + step) % len(s)]

    def r(self, e: Hashable) -> Hashable:
        return self._cyclic(self.endpoints(e)[0], e, 1)

    def r_inv(self, e: Hashable) -> Hashable:
        return self._cyclic(self.endpoints(e)[0], e, -1)

    def u(self, e: Hashable) -> Hashable:
        return self._cyclic(self.endpoints(e)[1], e, 1)

    def u_inv(self, e: Hashable) -> Hashable:
        return self._cyclic(self.endpoints(e)[1], e, -1)

    def other(self, e: Hashable, v: Hashable) -> Hashable:
        i, j = self.endpoints(e)
        return j if v == i else i

    def neighbors(self, v: Hashable) -> List[Hashable]:
        return [self.other(e, v) for e in self.star(v)]

    def degree(self, v: Hashable) -> int:
        return len(self.star(v))

    def ball(self, radius: int) -> List[Hashable]:
        """种子顶点的组合球，按广度优先顺序"""
        dist = {self.seed: 0}
        order = [self.seed]
        queue = deque([self.seed])
        while queue:
            v = queue.popleft()
            if dist[v] >= radius:
                continue
            for w in self.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    order.append(w)
                    queue.append(w)
        return order

    def edges_within(self, vertices: Sequence[Hashable]) -> List[Hashable]:
        inside = set(vertices)
        out: List[Hashable] = []
        seen = set()
        for v in vertices:
            if self.side(v) != SIDE_I:
                continue
            for e in self.star(v):
                if e not in seen and self.endpoints(e)[1] in inside:
                    seen.add(e)
                    out.append(e)
        return out


class LazyRibbonGraph(RibbonGraph):
    def __init__(
        self,
        side: Callable[[Hashable], str],
        star: Callable[[Hashable], List[Hashable]],
        endpoints: Callable[[Hashable], Tuple[Hashable, Hashable]],
        seed: Hashable,
        name: str = "lazy ribbon graph",
    ):
        self._side = side
        self._star = star
        self._endpoints = endpoints
        self._seed = seed
        self.name = name

    def side(self, v):
        return self._side(v)

    def star(self, v):
        return self._star(v)

    def endpoints(self, e):
        return self._endpoints(e)

    @property
    def seed(self):
        return self._seed

    def __repr__(self):
        return f"LazyRibbonGraph({self.name})"


class FiniteRibbonGraph(RibbonGraph):
    """有限带状图；顶点记为 ("I", i)、("J", j)，边为 0..m−1，r、u 是边集上的置换"""

    is_finite = True

    def __init__(
        self,
        I: Sequence[Hashable],
        J: Sequence[Hashable],
        edges: Sequence[Tuple[Hashable, Hashable]],
        r: Optional[Sequence[int]] = None,
        u: Optional[Sequence[int]] = None,
        name: str = "ribbon graph",
    ):
        self.I = list(I)
        self.J = list(J)
        self.edge_list = [(i, j) for i, j in edges]
        self.name = name
        if not self.edge_list:
            raise DomainError("a ribbon graph needs at least one edge")
        for i, j in self.edge_list:
            if i not in self.I or j not in self.J:
                raise DomainError(f"edge ({i}, {j}) must join an I-vertex to a J-vertex")
        self._r = list(r) if r is not None else self._default_order(0)
        self._u = list(u) if u is not None else self._default_order(1)
        self._check_rotation(self._r, 0, "r")
        self._check_rotation(self._u, 1, "u")
        self._stars = {}
        for side, names, perm, k in ((SIDE_I, self.I, self._r, 0), (SIDE_J, self.J, self._u, 1)):
            for name_ in names:
                at = [e for e, ep in enumerate(self.edge_list) if ep[k] == name_]
                orbit: List[int] = []
                if at:
                    e = at[0]
                    while True:
                        orbit.append(e)
                        e = perm[e]
                        if e == at[0]:
                            break
                self._stars[(side, name_)] = orbit
        if any(not s for s in self._stars.values()):
            raise DomainError("every vertex needs at least one edge")
        if len(self.ball(len(self._stars))) != len(self._stars):
            raise DomainError("ribbon graph is disconnected")

    def _default_order(self, k: int) -> List[int]:
        perm = list(range(len(self.edge_list)))
        groups: Dict[Hashable, List[int]] = {}
        for e, ep in enumerate(self.edge_list):
            groups.setdefault(ep[k], []).append(e)
        for es in groups.values():
            for a, b in zip(es, es[1:] + es[:1]):
                perm[a] = b
        return perm

    def _check_rotation(self, perm: List[int], k: int, what: str) -> None:
        m = len(self.edge_list)
        if sorted(perm) != list(range(m)):
            raise DomainError(f"{what} is not a permutation of the edges")
        for e in range(m):
            orbit = {e}
            f = perm[e]
            while f != e:
                orbit.add(f)
                f = perm[f]
            at = {x for x, ep in enumerate(self.edge_list) if ep[k] == self.edge_list[e][k]}
            if orbit != at:
                raise DomainError(f"the {what}-orbit of edge {e} is not the star of its endpoint")

    def vertices(self) -> List[Tuple[str, Hashable]]:
        return [(SIDE_I, i) for i in self.I] + [(SIDE_J, j) for j in self.J]

    def side(self, v):
        return v[0]

    def star(self, v):
        try:
            return self._stars[v]
        except KeyError:
            raise DomainError(f"unknown vertex {v!r}") from None

    def endpoints(self, e):
        i, j = self.edge_list[e]
        return (SIDE_I, i), (SIDE_J, j)

    @property
    def seed(self):
        return (SIDE_I, self.I[0])

    def r(self, e):
        return self._r[e]

    def u(self, e):
        return self._u[e]

    def r_inv(self, e):
        return self._r.index(e)

    def u_inv(self, e):
        return self._u.index(e)

    def adjacency_matrix(self) -> np.ndarray:
        vs = self.vertices()
        pos = {v: k for k, v in enumerate(vs)}
        M = np.zeros((len(vs), len(vs)))
        for e in range(len(self.edge_list)):
            a, b = self.endpoints(e)
            M[pos[a], pos[b]] += 1
            M[pos[b], pos[a]] += 1
        return M

    def to_json(self) -> Dict[str, Any]:
        return {"I": self.I, "J": self.J, "edges": [list(e) for e in self.edge_list], "r": self._r, "u": self._u}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "FiniteRibbonGraph":
        try:
            return cls(obj["I"], obj["J"], [tuple(e) for e in obj["edges"]], obj.get("r"), obj.get("u"),
                       name=obj.get("name", "ribbon graph"))
        except KeyError as exc:
            raise DomainError(f"graph JSON is missing {exc}") from None

    def __repr__(self):
        return f"FiniteRibbonGraph({self.name}, |E|={len(self.edge_list)})"


# ------------------------------------------------------------
# 命名图族
# ------------------------------------------------------------


def z_graph() -> LazyRibbonGraph:
    """ℤ 图：偶数为 I，边 n = {n, n+1}；得到的矩形族与阶梯构造器逐块相同"""

    def endpoints(n: int):
        return (n, n + 1) if n % 2 == 0 else (n + 1, n)

    return LazyRibbonGraph(
        side=lambda v: SIDE_I if v % 2 == 0 else SIDE_J,
        star=lambda v: [v - 1, v],
        endpoints=endpoints,
        seed=0,
        name="Z",
    )


def modified_n_graph(k: int) -> LazyRibbonGraph:
    """ℕ 链 0,1,2,… 在 0 处再挂 k 片叶子 ("leaf", j)；k = 0 即 ℕ 图"""
    if k < 0:
        raise DomainError("k must be non-negative")

    def side(v):
        if isinstance(v, tuple):
            return SIDE_J
        return SIDE_I if v % 2 == 0 else SIDE_J

    def star(v):
        if isinstance(v, tuple):
            return [("l", v[1])]
        if v == 0:
            return [("l", j) for j in range(1, k + 1)] + [("s", 0)]
        return [("s", v - 1), ("s", v)]

    def endpoints(e):
        kind, n = e
        if kind == "l":
            return 0, ("leaf", n)
        return (n, n + 1) if n % 2 == 0 else (n + 1, n)

    return LazyRibbonGraph(side, star, endpoints, seed=0, name="N" if k == 0 else f"modifiedN({k})")


def n_graph() -> LazyRibbonGraph:
    return modified_n_graph(0)


def tree_graph(q: int) -> LazyRibbonGraph:
    """(q+1)-正则树，按到一个端的 horocycle 分层

    顶点 (n, w)：w 为空表示基准测地线上第 n 层的点，否则从基准点 (n−len(w), ()) 依次走子节点 w；
    w[0] ≠ 0 保证表示唯一。每条边以子顶点为键，星的顺序为父边在前、子边按编号。
    """
    if q < 1:
        raise DomainError("tree branching q must be at least 1")

    def child(v, c: int):
        n, w = v
        if not w and c == 0:
            return (n + 1, ())
        return (n + 1, w + (c,))

    def parent(v):
        n, w = v
        return (n - 1, w[:-1]) if w else (n - 1, ())

    def side(v):
        return SIDE_I if v[0] % 2 == 0 else SIDE_J

    def endpoints(e):
        p = parent(e)
        return (p, e) if side(p) == SIDE_I else (e, p)

    return LazyRibbonGraph(
        side,
        lambda v: [v] + [child(v, c) for c in range(q)],
        endpoints,
        seed=(0, ()),
        name=f"tree({q})",
    )


# ============================================================
# 调和函数
# ============================================================


@dataclass
class HarmonicFunction:
    lam: Scalar
    values: Callable[[Hashable], Scalar]
    graph: RibbonGraph
    tail: TailKind = TailKind.UNKNOWN
    tail_sq: Optional[Callable[[int], Scalar]] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __call__(self, v: Hashable) -> Scalar:
        try:
            return self.values(v)
        except (KeyError, IndexError):
            raise TruncationTooCoarse(f"h is not defined at {v!r}") from None


def _as_function(h) -> Callable[[Hashable], Scalar]:
    if isinstance(h, HarmonicFunction):
        return h
    if callable(h):
        return h
    if isinstance(h, Mapping):
        return lambda v: h[v]
    raise DomainError("h must be a mapping or a callable")


def adjacency_apply(g: RibbonGraph, h, vertices: Optional[Sequence[Hashable]] = None) -> Dict[Hashable, Scalar]:
    """(Ah)(v) = Σ_{w∼v} h(w)，按重数计"""
    f = _as_function(h)
    vs = list(vertices) if vertices is not None else (g.vertices() if g.is_finite else g.ball(1))
    out = {}
    for v in vs:
        total: Scalar = Fraction(0)
        for w in g.neighbors(v):
            try:
                total = total + f(w)
            except (KeyError, IndexError):
                raise TruncationTooCoarse(f"h is not defined at neighbor {w!r} of {v!r}") from None
        out[v] = total
    return out


def pf_harmonic_finite(g: FiniteRibbonGraph) -> HarmonicFunction:
    """[[0,E],[Eᵀ,0]] 的 Perron-Frobenius 特征对；对 A + I 做幂迭代以避开 −λ"""
    if not isinstance(g, FiniteRibbonGraph):
        raise DomainError("Perron-Frobenius needs a finite graph")
    M = g.adjacency_matrix()
    B = M + np.eye(M.shape[0])
    x = np.ones(M.shape[0]) / math.sqrt(M.shape[0])
    for it in range(PF_MAX_ITER):
        y = B @ x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) <= PF_TOLERANCE * np.max(np.abs(y)):
            x = y
            break
        x = y
    else:
        logger.warning("幂迭代在 %s 步内未收敛", PF_MAX_ITER)
    lam = float(x @ M @ x / (x @ x))
    x = x / x[0]
    residual = float(np.max(np.abs(M @ x - lam * x)) / np.max(np.abs(x)))
    logger.info("Perron-Frobenius：λ = %.12g，残差 %.3g，迭代 %s 次", lam, residual, it + 1)
    values = {v: float(x[k]) for k, v in enumerate(g.vertices())}
    return HarmonicFunction(lam, values.__getitem__, g, TailKind.FINITE, params={"residual": residual})


def _positive_z(lam: Scalar, A: Scalar, B: Scalar) -> None:
    if cmp(lam, 2) == 0:
        if sign(B) != 0 or sign(A) <= 0:
            raise DomainError("for λ = 2 the only positive solution is constant: need A > 0, B = 0")
    elif sign(A) < 0 or sign(B) < 0 or (sign(A) == 0 and sign(B) == 0):
        raise DomainError("h(n) = A r₊ⁿ + B r₋ⁿ is positive on ℤ only when A, B ≥ 0 and not both zero")


def _modified_n(lam: Scalar, k: int, h0: Scalar) -> HarmonicFunction:
    r_plus, r_minus = solve_char_quadratic(lam)
    mu = lam - Fraction(k) / lam
    # 充要条件为 μ·r₊ ≥ 1；等号时 h = h0·r₋ⁿ
    if cmp(mu * r_plus, 1) < 0:
        raise DomainError(
            f"h is not positive: (λ − k/λ)·r₊ = {mu * r_plus} < 1 for k = {k}, λ = {lam}"
        )
    if cmp(lam, 2) == 0:
        def spine(n: int) -> Scalar:
            return h0 * (1 + (mu - 1) * n)
    else:
        c_plus = (mu - r_minus) / (r_plus - r_minus)
        c_minus = 1 - c_plus

        def spine(n: int) -> Scalar:
            return h0 * (c_plus * r_plus**n + c_minus * r_minus**n)

    def values(v):
        if isinstance(v, tuple):
            return h0 / lam
        if v < 0:
            raise KeyError(v)
        return spine(v)

    geometric = cmp(lam, 2) > 0 and cmp(mu * r_plus, 1) == 0
    tail_sq = None
    if geometric:
        ratio2 = r_minus * r_minus

        def tail_sq(radius: int) -> Scalar:
            return h0 * h0 * ratio2 ** (radius + 1) / (1 - ratio2)

    return HarmonicFunction(
        lam,
        values,
        modified_n_graph(k),
        TailKind.GEOMETRIC if geometric else TailKind.DIVERGENT,
        tail_sq,
        params={"k": k, "h0": h0, "ratio": r_minus if geometric else None},
    )


def harmonic_closed_form(
    family: Union[HarmonicFamily, str],
    lam: Scalar,
    k: int = 1,
    q: int = 2,
    A: Scalar = 1,
    B: Scalar = 0,
    h0: Scalar = 1,
) -> HarmonicFunction:
    family = HarmonicFamily(family)
    lam, A, B, h0 = exact(lam), exact(A), exact(B), exact(h0)
    if sign(h0) <= 0:
        raise DomainError("h0 must be positive")
    if family == HarmonicFamily.Z:
        solve_char_quadratic(lam)
        _positive_z(lam, A, B)
        h = staircase_heights(lam, h0, A, B)
        return HarmonicFunction(lam, h, z_graph(), TailKind.DIVERGENT, params={"A": A, "B": B, "h0": h0})
    if family == HarmonicFamily.N:
        return _modified_n(lam, 0, h0)
    if family == HarmonicFamily.MODIFIED_N:
        return _modified_n(lam, k, h0)
    # 树：λ h_n = q h_{n+1} + h_{n−1}
    if cmp(lam * lam, 4 * q) < 0:
        raise DomainError(f"tree({q}) needs λ ≥ 2√q, got λ = {lam}")
    disc = lam * lam - 4 * q
    root = sqrt_scalar(disc) if is_exact(disc) else math.sqrt(max(float(disc), 0.0))
    r_plus = (lam + root) / (2 * q)
    return HarmonicFunction(
        lam,
        lambda v: h0 * r_plus ** v[0],
        tree_graph(q),
        TailKind.DIVERGENT,
        params={"q": q, "ratio": r_plus, "h0": h0},
    )


def baker_harmonic(q: int) -> HarmonicFunction:
    """modifiedN(q+1) 上 λ = (q+1)/√q 的调和函数 h(n) = q^{−n/2}"""
    if q < 2:
        raise DomainError("q must be at least 2")
    return harmonic_closed_form(HarmonicFamily.MODIFIED_N, baker_lambda(q), k=q + 1)


def baker_lambda(q: int) -> Scalar:
    return QuadExt.make(0, Fraction(q + 1, q), q)


# ============================================================
# 曲面拼装与校验
# ============================================================


def check_harmonic(g: RibbonGraph, h, vertices: Sequence[Hashable]) -> None:
    f = _as_function(h)
    lam = h.lam if isinstance(h, HarmonicFunction) else None
    Ah = adjacency_apply(g, f, vertices)
    for v in vertices:
        hv = f(v)
        if sign(hv) <= 0:
            raise DomainError(f"h({v!r}) = {hv} is not positive")
        if lam is not None and cmp(Ah[v], lam * hv) != 0:
            raise DomainError(f"h is not {lam}-harmonic at {v!r}: (Ah) = {Ah[v]}, λh = {lam * hv}")


def assemble_surface(g: RibbonGraph, h: HarmonicFunction, window: int = 10) -> Surface:
    """按 h 放置矩形并粘合；有限图给出闭曲面，惰性图给出惰性曲面（只在 window 球上校验调和性）"""
    vertices = g.vertices() if g.is_finite else g.ball(window)
    check_harmonic(g, h, vertices)

    def size(e):
        i, j = g.endpoints(e)
        return h(j), h(i)

    name = f"HTV({g.name}, λ={h.lam})"
    if g.is_finite:
        return rectangle_surface(size, g.r, g.u, indices=list(range(len(g.edge_list))), name=name)
    seed_edge = g.star(g.seed)[0]
    hints = {"kind": "htv", "lambda": h.lam, "graph": g.name}
    if h.tail == TailKind.GEOMETRIC:
        hints["area"] = "finite"
    surface = rectangle_surface(size, g.r, g.u, right_inv=g.r_inv, up_inv=g.u_inv, seed=seed_edge, name=name,
                                hints=hints)
    logger.info("拼装 %s：在 %s 个顶点上校验了调和性", name, len(vertices))
    return surface


def window_edges(g: RibbonGraph, radius: int) -> List[Hashable]:
    """两端都在 radius 球内的边，对应曲面窗口中的矩形"""
    return g.edges_within(g.ball(radius))


@dataclass
class ModuliReport:
    horizontal: Dict[Hashable, Scalar]
    vertical: Dict[Hashable, Scalar]
    circumference: Dict[Hashable, Scalar]

    def all_equal(self, target: Scalar) -> bool:
        return all(cmp(m, target) == 0 for m in list(self.horizontal.values()) + list(self.vertical.values()))


def _walk(surface: Surface, start: Hashable, side: int, glue_to: int, length_coord: int, limit: int):
    total: Scalar = Fraction(0)
    e = start
    for _ in range(limit):
        corner = surface.polygon(e).vertex(2)
        total = total + corner[length_coord]
        o = surface.opposite(EdgeRef(e, side))
        if o is None or o.edge != glue_to:
            return None
        e = o.poly
        if e == start:
            return total, corner[1 - length_coord]
    return None


def cylinder_moduli(g: RibbonGraph, surface: Surface, vertices: Sequence[Hashable]) -> ModuliReport:
    """从拼好的几何读出每个顶点对应柱面的模数；跑出窗口的柱面跳过"""
    horizontal, vertical, circ = {}, {}, {}
    for v in vertices:
        star = g.star(v)
        if not star:
            continue
        if isinstance(surface, FiniteSurface) and any(e not in surface.polygons for e in star):
            continue
        if g.side(v) == SIDE_I:
            res = _walk(surface, star[0], RIGHT, LEFT, 0, len(star) + 1)
            if res is not None:
                horizontal[v] = res[1] / res[0]
                circ[v] = res[0]
        else:
            res = _walk(surface, star[0], TOP, BOTTOM, 1, len(star) + 1)
            if res is not None:
                vertical[v] = res[1] / res[0]
                circ[v] = res[0]
    return ModuliReport(horizontal, vertical, circ)


@dataclass
class AreaReport:
    value: Optional[Scalar]
    partial: Scalar
    tail: Optional[Scalar]
    infinite: bool
    radius: Optional[int] = None


def area(g: RibbonGraph, h: HarmonicFunction, radius: int = 20) -> AreaReport:
    """Area = (λ/2)·Σ h_v²；几何尾部精确求和，h ∉ ℓ² 时报告无穷"""
    lam = h.lam
    if g.is_finite:
        total = sum((h(v) * h(v) for v in g.vertices()), Fraction(0))
        value = lam * total / 2
        return AreaReport(value, value, Fraction(0), False)
    partial = lam * sum((h(v) * h(v) for v in g.ball(radius)), Fraction(0)) / 2
    if h.tail == TailKind.DIVERGENT:
        return AreaReport(None, partial, None, True, radius)
    if h.tail == TailKind.GEOMETRIC and h.tail_sq is not None:
        tail = lam * h.tail_sq(radius) / 2
        return AreaReport(partial + tail, partial, tail, False, radius)
    raise PartialResult(
        "tail behaviour of h is unknown", partial=AreaReport(None, partial, None, False, radius), covered=radius
    )


def multitwist_matrices(lam: Scalar) -> Tuple[Mat2, Mat2]:
    """(h_λ, v_{−λ})"""
    lam = exact(lam)
    if sign(lam) <= 0:
        raise DomainError("λ must be positive")
    return Mat2.h(lam), Mat2.v(-lam)


@dataclass
class SpectralBounds:
    lower: float
    upper: int
    min_degree: int
    max_degree: int


def spectral_bounds(g: RibbonGraph, radius: int = 10) -> SpectralBounds:
    """度数给出的粗估 2√(d̲−1) ≤ λ₀ ≤ d̄，只作诊断"""
    vs = g.vertices() if g.is_finite else g.ball(radius)
    degrees = [g.degree(v) for v in vs]
    lo, hi = min(degrees), max(degrees)
    return SpectralBounds(2 * math.sqrt(max(lo - 1, 0)), hi, lo, hi)


# ============================================================
# 面包师曲面的仿射规范化
# ============================================================


@dataclass
class BakerNormalizer:
    """A = diag(β, 1/β)·S，S = [[1, 1/(1−α)], [0, 1]]·[[1, 0], [α, 1]]

    β = ⁴√(α(1−α)²) 只以 β² = (1−α)√α 出现；水平模数乘以 1/β²，竖直模数乘以 β²。
    """

    q: int
    alpha: Fraction
    lam: Scalar
    shear: Mat2
    beta2: Scalar
    beta: float
    sheared_moduli: Dict[str, Scalar]
    moduli: Dict[str, Scalar]
    common_modulus: Scalar
    subdivisions: int

    def matrix(self) -> Tuple[float, float, float, float]:
        s = self.shear
        b = self.beta
        return (b * float(s.a), b * float(s.b), float(s.c) / b, float(s.d) / b)

    def conjugate(self, m: Mat2) -> Mat2:
        """A⁻¹·m·A，只用到 β²"""
        inner = Mat2(m.a, m.b / self.beta2, m.c * self.beta2, m.d)
        return self.shear.inverse() @ inner @ self.shear

    def veech_generators(self) -> List[Mat2]:
        h, v = multitwist_matrices(self.lam)
        return [self.conjugate(h), self.conjugate(v), -Mat2.identity()]


def _sheared_baker_moduli(alpha: Fraction, shear: Mat2, depth: int) -> Dict[str, Scalar]:
    """在剪切后的面包师曲面窗口里数出水平、竖直柱面的模数

    H₀ 是面积最大的水平柱面，其余水平柱面 H_j 与竖直柱面 V_k 各自应当同模数。
    """
    b = baker(alpha)
    window = baker_window(b, b.hints["core_depth"] + depth)
    image = apply_matrix(shear, b)
    horizontal = cylinders_in_direction(image, (1, 0), window=window)
    vertical = cylinders_in_direction(image, (0, 1), window=window)
    if len(horizontal) < 2 or not vertical:
        raise TruncationTooCoarse(f"baker window of depth {depth} holds too few complete cylinders")
    top = max(horizontal, key=lambda c: to_float(c.area))
    rest = {scalar_key(c.modulus): c.modulus for c in horizontal if c is not top}
    verticals = {scalar_key(c.modulus): c.modulus for c in vertical}
    if len(rest) != 1 or len(verticals) != 1:
        raise DomainError(
            f"sheared baker cylinders have unequal moduli: H {list(rest.values())}, V {list(verticals.values())}"
        )
    logger.debug("剪切后的 B_%s：%s 个水平柱面，%s 个竖直柱面", alpha, len(horizontal), len(vertical))
    return {"H0": top.modulus, "Hj": next(iter(rest.values())), "V": next(iter(verticals.values()))}


def baker_htv_normalizer(q: int, depth: int = BAKER_WINDOW_DEPTH) -> BakerNormalizer:
    """剪切后柱面的模数在窗口里实际算出，再与闭式 1−α、α(1−α)/(1+α)、1/((1+α)(1−α)) 核对"""
    if not isinstance(q, int) or q < 2:
        raise DomainError(f"q = {q} must be an integer ≥ 2")
    alpha = Fraction(1, q)
    shear = Mat2.h(1 / (1 - alpha)) @ Mat2.v(alpha)
    sqrt_alpha = sqrt_scalar(alpha)
    beta2 = (1 - alpha) * sqrt_alpha
    # 剪切后的柱面：底部 H₀，其余水平柱面 H_j，竖直柱面 V_k
    sheared = _sheared_baker_moduli(alpha, shear, depth)
    closed = {
        "H0": 1 - alpha,
        "Hj": alpha * (1 - alpha) / (1 + alpha),
        "V": 1 / ((1 + alpha) * (1 - alpha)),
    }
    for key, value in closed.items():
        if cmp(sheared[key], value) != 0:
            raise DomainError(f"sheared modulus {key} = {sheared[key]} disagrees with the closed form {value}")
    moduli = {
        "H0": sheared["H0"] / beta2,
        "Hj": sheared["Hj"] / beta2,
        "V": sheared["V"] * beta2,
    }
    # H₀ 等分成 q+1 个柱面后模数与其余一致
    subdivisions = q + 1
    moduli["H0_sub"] = moduli["H0"] / subdivisions
    common = moduli["Hj"]
    for key in ("V", "H0_sub"):
        if cmp(moduli[key], common) != 0:
            raise DomainError(f"normalized moduli disagree: {key} = {moduli[key]}, Hj = {common}")
    logger.info("B_(1/%s) 规范化后的公共模数 %s", q, common)
    return BakerNormalizer(
        q=q,
        alpha=alpha,
        lam=baker_lambda(q),
        shear=shear,
        beta2=beta2,
        beta=math.sqrt(float(beta2)),
        sheared_moduli=sheared,
        moduli=moduli,
        common_modulus=common,
        subdivisions=subdivisions,
    )
