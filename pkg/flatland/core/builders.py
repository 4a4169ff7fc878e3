"""
曲面族构造器

方格曲面（origami）、λ-阶梯、面包师曲面、ℤᵈ 覆叠、广义阶梯与台阶曲面。
惰性曲面的提供函数都是纯函数，可以并发查询。
"""

import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from flatland.core.errors import DisconnectedCover, DomainError, NotFinite
from flatland.core.scalar import QuadExt, Scalar, cmp, exact, floor_scalar, sign, solve_char_quadratic
from flatland.core.surface import EdgeRef, FiniteSurface, LazySurface, Polygon, Surface

logger = logging.getLogger(__name__)

IndexMap = Union[Mapping[Hashable, Hashable], Sequence[Hashable], Callable[[Hashable], Hashable]]

# 矩形的边序号：0 下、1 右、2 上、3 左
BOTTOM, RIGHT, TOP, LEFT = 0, 1, 2, 3


def rectangle(w: Scalar, h: Scalar) -> Polygon:
    return Polygon(((0, 0), (w, 0), (w, h), (0, h)))


def _as_callable(m: IndexMap) -> Callable[[Hashable], Hashable]:
    if callable(m):
        return m
    if isinstance(m, Mapping):
        return lambda i: m[i]
    seq = list(m)
    return lambda i: seq[i]


def rectangle_surface(
    size: Callable[[Hashable], Tuple[Scalar, Scalar]],
    right: IndexMap,
    up: IndexMap,
    indices: Optional[Sequence[Hashable]] = None,
    right_inv: Optional[Callable[[Hashable], Hashable]] = None,
    up_inv: Optional[Callable[[Hashable], Hashable]] = None,
    seed: Hashable = 0,
    name: Optional[str] = None,
    area: Optional[Scalar] = None,
    hints: Optional[dict] = None,
) -> Surface:
    """矩形族：R_i 的右边贴 R_{right(i)} 的左边，上边贴 R_{up(i)} 的下边

    indices 给出时物化为有限曲面，否则按 right/up 及其逆惰性提供。
    """
    r, u = _as_callable(right), _as_callable(up)
    if indices is not None:
        idxs = list(indices)
        polys = {i: rectangle(*size(i)) for i in idxs}
        pairs = []
        for i in idxs:
            pairs.append((EdgeRef(i, RIGHT), EdgeRef(r(i), LEFT)))
            pairs.append((EdgeRef(i, TOP), EdgeRef(u(i), BOTTOM)))
        return FiniteSurface(polys, pairs, name=name)

    r_inv = right_inv or r
    u_inv = up_inv or u

    def polygon_at(i):
        w, h = size(i)
        if sign(w) <= 0 or sign(h) <= 0:
            raise DomainError(f"rectangle {i!r} has non-positive side ({w}, {h})")
        return rectangle(w, h)

    def pair(e: EdgeRef) -> EdgeRef:
        i = e.poly
        if e.edge == RIGHT:
            return EdgeRef(r(i), LEFT)
        if e.edge == TOP:
            return EdgeRef(u(i), BOTTOM)
        if e.edge == LEFT:
            j = r_inv(i)
            if r(j) != i:
                raise DomainError(f"right gluing is not invertible at {i!r}")
            return EdgeRef(j, RIGHT)
        j = u_inv(i)
        if u(j) != i:
            raise DomainError(f"up gluing is not invertible at {i!r}")
        return EdgeRef(j, TOP)

    return LazySurface(polygon_at, pair, EdgeRef(seed, 0), name=name, area=area, hints=hints)


# ============================================================
# 方格曲面
# ============================================================


@dataclass
class OrigamiData:
    """方格曲面数据；indices 为 None 时视为 ℤ 上的惰性族"""

    r: IndexMap
    u: IndexMap
    indices: Optional[Sequence[Hashable]] = None
    r_inv: Optional[Callable[[Hashable], Hashable]] = None
    u_inv: Optional[Callable[[Hashable], Hashable]] = None
    seed: Hashable = 0


def _check_permutation(name: str, f: Callable, idxs: List[Hashable]) -> None:
    try:
        image = [f(i) for i in idxs]
    except (KeyError, IndexError):
        raise DomainError(f"{name} is not defined on every square") from None
    if sorted(map(repr, image)) != sorted(map(repr, idxs)):
        raise DomainError(f"{name} is not a bijection of the index set")


def _transitive(idxs: List[Hashable], maps: Sequence[Callable]) -> bool:
    seen = {idxs[0]}
    stack = [idxs[0]]
    inverse = {}
    for f in maps:
        for i in idxs:
            inverse.setdefault(f(i), []).append(i)
    while stack:
        i = stack.pop()
        for j in [f(i) for f in maps] + inverse.get(i, []):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(idxs)


def square_tiled(data: OrigamiData, name: Optional[str] = None) -> Surface:
    """每个下标一个单位正方形；右边贴 r(i) 的左边，上边贴 u(i) 的下边"""
    r, u = _as_callable(data.r), _as_callable(data.u)
    if data.indices is None:
        return rectangle_surface(
            lambda i: (1, 1), r, u, right_inv=data.r_inv, up_inv=data.u_inv, seed=data.seed, name=name or "origami"
        )
    idxs = list(data.indices)
    if not idxs:
        raise DomainError("an origami needs at least one square")
    _check_permutation("r", r, idxs)
    _check_permutation("u", u, idxs)
    if not _transitive(idxs, (r, u)):
        raise DomainError("r and u do not act transitively: the surface is disconnected")
    return rectangle_surface(lambda i: (1, 1), r, u, indices=idxs, name=name or "origami")


def torus() -> FiniteSurface:
    return square_tiled(OrigamiData(r=[0], u=[0], indices=[0]), name="torus")


def l_shape() -> FiniteSurface:
    """三个正方形拼成的 L 形，亏格 2，唯一的 6π 锥点"""
    return square_tiled(OrigamiData(r={0: 1, 1: 0, 2: 2}, u={0: 2, 1: 1, 2: 0}, indices=[0, 1, 2]), name="L")


_Q8 = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]
_UNIT_PRODUCT = {
    ("i", "j"): (1, "k"),
    ("j", "k"): (1, "i"),
    ("k", "i"): (1, "j"),
    ("j", "i"): (-1, "k"),
    ("k", "j"): (-1, "i"),
    ("i", "k"): (-1, "j"),
}


def _q8_mul(x: str, y: str) -> str:
    sx, ux = (-1, x[1:]) if x.startswith("-") else (1, x)
    sy, uy = (-1, y[1:]) if y.startswith("-") else (1, y)
    s = sx * sy
    if ux == "1":
        u = uy
    elif uy == "1":
        u = ux
    elif ux == uy:
        s, u = -s, "1"
    else:
        t, u = _UNIT_PRODUCT[(ux, uy)]
        s *= t
    return u if s > 0 else "-" + u


def eierlegende() -> FiniteSurface:
    """四元数群 Q8 上的 8 格方格曲面：r(g) = g·i，u(g) = g·j；亏格 3，四个 4π 锥点"""
    return square_tiled(
        OrigamiData(r={g: _q8_mul(g, "i") for g in _Q8}, u={g: _q8_mul(g, "j") for g in _Q8}, indices=list(_Q8)),
        name="eierlegende",
    )


def _staircase_r(n: int) -> int:
    return n - 1 if n % 2 == 0 else n + 1


def _staircase_u(n: int) -> int:
    return n + 1 if n % 2 == 0 else n - 1


def staircase_origami() -> OrigamiData:
    """无穷阶梯的 ℤ 下标数据：第 2m 格位于 (m,m)，第 2m+1 格位于 (m,m+1)"""
    return OrigamiData(r=_staircase_r, u=_staircase_u, r_inv=_staircase_r, u_inv=_staircase_u, seed=0)


# ============================================================
# 多边形例子
# ============================================================


def octagon() -> FiniteSurface:
    """边心距为 1 的正八边形，对边平移粘合；亏格 2"""
    c = QuadExt.make(-1, 1, 2)  # √2 − 1
    verts = [(1, -c), (1, c), (c, 1), (-c, 1), (-1, c), (-1, -c), (-c, -1), (c, -1)]
    pairs = [((0, i), (0, i + 4)) for i in range(4)]
    return FiniteSurface([Polygon(tuple(verts))], pairs, name="octagon")


def _hexagon(h: Scalar) -> Polygon:
    """[0,2]×[0,h]，上下边在中点处多一个顶点；边 0/1 下左/下右，2 右，3/4 上右/上左，5 左"""
    return Polygon(((0, 0), (1, 0), (2, 0), (2, h), (1, h), (0, h)))


def two_square_torus() -> FiniteSurface:
    """两个单位正方形组成的 2×1 环面；边对 A=(上左, 下右)、B=(上右, 下左)、C=(右, 左)"""
    pairs = [((0, 4), (0, 1)), ((0, 3), (0, 0)), ((0, 2), (0, 5))]
    return FiniteSurface([_hexagon(1)], pairs, name="two-square torus", pair_labels=["A", "B", "C"])


# ============================================================
# λ-阶梯
# ============================================================


def staircase_heights(lam: Scalar, h0: Scalar = 1, A: Scalar = 1, B: Scalar = 0) -> Callable[[int], Scalar]:
    """h_{n−1} + h_{n+1} = λ h_n 的解：λ>2 时 h0(A r₊ⁿ + B r₋ⁿ)，λ=2 时 h0(A + B n)"""
    lam, h0, A, B = exact(lam), exact(h0), exact(A), exact(B)
    r_plus, r_minus = solve_char_quadratic(lam)
    if cmp(lam, 2) == 0:
        return lambda n: h0 * (A + B * n)
    return lambda n: h0 * (A * r_plus**n + B * r_minus**n)


def staircase(lam: Scalar, h0: Scalar = 1, A: Scalar = 1, B: Scalar = 0) -> LazySurface:
    """λ-阶梯：矩形 R_n 对应 ℤ 图的边 {n, n+1}，宽取 J 端点、高取 I 端点（偶数端点为 I）"""
    if sign(exact(h0)) <= 0:
        raise DomainError(f"h0 = {h0} must be positive")
    h = staircase_heights(lam, h0, A, B)

    def size(n: int) -> Tuple[Scalar, Scalar]:
        if n % 2 == 0:
            return h(n + 1), h(n)
        return h(n), h(n + 1)

    surface = rectangle_surface(
        size,
        _staircase_r,
        _staircase_u,
        right_inv=_staircase_r,
        up_inv=_staircase_u,
        name=f"staircase(λ={lam})",
        hints={"kind": "staircase", "lambda": exact(lam), "area": "infinite"},
    )
    return surface


# ============================================================
# 面包师曲面
# ============================================================


def _baker_core_depth(alpha: Scalar) -> int:
    """最小的 N ≥ 1 使 αᴺ < 1/2，保证两个角上的嵌套方块互不相交"""
    n = 1
    while cmp(alpha**n, Fraction(1, 2)) >= 0:
        n += 1
    return n


def baker(alpha: Scalar) -> LazySurface:
    """面包师曲面 B_α

    边长 s = α/(1−α) 的正方形，上下边分成长 α^{i+1} 的段 A_i，左右边分成 B_i。
    顶边的分点累积于右上角，底边的累积于左下角。图册由中心多边形 ("core", 0)
    和向两个累积角收缩的 L 形六边形 ("b", n)、("d", n)（n ≥ N）组成，
    每块都只有有限个顶点。
    """
    alpha = exact(alpha)
    if sign(alpha) <= 0 or cmp(alpha, 1) >= 0:
        raise DomainError(f"baker parameter α = {alpha} must lie in (0, 1)")
    s = alpha / (1 - alpha)
    N = _baker_core_depth(alpha)

    def t(i: int) -> Scalar:
        return alpha ** (i + 1) / (1 - alpha)

    core_verts = [(t(N - k), 0) for k in range(N + 1)]
    core_verts += [(s, s - t(j)) for j in range(1, N + 1)]
    core_verts += [(s - t(N), s - t(N)), (s - t(N), s)]
    core_verts += [(s - t(N - m), s) for m in range(1, N + 1)]
    core_verts += [(0, t(j)) for j in range(1, N + 1)]
    core_verts += [(t(N), t(N))]
    core = Polygon(tuple(core_verts))
    CORE = ("core", 0)

    def top(i: int) -> EdgeRef:
        return EdgeRef(CORE, 3 * N + 1 - i) if i < N else EdgeRef(("b", i), 4)

    def bottom(i: int) -> EdgeRef:
        return EdgeRef(CORE, N - 1 - i) if i < N else EdgeRef(("d", i), 4)

    def right(i: int) -> EdgeRef:
        return EdgeRef(CORE, N + i) if i < N else EdgeRef(("b", i), 1)

    def left(i: int) -> EdgeRef:
        return EdgeRef(CORE, 3 * N + 2 + i) if i < N else EdgeRef(("d", i), 1)

    def polygon_at(idx) -> Polygon:
        kind, n = idx
        if kind == "core":
            return core
        if n < N:
            raise DomainError(f"baker piece {idx!r} does not exist (pieces start at depth {N})")
        a, b = t(n), t(n + 1)
        if kind == "b":
            return Polygon(((s - a, s - a), (s, s - a), (s, s - b), (s - b, s - b), (s - b, s), (s - a, s)))
        if kind == "d":
            return Polygon(((a, a), (0, a), (0, b), (b, b), (b, 0), (a, 0)))
        raise DomainError(f"unknown baker piece {idx!r}")

    def pair(e: EdgeRef) -> EdgeRef:
        (kind, n), k = e.poly, e.edge
        if kind == "core":
            if k < N:
                return top(N - 1 - k)
            if k < 2 * N:
                return left(k - N)
            if k == 2 * N:
                return EdgeRef(("b", N), 0)
            if k == 2 * N + 1:
                return EdgeRef(("b", N), 5)
            if k <= 3 * N + 1:
                return bottom(3 * N + 1 - k)
            if k <= 4 * N + 1:
                return right(k - 3 * N - 2)
            return EdgeRef(("d", N), 0 if k == 4 * N + 2 else 5)
        parent_a = (EdgeRef(CORE, 2 * N), EdgeRef(CORE, 2 * N + 1)) if kind == "b" else (
            EdgeRef(CORE, 4 * N + 2),
            EdgeRef(CORE, 4 * N + 3),
        )
        if k == 0:
            return parent_a[0] if n == N else EdgeRef((kind, n - 1), 2)
        if k == 5:
            return parent_a[1] if n == N else EdgeRef((kind, n - 1), 3)
        if k == 2:
            return EdgeRef((kind, n + 1), 0)
        if k == 3:
            return EdgeRef((kind, n + 1), 5)
        if kind == "b":
            return left(n) if k == 1 else bottom(n)
        return right(n) if k == 1 else top(n)

    return LazySurface(
        polygon_at,
        pair,
        EdgeRef(CORE, 0),
        name=f"baker(α={alpha})",
        default_window=1 + 2 * 8,
        area=s * s,
        hints={"kind": "baker", "alpha": alpha, "side": s, "core_depth": N},
    )


def baker_top_side(surface: LazySurface, segments: int) -> List[EdgeRef]:
    """面包师曲面顶边上从左到右的前 segments 段 A_0, A_1, …（逆时针方向为从右到左）"""
    if surface.hints.get("kind") != "baker":
        raise DomainError("baker_top_side needs a surface built by baker()")
    N = surface.hints["core_depth"]
    out = []
    for i in range(segments):
        out.append(EdgeRef(("core", 0), 3 * N + 1 - i) if i < N else EdgeRef(("b", i), 4))
    return out


def baker_window(surface: LazySurface, depth: int) -> List[Hashable]:
    """中心多边形加上深度小于 depth 的全部 L 形块"""
    N = surface.hints["core_depth"]
    idxs: List[Hashable] = [("core", 0)]
    for n in range(N, max(N, depth)):
        idxs += [("b", n), ("d", n)]
    return idxs


# ============================================================
# ℤᵈ 覆叠
# ============================================================


@dataclass
class Cocycle:
    """每个边对 γ_i 的取值 φ(γ_i) ∈ ℤᵈ；可按边对序号或标签给出"""

    values: Union[Sequence, Mapping[str, Sequence]]
    d: Optional[int] = None

    def vectors(self, base: FiniteSurface) -> List[Tuple[int, ...]]:
        if isinstance(self.values, Mapping):
            if not base.pair_labels:
                raise DomainError("labelled cocycle needs a base surface with pair labels")
            raw = [self.values[label] for label in base.pair_labels]
        else:
            raw = list(self.values)
        if len(raw) != len(base.pairs):
            raise DomainError(f"cocycle has {len(raw)} values for {len(base.pairs)} edge pairs")
        vecs = [tuple(int(x) for x in v) if isinstance(v, (list, tuple)) else (int(v),) for v in raw]
        dims = {len(v) for v in vecs}
        if len(dims) != 1:
            raise DomainError("cocycle values have different lengths")
        d = dims.pop()
        if self.d is not None and self.d != d:
            raise DomainError(f"cocycle declared rank {self.d} but values live in ℤ^{d}")
        if d < 1:
            raise DomainError("cocycle rank must be at least 1")
        return vecs


def rational_rank(vectors: Sequence[Sequence[int]]) -> int:
    """有理高斯消元求秩"""
    rows = [[Fraction(x) for x in v] for v in vectors if any(v)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def zd_cover(base: FiniteSurface, cocycle: Cocycle) -> LazySurface:
    """下标 (多边形, v ∈ ℤᵈ)；第 i 个边对的首边在片 v 上贴到片 v + φ(γ_i) 的次边"""
    if not isinstance(base, FiniteSurface) or base.allow_boundary:
        raise NotFinite("zd_cover needs a finite closed base surface")
    vecs = cocycle.vectors(base)
    d = len(vecs[0])
    rank = rational_rank(vecs)
    connected = rank == d
    if not connected:
        msg = f"cocycle values span rank {rank} < {d}: the cover is disconnected"
        logger.warning(msg)
        warnings.warn(msg, DisconnectedCover, stacklevel=2)

    shift: Dict[EdgeRef, Tuple[EdgeRef, Tuple[int, ...]]] = {}
    for (a, b), v in zip(base.pairs, vecs):
        shift[a] = (b, v)
        shift[b] = (a, tuple(-x for x in v))

    def polygon_at(idx):
        poly, _ = idx
        return base.polygon(poly)

    def pair(e: EdgeRef) -> EdgeRef:
        poly, sheet = e.poly
        other, v = shift[EdgeRef(poly, e.edge)]
        return EdgeRef((other.poly, tuple(x + y for x, y in zip(sheet, v))), other.edge)

    first = base.indices()[0]
    return LazySurface(
        polygon_at,
        pair,
        EdgeRef((first, (0,) * d), 0),
        name=f"ℤ^{d}-cover of {base.name or 'surface'}",
        hints={"kind": "zd_cover", "rank": rank, "d": d, "connected": connected},
    )


# ============================================================
# 广义阶梯与台阶曲面
# ============================================================


def _height_function(h) -> Callable[[int], Scalar]:
    if callable(h):
        return lambda n: exact(h(n))
    if isinstance(h, Mapping):
        return lambda n: exact(h[n])
    raise DomainError("heights must be a callable or a mapping indexed by integers")


def malaga_staircase(h) -> LazySurface:
    """广义阶梯 M_h：R_n = [0,2]×[0,h_n]，左右自粘；上左半边贴 R_{n−1} 的下右半边，上右半边贴 R_{n+1} 的下左半边"""
    height = _height_function(h)

    def polygon_at(n: int) -> Polygon:
        hn = height(n)
        if sign(hn) <= 0:
            raise DomainError(f"height h_{n} = {hn} must be positive")
        return _hexagon(hn)

    glue = {0: (-1, 3), 3: (1, 0), 1: (1, 4), 4: (-1, 1), 2: (0, 5), 5: (0, 2)}

    def pair(e: EdgeRef) -> EdgeRef:
        dn, k = glue[e.edge]
        return EdgeRef(e.poly + dn, k)

    return LazySurface(polygon_at, pair, EdgeRef(0, 0), name="generalized staircase", hints={"kind": "malaga"})


def _step_polygon(n: int, hn: Scalar, hnext: Scalar, sx: int, sy: int) -> Polygon:
    base = [(n - 1, 0), (n, 0), (n, hnext), (n, hn), (n - 1, hn)]
    pts = [(sx * x, sy * y) for x, y in base]
    if sx * sy < 0:
        pts = [pts[(-k) % 5] for k in range(5)]
    return Polygon(tuple(pts))


# 第 n 列五边形的边角色：0 轴边、1 外侧下段、2 竖台阶、3 横台阶、4 内侧边
_AXIS, _OUTER_LOW, _RISER, _TREAD, _INNER = range(5)


def _step_edge(role: int, flip: bool) -> int:
    return (-role - 1) % 5 if flip else role


def step_surface(h=None, ratio: Optional[Scalar] = None, check_terms: int = 8) -> LazySurface:
    """台阶台球 P = ∪[n−1,n]×[0,h_n] 的展开：四个反射副本 P、σxP、σyσxP、σyP

    h 可为 n ↦ h_n（n ≥ 1）或序列；只给 ratio 时 h_n = ratioⁿ，此时面积 4Σh_n 精确可得。
    """
    if h is None:
        if ratio is None:
            raise DomainError("step_surface needs heights or a geometric ratio")
        r = exact(ratio)
        height = lambda n: r**n  # noqa: E731
    elif isinstance(h, (list, tuple)):
        seq = [exact(x) for x in h]

        def height(n: int) -> Scalar:
            if not 1 <= n <= len(seq):
                raise DomainError(f"step height h_{n} is beyond the given sequence")
            return seq[n - 1]

        check_terms = min(check_terms, len(seq))
    else:
        height = _height_function(h)
    prev = None
    for n in range(1, check_terms + 1):
        hn = height(n)
        if sign(hn) <= 0:
            raise DomainError(f"step height h_{n} = {hn} must be positive")
        if prev is not None and cmp(hn, prev) >= 0:
            raise DomainError("step heights must decrease strictly to 0")
        prev = hn

    area = None
    if h is None:
        r = exact(ratio)
        if sign(r) <= 0 or cmp(r, 1) >= 0:
            raise DomainError(f"ratio {ratio} must lie in (0, 1)")
        area = 4 * r / (1 - r)

    def polygon_at(idx):
        sx, sy, n = idx
        if n < 1:
            raise DomainError(f"step column {n} does not exist")
        return _step_polygon(n, height(n), height(n + 1), sx, sy)

    def pair(e: EdgeRef) -> EdgeRef:
        sx, sy, n = e.poly
        flip = sx * sy < 0
        role = _step_edge(e.edge, flip)
        if role == _AXIS:
            target, trole = (sx, -sy, n), _AXIS
        elif role == _TREAD:
            target, trole = (sx, -sy, n), _TREAD
        elif role == _RISER:
            target, trole = (-sx, sy, n), _RISER
        elif role == _OUTER_LOW:
            target, trole = (sx, sy, n + 1), _INNER
        elif n == 1:
            target, trole = (-sx, sy, 1), _INNER
        else:
            target, trole = (sx, sy, n - 1), _OUTER_LOW
        return EdgeRef(target, _step_edge(trole, target[0] * target[1] < 0))

    return LazySurface(
        polygon_at,
        pair,
        EdgeRef((1, 1, 1), 0),
        name="step surface",
        area=area,
        hints={"kind": "step", "ratio": None if ratio is None else exact(ratio)},
    )


def step_billiard_lengths(
    ratio: Scalar, direction: Tuple[Scalar, Scalar], levels: int
) -> Tuple[List[Tuple[str, Scalar]], Scalar]:
    """台阶曲面（h_n = ratioⁿ）在方向 θ 上首次返回映射的子区间长度，以及 i ≥ levels 部分的总长

    λ_{A_i} = λ_{D_i} = h_i − h_{i+1}（i ≥ 1），λ_{B_{±i}} = α_i，λ_{C_{±i}} = 2h_{i+1} − α_i，
    其中 α_i = cot θ mod 2h_{i+1}；α_i = 0 时 B 段退化不计。
    """
    r = exact(ratio)
    if sign(r) <= 0 or cmp(r, 1) >= 0:
        raise DomainError(f"ratio {ratio} must lie in (0, 1)")
    if levels < 1:
        raise DomainError("levels must be at least 1")
    dx, dy = exact(direction[0]), exact(direction[1])
    if sign(dx) <= 0 or sign(dy) <= 0:
        raise DomainError("direction must lie strictly inside the first quadrant")
    cot = dx / dy

    def h(n: int) -> Scalar:
        return r**n

    out: List[Tuple[str, Scalar]] = []
    for i in range(levels):
        period = 2 * h(i + 1)
        a = cot - floor_scalar(cot / period) * period
        if i >= 1:
            out.append((f"A{i}", h(i) - h(i + 1)))
            out.append((f"D{i}", h(i) - h(i + 1)))
        sides = [""] if i == 0 else ["", "-"]
        for side in sides:
            if sign(a) > 0:
                out.append((f"B{side}{i}", a))
            out.append((f"C{side}{i}", period - a))
    # A、D 的余项望远镜求和为 2h_L，B、C 两侧合计 4Σ_{i≥L} h_{i+1}
    tail = 2 * h(levels) + 4 * h(levels + 1) / (1 - r)
    return out, tail
