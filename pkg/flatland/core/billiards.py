"""
有理多边形台球的展开与秩

展开：由各边方向的反射生成二面体群 D_N（2N 个元素），每个群元素给出多边形的一个副本，
副本 g 的第 i 条边与副本 g·r_i 的第 i 条边平移粘合。
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from flatland.core.builders import rational_rank
from flatland.core.errors import DomainError, ModeError, UnsupportedIrrational
from flatland.core.mat2 import Mat2
from flatland.core.plane import Vec, cross, dot, norm2
from flatland.core.scalar import QuadExt, Scalar, exact, sign
from flatland.core.surface import EdgeRef, FiniteSurface, Polygon, euler_genus

logger = logging.getLogger(__name__)

MAX_ANGLE_DENOMINATOR = 1000


def reflection(v: Vec) -> Mat2:
    """关于方向 v 所在直线的反射，矩阵元素是 v 坐标的有理函数"""
    a, b = v
    n = norm2(v)
    return Mat2((a * a - b * b) / n, 2 * a * b / n, 2 * a * b / n, (b * b - a * a) / n)


def _same(m1: Mat2, m2: Mat2) -> bool:
    return all(sign(x - y) == 0 for x, y in zip(m1.entries(), m2.entries()))


def _interior_angle(u: Vec, w: Vec) -> float:
    """从 u 逆时针转到 w 的角（浮点，仅用于猜分母）"""
    ang = math.atan2(float(cross(u, w)), float(dot(u, w)))
    return ang if ang > 0 else ang + 2 * math.pi


@dataclass
class BilliardPolygon:
    """台球桌：逆时针顶点；angles 为各内角除以 π，缺省时由顶点推出并精确验证"""

    vertices: Sequence[Vec]
    angles: Optional[List[Fraction]] = None
    polygon: Polygon = field(init=False)

    def __post_init__(self):
        self.polygon = Polygon(tuple(self.vertices))
        if sign(self.polygon.area()) <= 0:
            raise DomainError("billiard table must be given counterclockwise with positive area")
        if not self.polygon.is_simple():
            raise DomainError("billiard table must be a simple polygon")
        if self.angles is None:
            self.angles = [self._rational_angle(i) for i in range(self.polygon.n)]
        else:
            self.angles = [Fraction(a) for a in self.angles]
        if len(self.angles) != self.polygon.n:
            raise DomainError("one angle per vertex is required")
        if sum(self.angles) != self.polygon.n - 2:
            raise DomainError(f"angles sum to {sum(self.angles)}π, expected {self.polygon.n - 2}π")

    def _rational_angle(self, i: int) -> Fraction:
        poly = self.polygon
        u = poly.edge(i)
        w = tuple(-x for x in poly.edge(i - 1))
        guess = Fraction(_interior_angle(u, w) / math.pi).limit_denominator(MAX_ANGLE_DENOMINATOR)
        # 两次反射的乘积是转角 2θ 的旋转，θ = pπ/q 时其阶恰为 q
        rot = reflection(w) @ reflection(u)
        q = guess.denominator
        if guess <= 0 or not rot.power(q).is_identity() or any(
            rot.power(k).is_identity() for k in range(1, q) if q % k == 0
        ):
            raise UnsupportedIrrational(f"angle at vertex {i} is not a rational multiple of π")
        return guess

    @property
    def N(self) -> int:
        return math.lcm(*(a.denominator for a in self.angles))

    def genus_formula(self) -> Fraction:
        n = self.polygon.n
        return 1 + Fraction(self.N, 2) * (n - 2 - sum(Fraction(1, a.denominator) for a in self.angles))


@dataclass
class UnfoldingStats:
    N: int
    copies: int
    genus: int
    genus_formula: Fraction


def _reflection_group(gens: List[Mat2], limit: int) -> List[Mat2]:
    group = [Mat2.identity()]
    frontier = [Mat2.identity()]
    while frontier:
        nxt = []
        for g in frontier:
            for r in gens:
                h = g @ r
                if not any(_same(h, x) for x in group):
                    group.append(h)
                    nxt.append(h)
                    if len(group) > limit:
                        raise UnsupportedIrrational("reflection group is infinite: the table is not rational")
        frontier = nxt
    return group


def unfold_billiard(table: BilliardPolygon) -> Tuple[FiniteSurface, UnfoldingStats]:
    """Katok-Zemlyakov 展开：2N 个副本，返回曲面与统计量 {N, copies, genus}"""
    poly = table.polygon
    n = poly.n
    gens = [reflection(poly.edge(i)) for i in range(n)]
    group = _reflection_group(gens, 2 * table.N)
    if len(group) != 2 * table.N:
        raise DomainError(f"reflection group has {len(group)} elements, expected 2N = {2 * table.N}")

    def index_of(m: Mat2) -> int:
        for k, g in enumerate(group):
            if _same(g, m):
                return k
        raise DomainError("reflection group is not closed")

    polys: Dict[int, Polygon] = {}
    flips: Dict[int, bool] = {}
    for k, g in enumerate(group):
        flip = sign(g.det()) < 0
        flips[k] = flip
        if flip:
            polys[k] = Polygon(tuple(g.apply(poly.vertex(-j)) for j in range(n)))
        else:
            polys[k] = Polygon(tuple(g.apply(v) for v in poly.vertices))

    def local(k: int, i: int) -> int:
        return (-i - 1) % n if flips[k] else i

    pairs = []
    seen = set()
    for k, g in enumerate(group):
        for i in range(n):
            if (k, i) in seen:
                continue
            m = index_of(g @ gens[i])
            seen.add((k, i))
            seen.add((m, i))
            pairs.append((EdgeRef(k, local(k, i)), EdgeRef(m, local(m, i))))
    surface = FiniteSurface(polys, pairs, name=f"unfolding(N={table.N})")
    genus = euler_genus(surface)
    stats = UnfoldingStats(N=table.N, copies=len(group), genus=genus, genus_formula=table.genus_formula())
    if stats.genus_formula != genus:
        logger.warning("展开亏格 %s 与公式值 %s 不一致", genus, stats.genus_formula)
    logger.info("展开完成：N=%s，副本 %s，亏格 %s", table.N, len(group), genus)
    return surface, stats


def rank(angles: Sequence[Scalar]) -> int:
    """多边形的秩 ρ = dim_ℚ(Σ ℚλ_j) − 1，角度以 π 为单位"""
    D = None
    rows = []
    for a in angles:
        a = exact(a)
        if isinstance(a, float):
            raise ModeError("rank needs exact angles")
        if isinstance(a, QuadExt):
            if D is not None and D != a.D:
                raise ModeError(f"angles mix √{D} and √{a.D}")
            D = a.D
            rows.append((a.a, a.b))
        else:
            rows.append((Fraction(a), Fraction(0)))
    total = sum((r[0] for r in rows), Fraction(0)), sum((r[1] for r in rows), Fraction(0))
    if total != (len(rows) - 2, 0):
        raise DomainError(f"angles must sum to {len(rows) - 2}π")
    return rational_rank(rows) - 1
