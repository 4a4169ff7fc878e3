"""
周期风树模型：平面去掉以整点为中心的 a×b 矩形障碍，台球反射动力学与扩散指数估计

按单元格推进：每步要么撞上本格障碍（镜面反射，翻转对应分量的符号），要么走到相邻格。
多条轨道用 numpy 向量化同步推进；浮点模式。
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from flatland.core.errors import DomainError
from flatland.core.scalar import Scalar, cmp, exact, is_exact, sign, to_float

logger = logging.getLogger(__name__)

Obstacle = Callable[[np.ndarray, np.ndarray], np.ndarray]

_EPS = 1e-12


def _everywhere(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    return np.ones(np.shape(m), dtype=bool)


@dataclass
class WindtreeTable:
    """R_{m,n} = [m−a/2, m+a/2]×[n−b/2, n+b/2]；obstacle(m, n) 为假的格子没有障碍"""

    a: Scalar
    b: Scalar
    obstacle: Obstacle = field(default=_everywhere)

    def rectangle(self, m: int, n: int) -> Optional[Tuple[Scalar, Scalar, Scalar, Scalar]]:
        if not bool(self.obstacle(np.array([m]), np.array([n]))[0]):
            return None
        return (m - self.a / 2, m + self.a / 2, n - self.b / 2, n + self.b / 2)

    def nearest_obstacle(self, x: float, y: float) -> Optional[Tuple[Scalar, Scalar, Scalar, Scalar]]:
        return self.rectangle(int(round(x)), int(round(y)))

    def blocked(self, x: float, y: float) -> bool:
        r = self.nearest_obstacle(x, y)
        if r is None:
            return False
        return to_float(r[0]) <= x <= to_float(r[1]) and to_float(r[2]) <= y <= to_float(r[3])


def windtree_table(a: Scalar, b: Scalar, obstacle: Optional[Obstacle] = None) -> WindtreeTable:
    a, b = exact(a), exact(b)
    for name, v in (("a", a), ("b", b)):
        if sign(v) <= 0 or cmp(v, 1) >= 0:
            raise DomainError(f"{name} = {v} must lie in (0, 1)")
    return WindtreeTable(a, b, obstacle or _everywhere)


def in_E(a: Scalar, b: Scalar) -> bool:
    """(a, b) ∈ 𝓔：a = p/q 既约且 p、q 均为奇数，b 既约时分母为偶数"""
    if not (is_exact(a) and is_exact(b)):
        return False
    try:
        a, b = Fraction(a), Fraction(b)
    except TypeError:
        return False
    if not (0 < a < 1 and 0 < b < 1):
        return False
    return a.numerator % 2 == 1 and a.denominator % 2 == 1 and b.denominator % 2 == 0


# ============================================================
# 向量化推进
# ============================================================


@dataclass
class _State:
    m: np.ndarray
    n: np.ndarray
    u: np.ndarray
    v: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    t: np.ndarray


def _advance(table: WindtreeTable, s: _State, ha: float, hb: float) -> np.ndarray:
    """所有轨道推进一个事件；返回本步的时长"""
    with np.errstate(divide="ignore", invalid="ignore"):
        # 与本格障碍的交（slab 方法）
        tx1, tx2 = (-ha - s.u) / s.dx, (ha - s.u) / s.dx
        ty1, ty2 = (-hb - s.v) / s.dy, (hb - s.v) / s.dy
        txmin, txmax = np.minimum(tx1, tx2), np.maximum(tx1, tx2)
        tymin, tymax = np.minimum(ty1, ty2), np.maximum(ty1, ty2)
        t_in = np.maximum(txmin, tymin)
        t_out = np.minimum(txmax, tymax)
        present = table.obstacle(s.m, s.n)
        hit = present & (t_in < t_out) & (t_in > _EPS)
        # 离开本格
        cx = (np.sign(s.dx) * 0.5 - s.u) / s.dx
        cy = (np.sign(s.dy) * 0.5 - s.v) / s.dy
    cell = np.minimum(cx, cy)
    step = np.where(hit, t_in, cell)
    s.u = s.u + step * s.dx
    s.v = s.v + step * s.dy
    s.t = s.t + step

    vertical_face = hit & (txmin >= tymin)
    horizontal_face = hit & (tymin >= txmin)
    s.dx = np.where(vertical_face, -s.dx, s.dx)
    s.dy = np.where(horizontal_face, -s.dy, s.dy)

    leave_x = ~hit & (cx <= cy)
    leave_y = ~hit & (cy <= cx)
    sx = np.sign(s.u).astype(np.int64)
    sy = np.sign(s.v).astype(np.int64)
    s.m = np.where(leave_x, s.m + sx, s.m)
    s.u = np.where(leave_x, s.u - sx, s.u)
    s.n = np.where(leave_y, s.n + sy, s.n)
    s.v = np.where(leave_y, s.v - sy, s.v)
    return step


def _unit(direction) -> Tuple[float, float]:
    if isinstance(direction, (int, float, Fraction)) and not isinstance(direction, bool):
        theta = float(direction)
        return math.cos(theta), math.sin(theta)
    dx, dy = to_float(exact(direction[0])), to_float(exact(direction[1]))
    r = math.hypot(dx, dy)
    if r == 0:
        raise DomainError("direction must be nonzero")
    return dx / r, dy / r


def _generic(direction) -> bool:
    """有理斜率的方向不是一般方向；角度以浮点给出时无法判断，视为一般"""
    if isinstance(direction, (int, float, Fraction)) and not isinstance(direction, bool):
        return True
    return not (is_exact(direction[0]) and is_exact(direction[1]))


def _free_starts(table: WindtreeTable, k: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    ha, hb = to_float(table.a) / 2, to_float(table.b) / 2
    present = bool(table.obstacle(np.array([0]), np.array([0]))[0])
    us, vs = [], []
    while len(us) < k:
        u, v = rng.uniform(-0.5, 0.5, size=2)
        if present and abs(u) <= ha and abs(v) <= hb:
            continue
        us.append(u)
        vs.append(v)
    return np.array(us), np.array(vs)


@dataclass
class PathEvent:
    time: float
    point: Tuple[float, float]
    direction: Tuple[float, float]


def windtree_path(
    table: WindtreeTable,
    start: Sequence[float],
    direction,
    max_events: int = 100,
) -> List[PathEvent]:
    """单条轨道的事件序列（每次反射或跨格记录一次）"""
    dx, dy = _unit(direction)
    if abs(dx) < _EPS or abs(dy) < _EPS:
        raise DomainError("direction must not be axis-parallel")
    x, y = float(start[0]), float(start[1])
    if table.blocked(x, y):
        raise DomainError(f"start point ({x}, {y}) lies inside an obstacle")
    m, n = int(round(x)), int(round(y))
    s = _State(
        np.array([m]), np.array([n]), np.array([x - m]), np.array([y - n]),
        np.array([dx]), np.array([dy]), np.array([0.0]),
    )
    ha, hb = to_float(table.a) / 2, to_float(table.b) / 2
    events = []
    for _ in range(max_events):
        _advance(table, s, ha, hb)
        events.append(
            PathEvent(
                float(s.t[0]),
                (float(s.m[0] + s.u[0]), float(s.n[0] + s.v[0])),
                (float(s.dx[0]), float(s.dy[0])),
            )
        )
    return events


@dataclass
class DiffusionResult:
    slopes: List[float]
    median: float
    ci_low: float
    ci_high: float
    generic_direction: bool
    seed: int
    times: List[float]
    distances: List[List[float]]


def windtree_diffusion(
    a: Scalar,
    b: Scalar,
    direction: Union[float, Sequence[Scalar]],
    horizon: float = 1e6,
    n_orbits: int = 100,
    seed: int = 0,
    grid_points: int = 40,
    t_min: float = 10.0,
    bootstrap: int = 1000,
    obstacle: Optional[Obstacle] = None,
) -> DiffusionResult:
    """在几何时间网格上采样到起点的距离，逐轨道对 log d ~ log t 做最小二乘

    报告斜率的中位数和 bootstrap 95% 区间；这是有限时间的诊断量，不是极限值。
    """
    table = windtree_table(a, b, obstacle)
    dx, dy = _unit(direction)
    if abs(dx) < _EPS or abs(dy) < _EPS:
        raise DomainError("direction must not be axis-parallel")
    if horizon <= t_min:
        raise DomainError("horizon must exceed the first sampling time")
    generic = _generic(direction)
    if not generic:
        logger.warning("方向 %s 的斜率是有理数，不是一般方向", direction)
    rng = np.random.default_rng(seed)
    u0, v0 = _free_starts(table, n_orbits, rng)
    s = _State(
        np.zeros(n_orbits, dtype=np.int64),
        np.zeros(n_orbits, dtype=np.int64),
        u0.copy(),
        v0.copy(),
        np.full(n_orbits, dx),
        np.full(n_orbits, dy),
        np.zeros(n_orbits),
    )
    grid = np.geomspace(t_min, horizon, grid_points)
    dist = np.full((n_orbits, grid_points), np.nan)
    nxt = np.zeros(n_orbits, dtype=np.int64)
    ha, hb = to_float(table.a) / 2, to_float(table.b) / 2
    while np.any(nxt < grid_points):
        # 先记录落在当前位置与下一事件之间的网格时刻（步长远小于网格间距，沿当前方向线性插值）
        px, py, pdx, pdy, pt = s.m + s.u, s.n + s.v, s.dx.copy(), s.dy.copy(), s.t.copy()
        _advance(table, s, ha, hb)
        while True:
            idx = np.minimum(nxt, grid_points - 1)
            due = (nxt < grid_points) & (grid[idx] <= s.t)
            if not np.any(due):
                break
            rows = np.nonzero(due)[0]
            tau = grid[idx[rows]] - pt[rows]
            gx = px[rows] + tau * pdx[rows] - u0[rows]
            gy = py[rows] + tau * pdy[rows] - v0[rows]
            dist[rows, idx[rows]] = np.hypot(gx, gy)
            nxt[rows] += 1
    log_t = np.log(grid)
    slopes = []
    for row in dist:
        ok = row > 0
        if ok.sum() < 2:
            slopes.append(float("nan"))
            continue
        slopes.append(float(np.polyfit(log_t[ok], np.log(row[ok]), 1)[0]))
    arr = np.array(slopes)
    arr = arr[~np.isnan(arr)]
    median = float(np.median(arr))
    boots = [float(np.median(rng.choice(arr, size=arr.size, replace=True))) for _ in range(bootstrap)]
    lo, hi = np.percentile(boots, [2.5, 97.5]) if boots else (median, median)
    logger.info("风树扩散：%s 条轨道，T=%s，斜率中位数 %.4f [%.4f, %.4f]", n_orbits, horizon, median, lo, hi)
    return DiffusionResult(
        slopes=slopes,
        median=median,
        ci_low=float(lo),
        ci_high=float(hi),
        generic_direction=generic,
        seed=seed,
        times=grid.tolist(),
        distances=dist.tolist(),
    )
