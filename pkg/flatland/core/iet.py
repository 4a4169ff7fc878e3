"""
构造性区间交换变换（可以是无穷字母表、部分定义）

一个 IET 由若干分量 Piece 组成：顶部区间 (top, top+length) 平移到底部区间 (bottom, bottom+length)。
无穷字母表只物化前 N 个字母，剩余的累积区域记为 unresolved：在那里求值抛 TruncationTooCoarse，
而不是悄悄截断。分割点与定义域空隙处求值抛 Undefined（分量取开区间）。
"""

import bisect
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from flatland.core.enums import OrbitStatus
from flatland.core.errors import DomainError, ModeError, TruncationTooCoarse, Undefined
from flatland.core.scalar import QuadExt, Scalar, cmp, exact, is_exact, sign, to_float

logger = logging.getLogger(__name__)

Interval = Tuple[Scalar, Scalar]


@dataclass(frozen=True)
class Piece:
    label: Hashable
    top: Scalar
    length: Scalar
    bottom: Scalar
    time: Optional[Scalar] = None
    time_slope: Scalar = 0

    def time_at(self, x: Scalar) -> Optional[Scalar]:
        """x 处的返回时间；time 是 top 端的值，沿分量仿射变化"""
        if self.time is None:
            return None
        return self.time + self.time_slope * (x - self.top)

    @property
    def shift(self) -> Scalar:
        return self.bottom - self.top

    @property
    def top_end(self) -> Scalar:
        return self.top + self.length

    @property
    def bottom_end(self) -> Scalar:
        return self.bottom + self.length


def _inside_open(x: Scalar, lo: Scalar, hi: Scalar) -> bool:
    return cmp(x, lo) > 0 and cmp(x, hi) < 0


def _inside_closed(x: Scalar, lo: Scalar, hi: Scalar) -> bool:
    return cmp(x, lo) >= 0 and cmp(x, hi) <= 0


class IET:
    """部分区间交换变换 f: D → R ⊂ (0, total)"""

    def __init__(
        self,
        pieces: Iterable[Piece],
        total: Optional[Scalar] = None,
        unresolved_top: Sequence[Interval] = (),
        unresolved_bottom: Sequence[Interval] = (),
        name: Optional[str] = None,
        tail: Optional[Callable[[int], Scalar]] = None,
    ):
        self.pieces: List[Piece] = sorted(pieces, key=lambda p: to_float(p.top))
        for p in self.pieces:
            if sign(p.length) <= 0:
                raise DomainError(f"piece {p.label!r} has non-positive length {p.length}")
        if total is None:
            ends = [p.top_end for p in self.pieces] + [p.bottom_end for p in self.pieces]
            ends += [hi for _, hi in unresolved_top] + [hi for _, hi in unresolved_bottom]
            total = max(ends, key=to_float) if ends else Fraction(0)
        self.total = exact(total)
        self.unresolved_top = [tuple(map(exact, u)) for u in unresolved_top]
        self.unresolved_bottom = [tuple(map(exact, u)) for u in unresolved_bottom]
        self.name = name
        self.tail = tail
        self._by_bottom = sorted(self.pieces, key=lambda p: to_float(p.bottom))
        self._check_disjoint(self.pieces, "top", lambda p: (p.top, p.top_end))
        self._check_disjoint(self._by_bottom, "bottom", lambda p: (p.bottom, p.bottom_end))
        self._top_keys = [to_float(p.top) for p in self.pieces]
        self._bottom_keys = [to_float(p.bottom) for p in self._by_bottom]

    def _check_disjoint(self, ordered: List[Piece], side: str, span) -> None:
        prev_hi = None
        for p in ordered:
            lo, hi = span(p)
            if cmp(lo, 0) < 0 or cmp(hi, self.total) > 0:
                raise DomainError(f"{side} interval of {p.label!r} leaves (0, {self.total})")
            if prev_hi is not None and cmp(lo, prev_hi) < 0:
                raise DomainError(f"{side} intervals overlap at {p.label!r}")
            prev_hi = hi

    # ------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------
    @classmethod
    def from_orders(
        cls,
        top_order: Sequence[Hashable],
        bottom_order: Sequence[Hashable],
        lengths: Dict[Hashable, Scalar],
        name: Optional[str] = None,
    ) -> "IET":
        """字母表 + 两个全序 + 长度；α_i^top = Σ_{j <_top i} λ_j"""
        if sorted(map(repr, top_order)) != sorted(map(repr, bottom_order)):
            raise DomainError("top and bottom orders must list the same letters")
        if len(set(top_order)) != len(top_order):
            raise DomainError("a letter appears twice in the top order")
        top_pos: Dict[Hashable, Scalar] = {}
        acc: Scalar = Fraction(0)
        for a in top_order:
            top_pos[a] = acc
            acc = acc + exact(lengths[a])
        bot_pos: Dict[Hashable, Scalar] = {}
        acc2: Scalar = Fraction(0)
        for a in bottom_order:
            bot_pos[a] = acc2
            acc2 = acc2 + exact(lengths[a])
        pieces = [Piece(a, top_pos[a], exact(lengths[a]), bot_pos[a]) for a in top_order]
        return cls(pieces, total=acc, name=name)

    # ------------------------------------------------------------
    # 查询
    # ------------------------------------------------------------
    @property
    def labels(self) -> List[Hashable]:
        return [p.label for p in self.pieces]

    def top_order(self) -> List[Hashable]:
        return [p.label for p in self.pieces]

    def bottom_order(self) -> List[Hashable]:
        return [p.label for p in self._by_bottom]

    def lengths(self) -> Dict[Hashable, Scalar]:
        return {p.label: p.length for p in self.pieces}

    def piece(self, label: Hashable) -> Piece:
        for p in self.pieces:
            if p.label == label:
                return p
        raise KeyError(label)

    def domain_measure(self) -> Scalar:
        total: Scalar = Fraction(0)
        for p in self.pieces:
            total = total + p.length
        return total

    def undefined_measure(self) -> Scalar:
        return self.total - self.domain_measure()

    @property
    def is_exact(self) -> bool:
        return all(is_exact(p.top) and is_exact(p.length) and is_exact(p.bottom) for p in self.pieces)

    def forward_singularities(self) -> List[Scalar]:
        """f 的奇点：顶部分量的内部端点"""
        return self._endpoints((p.top, p.top_end) for p in self.pieces)

    def backward_singularities(self) -> List[Scalar]:
        """f⁻¹ 的奇点：底部分量的内部端点"""
        return self._endpoints((p.bottom, p.bottom_end) for p in self._by_bottom)

    def _endpoints(self, spans) -> List[Scalar]:
        out: List[Scalar] = []
        seen = set()
        for lo, hi in spans:
            for x in (lo, hi):
                if sign(x) == 0 or cmp(x, self.total) == 0:
                    continue
                key = x if is_exact(x) else round(x, 12)
                if key not in seen:
                    seen.add(key)
                    out.append(x)
        return sorted(out, key=to_float)

    def _locate(self, x: Scalar, ordered: List[Piece], keys: List[float], lo_of, hi_of, unresolved) -> Piece:
        for a, b in unresolved:
            if _inside_closed(x, a, b):
                raise TruncationTooCoarse(f"x = {x} lies in the unresolved region ({a}, {b})")
        i = bisect.bisect_right(keys, to_float(x)) - 1
        for j in (i - 1, i, i + 1):
            if 0 <= j < len(ordered):
                p = ordered[j]
                if _inside_open(x, lo_of(p), hi_of(p)):
                    return p
                if cmp(x, lo_of(p)) == 0 or cmp(x, hi_of(p)) == 0:
                    raise Undefined(f"x = {x} is a singularity (endpoint of {p.label!r})")
        raise Undefined(f"x = {x} is outside the domain")

    def piece_at(self, x: Scalar) -> Piece:
        return self._locate(
            x, self.pieces, self._top_keys, lambda p: p.top, lambda p: p.top_end, self.unresolved_top
        )

    def __call__(self, x: Scalar) -> Scalar:
        return self.eval(x)

    def eval(self, x: Scalar) -> Scalar:
        """f(x) = x − α_i^top + α_i^bot"""
        p = self.piece_at(x)
        return x + p.shift

    def inverse(self, y: Scalar) -> Scalar:
        p = self._locate(
            y, self._by_bottom, self._bottom_keys, lambda p: p.bottom, lambda p: p.bottom_end, self.unresolved_bottom
        )
        return y - p.shift

    def __repr__(self):
        return f"IET({self.name or ''}, pieces={len(self.pieces)}, total={self.total})"


# ============================================================
# 轨道、连接、周期分量
# ============================================================


@dataclass
class Orbit:
    points: List[Scalar]
    status: OrbitStatus
    labels: List[Hashable] = field(default_factory=list)


def orbit(f: IET, x: Scalar, n: int) -> Orbit:
    """迭代 n 次；第 k 次无定义时返回 k 个点与 LeftDomain"""
    points = [x]
    labels = []
    for _ in range(n):
        try:
            p = f.piece_at(points[-1])
        except Undefined:
            return Orbit(points, OrbitStatus.LEFT_DOMAIN, labels)
        except TruncationTooCoarse:
            return Orbit(points, OrbitStatus.TRUNCATED, labels)
        labels.append(p.label)
        points.append(points[-1] + p.shift)
    return Orbit(points, OrbitStatus.COMPLETE, labels)


@dataclass(frozen=True)
class Connection:
    """(m, x, y)：x 是后向奇点，y 是前向奇点，f^m(x) = y"""

    m: int
    x: Scalar
    y: Scalar


def find_connections(f: IET, max_depth: int) -> List[Connection]:
    """沿每个后向奇点的前向轨道最多走 max_depth 步，精确比对前向奇点"""
    if not f.is_exact:
        raise ModeError("find_connections needs exact lengths")
    forward = set(f.forward_singularities())
    found = []
    for x0 in f.backward_singularities():
        x = x0
        for m in range(max_depth + 1):
            if x in forward:
                found.append(Connection(m, x0, x))
                break
            try:
                x = f.eval(x)
            except (Undefined, TruncationTooCoarse):
                # 进入未解析区域的轨道在本截断下无法判定
                break
    logger.info("连接搜索完成：深度 %s，共 %s 条", max_depth, len(found))
    return found


@dataclass(frozen=True)
class PeriodicComponent:
    lo: Scalar
    hi: Scalar
    period: int
    coding: Tuple[Hashable, ...] = ()

    @property
    def length(self) -> Scalar:
        return self.hi - self.lo


@dataclass
class _Branch:
    lo: Scalar
    hi: Scalar
    shift: Scalar
    coding: Tuple[Hashable, ...]
    time: Scalar = 0
    time_slope: Scalar = 0


def _refine(f: IET, b: _Branch) -> Tuple[List[_Branch], bool]:
    """把 f^k 的一个连续分支再推一步；返回新分支和是否碰到未解析区域"""
    lo, hi = b.lo + b.shift, b.hi + b.shift
    touched = any(cmp(lo, u_hi) < 0 and cmp(hi, u_lo) > 0 for u_lo, u_hi in f.unresolved_top)
    out = []
    i = max(0, bisect.bisect_right(f._top_keys, to_float(lo)) - 2)
    while i < len(f.pieces):
        p = f.pieces[i]
        i += 1
        if cmp(p.top, hi) >= 0:
            break
        a = p.top if cmp(p.top, lo) > 0 else lo
        z = p.top_end if cmp(p.top_end, hi) < 0 else hi
        if cmp(a, z) >= 0:
            continue
        out.append(
            _Branch(
                a - b.shift,
                z - b.shift,
                b.shift + p.shift,
                b.coding + (p.label,),
                b.time + b.time_slope * (a - b.shift - b.lo) + (p.time_at(a) or 0),
                b.time_slope + p.time_slope,
            )
        )
    return out, touched


def iterate_partition(f: IET, n: int) -> List[_Branch]:
    """f^n 的定义域 D_n 的连通分量及其平移量"""
    branches = [_Branch(p.top, p.top_end, Fraction(0), ()) for p in f.pieces]
    for _ in range(n):
        nxt = []
        for b in branches:
            nxt.extend(_refine(f, b)[0])
        branches = nxt
    return branches


def periodic_components(f: IET, n_max: int, strict: bool = False) -> List[PeriodicComponent]:
    """f^n（n ≤ n_max）为恒等的极大开区间；碰到未解析区域的分支被丢弃，strict 时抛 TruncationTooCoarse"""
    if not f.is_exact:
        raise ModeError("periodic_components needs exact lengths")
    branches = [_Branch(p.top, p.top_end, Fraction(0), ()) for p in f.pieces]
    found: List[PeriodicComponent] = []
    dropped = 0
    for n in range(1, n_max + 1):
        nxt = []
        for b in branches:
            children, touched = _refine(f, b)
            if touched:
                if strict:
                    raise TruncationTooCoarse(f"an orbit enters the unresolved region at step {n}")
                dropped += 1
            for c in children:
                if sign(c.shift) == 0:
                    found.append(PeriodicComponent(c.lo, c.hi, n, c.coding))
                else:
                    nxt.append(c)
        branches = nxt
        if not branches:
            break
    if dropped:
        logger.info("周期分量搜索：%s 个分支进入未解析区域被丢弃", dropped)
    found.sort(key=lambda c: to_float(c.lo))
    return found


# ============================================================
# 熵上界与 Abramov 公式
# ============================================================


@dataclass
class EntropyBound:
    """log(m)·Λ_m 序列及其前缀下确界；只是 liminf 的有限窗口替代，不声称收敛"""

    ms: List[int]
    values: List[float]
    running_inf: List[float]

    @property
    def last(self) -> float:
        return self.running_inf[-1]


def tail_from_lengths(lengths: Sequence[Scalar], remainder: Scalar = 0, sort: bool = False) -> Callable[[int], Scalar]:
    """由递减长度列表得到 Λ(m) = λ_{m+1} + λ_{m+2} + …，remainder 为列表之外的尾部上界"""
    seq = [exact(x) for x in lengths]
    if sort:
        seq.sort(key=to_float, reverse=True)
    for a, b in zip(seq, seq[1:]):
        if cmp(a, b) < 0:
            raise DomainError("lengths must be sorted decreasingly (pass sort=True)")
    suffix: List[Scalar] = [exact(remainder)]
    for x in reversed(seq):
        suffix.append(suffix[-1] + x)
    suffix.reverse()

    def tail(m: int) -> Scalar:
        if m < 0:
            raise DomainError("m must be non-negative")
        if m >= len(seq):
            if sign(exact(remainder)) != 0:
                raise TruncationTooCoarse(f"Λ({m}) needs lengths beyond the {len(seq)} given")
            return exact(remainder)
        return suffix[m]

    return tail


def entropy_upper_bound(tail: Callable[[int], Scalar], m_range: Iterable[int] = range(2, 51)) -> EntropyBound:
    """h(f) ≤ liminf log(m)·Λ_m"""
    ms, values, running = [], [], []
    best = math.inf
    for m in m_range:
        if m < 1:
            raise DomainError("m must be positive")
        v = math.log(m) * to_float(tail(m))
        best = min(best, v)
        ms.append(m)
        values.append(v)
        running.append(best)
    return EntropyBound(ms, values, running)


def abramov(entropy_return: Scalar, integral_return_time: Scalar) -> Scalar:
    """流的熵 = 截面映射的熵 / ∫r"""
    if sign(integral_return_time) <= 0:
        raise DomainError("the integral of the return time must be positive")
    return entropy_return / integral_return_time


# ============================================================
# 常用例子
# ============================================================


def rotation_iet(a: Scalar) -> IET:
    """旋转 x ↦ x + a mod 1 写成两区间 IET：A=(0,1−a) 与 B=(1−a,1) 交换"""
    a = exact(a)
    if sign(a) <= 0 or cmp(a, 1) >= 0:
        raise DomainError(f"rotation amount {a} must lie in (0, 1)")
    return IET.from_orders(["A", "B"], ["B", "A"], {"A": 1 - a, "B": a}, name=f"rotation({a})")


def golden_rotation() -> IET:
    """长度 (1/φ², 1/φ) 的两区间交换，ℚ(√5) 中精确"""
    inv_phi = QuadExt.make(Fraction(-1, 2), Fraction(1, 2), 5)
    return IET.from_orders(["A", "B"], ["B", "A"], {"A": 1 - inv_phi, "B": inv_phi}, name="golden rotation")


def baker_vertical_iet(alpha: Scalar, n: int) -> IET:
    """面包师曲面竖直流在顶边上的首次返回：顶部 A_i = (s−t_i, s−t_{i+1}) 平移到 (t_{i+1}, t_i)

    只物化 i < n；顶部在 s 处、底部在 0 处累积。α = 1/2 时即二进里程表。
    """
    alpha = exact(alpha)
    if sign(alpha) <= 0 or cmp(alpha, 1) >= 0:
        raise DomainError(f"baker parameter α = {alpha} must lie in (0, 1)")
    s = alpha / (1 - alpha)

    def t(i: int) -> Scalar:
        return alpha ** (i + 1) / (1 - alpha)

    pieces = [Piece(f"A{i}", s - t(i), t(i) - t(i + 1), t(i + 1), time=s) for i in range(n)]
    return IET(
        pieces,
        total=s,
        unresolved_top=[(s - t(n), s)],
        unresolved_bottom=[(0, t(n))],
        name=f"baker vertical(α={alpha})",
        tail=lambda m: t(m),
    )


def baker_iet(alpha: Scalar, direction: Tuple[Scalar, Scalar], n: int) -> IET:
    """方向 (c, s) 上的面包师 IET：λ_{A_i} = s·αⁱ，λ_{B_i} = c·αⁱ（i ≥ 1，未归一化）

    顶部次序 A₁A₂…B₂B₁，底部次序 B₁B₂…A₂A₁；累积点在中间，只物化 i ≤ n。
    """
    alpha = exact(alpha)
    c, s = exact(direction[0]), exact(direction[1])
    if sign(alpha) <= 0 or cmp(alpha, 1) >= 0:
        raise DomainError(f"baker parameter α = {alpha} must lie in (0, 1)")
    if sign(c) <= 0 or sign(s) <= 0:
        raise DomainError("direction must lie strictly inside the first quadrant")
    geo = alpha / (1 - alpha)
    total_a, total_b = s * geo, c * geo
    total = total_a + total_b
    la = {i: s * alpha**i for i in range(1, n + 1)}
    lb = {i: c * alpha**i for i in range(1, n + 1)}
    pieces = []
    acc_a: Scalar = Fraction(0)
    for i in range(1, n + 1):
        # 底部从右往左：A₁ 位于最右
        pieces.append(Piece(f"A{i}", acc_a, la[i], total - acc_a - la[i]))
        acc_a = acc_a + la[i]
    acc_b: Scalar = Fraction(0)
    for i in range(1, n + 1):
        pieces.append(Piece(f"B{i}", total - acc_b - lb[i], lb[i], acc_b))
        acc_b = acc_b + lb[i]
    return IET(
        pieces,
        total=total,
        unresolved_top=[(acc_a, total - acc_b)],
        unresolved_bottom=[(acc_b, total - acc_a)],
        name=f"baker(α={alpha}, θ=({c},{s}))",
    )
