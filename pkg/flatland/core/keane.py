"""
保持三进 Cantor 集的无穷 IET 及其无连接扰动

未扰动的 f₁：a_n、b_n 的顶部区间是三进展开以 0.2^{n−1}0、0.2^{n−1}1 开头的区间，底部区间取 1 − I^top。
扰动 f₂：插入长度 δ₁ 的字母 c，把 a_i 向两侧各加宽 δ_i，b_i 相应收窄；f₂ 在 I^top_{a_i} 上与 f₁ 一致。
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional

from flatland.core.errors import DomainError
from flatland.core.iet import IET, Piece
from flatland.core.scalar import QuadExt, Scalar, cmp, exact, sign

logger = logging.getLogger(__name__)

THIRD = Fraction(1, 3)


def default_delta(i: int) -> Scalar:
    """δ_i = (2/5)·3^{−i} + √2·10^{−(i+2)}，位于 ℚ(√2)"""
    return QuadExt.make(Fraction(2, 5) * THIRD**i, Fraction(1, 10 ** (i + 2)), 2)


@dataclass
class ConstraintReport:
    checked: int
    decreasing: bool
    sum_bound: bool
    width_bound: bool

    @property
    def ok(self) -> bool:
        return self.decreasing and self.sum_bound and self.width_bound


def check_deltas(delta: Callable[[int], Scalar], n: int) -> ConstraintReport:
    """对 i ≤ n 精确检查三族不等式，失败时抛 DomainError 并指出 i"""
    for i in range(1, n + 1):
        di, dn = exact(delta(i)), exact(delta(i + 1))
        if not (sign(dn) > 0 and cmp(dn, di) < 0):
            raise DomainError(f"δ must be positive and strictly decreasing; fails at i = {i}")
        if cmp(di + dn, THIRD**i) >= 0:
            raise DomainError(f"δ_i + δ_(i+1) < 3^(-i) fails at i = {i}")
        if cmp(THIRD**i - di - dn, 2 * (di - dn)) >= 0:
            raise DomainError(f"3^(-i) - δ_i - δ_(i+1) < 2(δ_i - δ_(i+1)) fails at i = {i}")
    return ConstraintReport(n, True, True, True)


def _a_top(n: int) -> Fraction:
    return 1 - THIRD ** (n - 1)


def keane_unperturbed(n: int) -> IET:
    """f₁ 截断到字母 a_1..a_n、b_1..b_n；顶部在 1 处、底部在 0 处累积"""
    if n < 1:
        raise DomainError("truncation must be at least 1")
    pieces = []
    for i in range(1, n + 1):
        w = THIRD**i
        top_a = _a_top(i)
        top_b = top_a + w
        pieces.append(Piece(f"a{i}", top_a, w, 1 - top_a - w))
        pieces.append(Piece(f"b{i}", top_b, w, 1 - top_b - w))
    end = _a_top(n + 1)
    return IET(
        pieces,
        total=Fraction(1),
        unresolved_top=[(end, Fraction(1))],
        unresolved_bottom=[(Fraction(0), 1 - end)],
        name=f"keane f1 (N={n})",
    )


def keane_counterexample(delta: Optional[Callable[[int], Scalar]] = None, n: int = 30) -> IET:
    """f₂：先验证 δ 的约束（到 n），再按 B([x,y],a,b) = [x−a, y+b] 调整区间"""
    if n < 1:
        raise DomainError("truncation must be at least 1")
    delta = delta or default_delta
    check_deltas(delta, n)
    d = {i: exact(delta(i)) for i in range(1, n + 2)}
    pieces: List[Piece] = [
        Piece("a1", Fraction(0), THIRD, 2 * THIRD),
        Piece("c", THIRD, d[1], 2 * THIRD - d[1]),
    ]
    for i in range(1, n + 1):
        w = THIRD**i
        top_a = _a_top(i)
        top_b = top_a + w
        bot_a = 1 - top_a - w
        bot_b = 1 - top_b - w
        if i > 1:
            pieces.append(Piece(f"a{i}", top_a - d[i], w + 2 * d[i], bot_a - d[i]))
        pieces.append(Piece(f"b{i}", top_b + d[i], w - d[i] - d[i + 1], bot_b + d[i + 1]))
    end_top = _a_top(n + 1) - d[n + 1]
    end_bot = 1 - _a_top(n + 1) + d[n + 1]
    logger.info("Keane 扰动构造完成：截断 %s，共 %s 个字母", n, len(pieces))
    return IET(
        pieces,
        total=Fraction(1),
        unresolved_top=[(end_top, Fraction(1))],
        unresolved_bottom=[(Fraction(0), end_bot)],
        name=f"keane f2 (N={n})",
    )


def coding_period(i: int) -> List[str]:
    """周期轨道的编码 b_i u_i，u_1 = ∅，u_{i+1} = u_i a_i u_i"""
    u: List[str] = []
    for k in range(1, i):
        u = u + [f"a{k}"] + u
    return [f"b{i}"] + u


def in_cantor(x: Scalar, digits: int = 40) -> bool:
    """x ∈ C₃ 的有限位检查：前 digits 位三进数字中不出现 1（允许以 1 结尾的端点）"""
    x = Fraction(x)
    if x < 0 or x > 1:
        return False
    for _ in range(digits):
        x *= 3
        dgt = int(x)
        x -= dgt
        if dgt == 1:
            return x == 0
        if dgt == 3:
            return True
    return True
