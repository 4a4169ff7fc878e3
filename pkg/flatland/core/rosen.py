"""
G_λ = ⟨h_λ, v_λ⟩ 的基本域约化、Rosen 连分数与极限集的缺口

点 z = x + iy 以实部、虚部二元组表示；精确模式下全部运算在 ℚ 或 ℚ(√D) 中进行。
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from flatland.core.enums import ExpansionStatus, MatrixClass
from flatland.core.errors import DomainError, PartialResult
from flatland.core.mat2 import Mat2, classify
from flatland.core.scalar import Scalar, cmp, exact, floor_scalar, sign, sqrt_scalar

logger = logging.getLogger(__name__)

Point = Tuple[Scalar, Scalar]
Word = List[Tuple[str, int]]

REDUCE_MAX_STEPS = 10_000

__all__ = [
    "classify",
    "MatrixClass",
    "generator",
    "word_matrix",
    "in_fundamental_domain",
    "reduce_to_domain",
    "rosen_map",
    "expansion",
    "limit_set_gap",
    "in_gap",
    "max_limit_point",
    "funnel_length",
]


def _lam(lam: Scalar) -> Scalar:
    lam = exact(lam)
    if sign(lam) <= 0:
        raise DomainError("λ must be positive")
    return lam


def _point(z) -> Point:
    if isinstance(z, complex):
        return z.real, z.imag
    x, y = z
    return exact(x), exact(y)


def generator(name: str, power: int, lam: Scalar) -> Mat2:
    """h_λⁿ = [[1, nλ], [0, 1]]，v_λⁿ = [[1, 0], [nλ, 1]]"""
    if name == "h":
        return Mat2.h(power * lam)
    if name == "v":
        return Mat2.v(power * lam)
    raise DomainError(f"unknown generator {name!r}")


def word_matrix(word: Sequence[Tuple[str, int]], lam: Scalar) -> Mat2:
    """按作用顺序给出的词对应的矩阵 g_k ⋯ g_1"""
    lam = _lam(lam)
    m = Mat2.identity()
    for name, power in word:
        m = generator(name, power, lam) @ m
    return m


def inverse_word(word: Sequence[Tuple[str, int]]) -> Word:
    return [(name, -power) for name, power in reversed(word)]


# ============================================================
# 基本域
# ============================================================


def _disk_side(x: Scalar, y: Scalar, lam: Scalar) -> Tuple[int, int]:
    """|z ∓ 1/λ|² − 1/λ² 的符号，依次为右圆盘、左圆盘"""
    r2 = x * x + y * y
    return sign(r2 - 2 * x / lam), sign(r2 + 2 * x / lam)


def in_fundamental_domain(z, lam: Scalar) -> bool:
    """闭基本域：|Re z| ≤ λ/2 且 |z ± 1/λ| ≥ 1/λ"""
    lam = _lam(lam)
    x, y = _point(z)
    if sign(y) <= 0:
        raise DomainError("z must lie in the upper half plane")
    ax = x if sign(x) >= 0 else -x
    if cmp(ax, lam / 2) > 0:
        return False
    right, left = _disk_side(x, y, lam)
    return right >= 0 and left >= 0


@dataclass
class Reduction:
    point: Point
    word: Word

    def matrix(self, lam: Scalar) -> Mat2:
        return word_matrix(self.word, lam)


def reduce_to_domain(z, lam: Scalar, max_steps: int = REDUCE_MAX_STEPS) -> Reduction:
    """先用 h 的幂把实部平移进 [−λ/2, λ/2]，落在排除圆盘内时用 v 的幂把 −1/z 的实部移回，直到进入闭基本域"""
    lam = _lam(lam)
    x, y = _point(z)
    if sign(y) <= 0:
        raise DomainError("z must lie in the upper half plane")
    word: Word = []
    for _ in range(max_steps):
        if in_fundamental_domain((x, y), lam):
            logger.debug("约化完成：%s 步", len(word))
            return Reduction((x, y), word)
        ax = x if sign(x) >= 0 else -x
        if cmp(ax, lam / 2) > 0:
            n = floor_scalar(x / lam + exact(1) / 2)
            x = x - n * lam
            word.append(("h", -n))
            continue
        # −1/z 的实部为 −x/|z|²，v_λ 在该坐标下平移 −λ
        m = floor_scalar(x / ((x * x + y * y) * lam) + exact(1) / 2)
        x, y = generator("v", -m, lam).mobius((x, y))
        word.append(("v", -m))
    raise PartialResult(
        f"reduction did not finish in {max_steps} steps", partial=Reduction((x, y), word), covered=max_steps
    )


# ============================================================
# Rosen 连分数
# ============================================================


@dataclass
class RosenStep:
    value: Scalar
    digit: Optional[Tuple[int, int]]
    terminated: bool


def rosen_map(x: Scalar, lam: Scalar) -> RosenStep:
    """T(x) = 1/(εx) − λa，a = ⌊1/(λεx) + 1/2⌋；x = 0 时终止"""
    lam, x = _lam(lam), exact(x)
    bound = 2 / lam
    ax = x if sign(x) >= 0 else -x
    if cmp(ax, bound) > 0:
        raise DomainError(f"x = {x} lies outside [−2/λ, 2/λ]")
    if sign(x) == 0:
        return RosenStep(x, None, True)
    eps = 1 if sign(x) > 0 else -1
    a = floor_scalar(1 / (lam * eps * x) + exact(1) / 2)
    t = 1 / (eps * x) - lam * a
    return RosenStep(t, (eps, a), sign(t) == 0)


@dataclass
class RosenExpansion:
    x: Scalar
    lam: Scalar
    digits: List[Tuple[int, int]] = field(default_factory=list)
    p: List[Scalar] = field(default_factory=list)
    q: List[Scalar] = field(default_factory=list)
    status: ExpansionStatus = ExpansionStatus.DEPTH_REACHED
    growth_ok: bool = True
    approximation_ok: bool = True

    @property
    def terminated(self) -> bool:
        return self.status == ExpansionStatus.TERMINATED

    def convergents(self) -> List[Scalar]:
        return [p / q for p, q in zip(self.p, self.q)]


def expansion(x: Scalar, lam: Scalar, n_max: int = 30) -> RosenExpansion:
    """逐位展开并按 p_n = λa_n p_{n−1} + ε_n p_{n−2} 计算渐近分数

    每一步检查 q_k > r·q_{k−1} 和 |x − p_n/q_n| ≤ (λ/√(λ²−4))/(q_n q_{n−1})（λ > 2 时）。
    """
    lam, x = _lam(lam), exact(x)
    out = RosenExpansion(x, lam)
    has_bounds = cmp(lam, 2) > 0
    if has_bounds:
        s = sqrt_scalar(lam * lam - 4)
        r = (lam + s) / 2
        c = lam / s
    p_prev, p = exact(1), exact(0)
    q_prev, q = exact(0), exact(1)
    cur = x
    bound = 2 / lam
    for _ in range(n_max):
        a_cur = cur if sign(cur) >= 0 else -cur
        if cmp(a_cur, bound) > 0:
            out.status = ExpansionStatus.EXITS_DOMAIN
            break
        step = rosen_map(cur, lam)
        if step.digit is None:
            out.status = ExpansionStatus.TERMINATED
            break
        eps, a = step.digit
        p_prev, p = p, lam * a * p + eps * p_prev
        q_prev, q = q, lam * a * q + eps * q_prev
        out.digits.append(step.digit)
        out.p.append(p)
        out.q.append(q)
        if sign(q) <= 0:
            out.growth_ok = False
        if has_bounds:
            if cmp(q, r * q_prev) <= 0:
                out.growth_ok = False
            err = x - p / q
            err = err if sign(err) >= 0 else -err
            if cmp(err, c / (q * q_prev)) > 0:
                out.approximation_ok = False
        cur = step.value
        if step.terminated:
            out.status = ExpansionStatus.TERMINATED
            break
    else:
        a_cur = cur if sign(cur) >= 0 else -cur
        if cmp(a_cur, bound) > 0:
            out.status = ExpansionStatus.EXITS_DOMAIN
    if not (out.growth_ok and out.approximation_ok):
        logger.error("Rosen 展开 x=%s λ=%s 违反增长或逼近界", x, lam)
    return out


# ============================================================
# 极限集
# ============================================================


def _require_hyperbolic(lam: Scalar) -> Scalar:
    lam = _lam(lam)
    if cmp(lam, 2) <= 0:
        raise DomainError(f"λ = {lam} ≤ 2: the limit set of G_λ is the whole circle")
    return lam


def limit_set_gap(lam: Scalar) -> Tuple[Scalar, Scalar]:
    """x² − λx + 1 的两根 (λ−r, r)，即 h_λ·v_λ⁻¹ 的不动点，缺口为两者之间的开区间"""
    lam = _require_hyperbolic(lam)
    s = sqrt_scalar(lam * lam - 4)
    return (lam - s) / 2, (lam + s) / 2


def in_gap(x: Scalar, lam: Scalar) -> bool:
    lo, hi = limit_set_gap(lam)
    x = exact(x)
    return cmp(lo, x) < 0 and cmp(x, hi) < 0


def funnel_generator(lam: Scalar) -> Mat2:
    """h_λ·v_λ⁻¹ = [[1−λ², λ], [−λ, 1]]"""
    lam = _lam(lam)
    return Mat2.h(lam) @ Mat2.v(-lam)


def max_limit_point(lam: Scalar) -> Scalar:
    """λ − r，Λ(T) 的上界"""
    return limit_set_gap(lam)[0]


def funnel_length(lam: Scalar) -> float:
    """喇叭口闭测地线长度 2·acosh((λ²−2)/2)"""
    lam = _require_hyperbolic(lam)
    return 2 * math.acosh((float(lam) ** 2 - 2) / 2)
