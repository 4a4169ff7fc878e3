"""
平面向量的小工具；坐标可以是任意 Scalar
"""

from typing import Sequence, Tuple

from flatland.core.scalar import Scalar, sign

Vec = Tuple[Scalar, Scalar]


def vadd(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vsub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vscale(t: Scalar, v: Vec) -> Vec:
    return (t * v[0], t * v[1])


def vneg(v: Vec) -> Vec:
    return (-v[0], -v[1])


def cross(u: Vec, v: Vec) -> Scalar:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Vec, v: Vec) -> Scalar:
    return u[0] * v[0] + u[1] * v[1]


def norm2(v: Vec) -> Scalar:
    return v[0] * v[0] + v[1] * v[1]


def is_zero(v: Vec) -> bool:
    return sign(v[0]) == 0 and sign(v[1]) == 0


def same_point(u: Vec, v: Vec) -> bool:
    return is_zero(vsub(u, v))


def signed_area2(points: Sequence[Vec]) -> Scalar:
    """两倍有向面积（鞋带公式）"""
    total = 0
    n = len(points)
    for i in range(n):
        total = total + cross(points[i], points[(i + 1) % n])
    return total


def upper_half(v: Vec) -> bool:
    """方向角 arg(v) ∈ [0, π) 时为真，用于无三角函数的角度比较"""
    s = sign(v[1])
    return s > 0 or (s == 0 and sign(v[0]) > 0)


def arg_less(u: Vec, v: Vec) -> bool:
    """arg(u) < arg(v)，角度取值于 [0, 2π)，精确比较"""
    hu, hv = upper_half(u), upper_half(v)
    if hu != hv:
        return hu
    return sign(cross(u, v)) > 0


def on_segment(p: Vec, a: Vec, b: Vec) -> bool:
    """p 是否在闭线段 [a, b] 上"""
    if sign(cross(vsub(b, a), vsub(p, a))) != 0:
        return False
    return sign(dot(vsub(p, a), vsub(p, b))) <= 0


def segments_cross(a: Vec, b: Vec, c: Vec, d: Vec) -> bool:
    """开线段 (a,b) 与 (c,d) 是否相交或重叠（用于多边形简单性检查）"""
    d1 = sign(cross(vsub(b, a), vsub(c, a)))
    d2 = sign(cross(vsub(b, a), vsub(d, a)))
    d3 = sign(cross(vsub(d, c), vsub(a, c)))
    d4 = sign(cross(vsub(d, c), vsub(b, c)))
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and d2 == 0:
        # 共线：检查投影区间重叠
        e = vsub(b, a)
        t = sorted([dot(vsub(c, a), e), dot(vsub(d, a), e)], key=float)
        length = dot(e, e)
        return sign(t[1]) > 0 and sign(t[0] - length) < 0
    return False
