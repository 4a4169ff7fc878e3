"""
2×2 矩阵：线性作用、分式线性（Möbius）作用与元素分类
"""

from dataclasses import dataclass
from typing import Tuple

from flatland.core.enums import MatrixClass
from flatland.core.errors import DomainError
from flatland.core.plane import Vec
from flatland.core.scalar import Scalar, cmp, exact, sign


@dataclass(frozen=True)
class Mat2:
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    @staticmethod
    def of(a, b, c, d) -> "Mat2":
        return Mat2(exact(a), exact(b), exact(c), exact(d))

    @staticmethod
    def identity() -> "Mat2":
        return Mat2.of(1, 0, 0, 1)

    @staticmethod
    def h(lam: Scalar) -> "Mat2":
        """水平抛物元 [[1, λ], [0, 1]]"""
        return Mat2.of(1, lam, 0, 1)

    @staticmethod
    def v(lam: Scalar) -> "Mat2":
        """竖直抛物元 [[1, 0], [λ, 1]]"""
        return Mat2.of(1, 0, lam, 1)

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Scalar:
        return self.a + self.d

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def apply(self, v: Vec) -> Vec:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def inverse(self) -> "Mat2":
        det = self.det()
        if sign(det) == 0:
            raise DomainError("singular matrix has no inverse")
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def power(self, n: int) -> "Mat2":
        base = self if n >= 0 else self.inverse()
        result = Mat2.identity()
        for _ in range(abs(n)):
            result = result @ base
        return result

    def is_identity(self) -> bool:
        return (
            sign(self.a - 1) == 0 and sign(self.b) == 0 and sign(self.c) == 0 and sign(self.d - 1) == 0
        )

    def mobius(self, z: Tuple[Scalar, Scalar]) -> Tuple[Scalar, Scalar]:
        """z = x + iy ↦ (az+b)/(cz+d)，实部虚部分开精确计算"""
        x, y = z
        den = (self.c * x + self.d) ** 2 + (self.c * y) ** 2
        if sign(den) == 0:
            raise DomainError("point is mapped to infinity")
        re = ((self.a * x + self.b) * (self.c * x + self.d) + self.a * self.c * y * y) / den
        im = y * self.det() / den
        return re, im

    def mobius_real(self, x: Scalar) -> Scalar:
        den = self.c * x + self.d
        if sign(den) == 0:
            raise DomainError("point is mapped to infinity")
        return (self.a * x + self.b) / den

    def entries(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a, self.b, self.c, self.d)


def classify(m: Mat2) -> MatrixClass:
    """按 |tr| 与 2 的大小分类；要求 det = 1"""
    if cmp(m.det(), 1) != 0:
        raise DomainError(f"classify needs det = 1, got {m.det()}")
    if m.is_identity() or (-m).is_identity():
        return MatrixClass.IDENTITY
    t = m.trace()
    at = t if sign(t) >= 0 else -t
    c = cmp(at, 2)
    if c < 0:
        return MatrixClass.ELLIPTIC
    if c == 0:
        return MatrixClass.PARABOLIC
    return MatrixClass.HYPERBOLIC


def rotation_quarter() -> Mat2:
    return Mat2.of(0, -1, 1, 0)


def scale(s: Scalar) -> Mat2:
    return Mat2.of(s, 0, 0, s)


