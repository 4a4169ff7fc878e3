"""
数值内核：ℚ、ℚ(√D) 精确算术与带容差的浮点

Scalar 取值为 int / Fraction / QuadExt / float 之一。
QuadExt 的符号判定完全精确（比较 a² 与 b²D），不经过浮点。
"""

import math
import re
from fractions import Fraction
from typing import Any, Dict, Tuple, Union

from flatland.core.config import get_eps
from flatland.core.enums import ScalarMode
from flatland.core.errors import DomainError, ModeError, UsageError


def _squarefree_split(n: int) -> Tuple[int, int]:
    """n = s²·m，m 无平方因子；返回 (s, m)"""
    if n <= 0:
        raise DomainError(f"squarefree split needs a positive integer, got {n}")
    s, m = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        while rest % (p * p) == 0:
            rest //= p * p
            s *= p
        if rest % p == 0:
            rest //= p
            m *= p
        p += 1
    return s, m * rest


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


class QuadExt:
    """a + b√D，a、b 为有理数，D ≥ 2 无平方因子，且 b ≠ 0"""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b, D: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = int(D)

    @staticmethod
    def make(a, b, D: int) -> "Scalar":
        """规范化构造：b = 0 时退化为 Fraction，D 的平方因子并入 b"""
        a, b = Fraction(a), Fraction(b)
        if b == 0:
            return a
        s, m = _squarefree_split(int(D))
        b *= s
        if m == 1:
            return a + b
        return QuadExt(a, b, m)

    # ------------------------------------------------------------
    # 工具
    # ------------------------------------------------------------
    def _parts(self, other) -> Union[Tuple[Fraction, Fraction], None]:
        if isinstance(other, QuadExt):
            if other.D != self.D:
                raise ModeError(f"cannot mix √{self.D} and √{other.D}")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.D)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.D

    def sign(self) -> int:
        sa, sb = _sgn(self.a), _sgn(self.b)
        if sa >= 0 and sb >= 0:
            return 1
        if sa <= 0 and sb <= 0:
            return -1
        # 异号：比较 a² 与 b²D
        return sa if self.norm() > 0 else sb

    # ------------------------------------------------------------
    # 运算
    # ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, float):
            return float(self) + other
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QuadExt.make(self.a + p[0], self.b + p[1], self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.D)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __sub__(self, other):
        if isinstance(other, float):
            return float(self) - other
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QuadExt.make(self.a - p[0], self.b - p[1], self.D)

    def __rsub__(self, other):
        if isinstance(other, float):
            return other - float(self)
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return QuadExt.make(p[0] - self.a, p[1] - self.b, self.D)

    def __mul__(self, other):
        if isinstance(other, float):
            return float(self) * other
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        return QuadExt.make(self.a * c + self.b * d * self.D, self.a * d + self.b * c, self.D)

    __rmul__ = __mul__

    def _inverse(self) -> "QuadExt":
        n = self.norm()
        return QuadExt(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        if isinstance(other, float):
            return float(self) / other
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        if c == 0 and d == 0:
            raise ZeroDivisionError("division by zero")
        if d == 0:
            return QuadExt.make(self.a / c, self.b / c, self.D)
        return self * QuadExt(c, d, self.D)._inverse()

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self._inverse() * p[0]

    def __pow__(self, n):
        if not isinstance(n, int):
            return float(self) ** float(n)
        base = self if n >= 0 else self._inverse()
        result: Scalar = Fraction(1)
        for _ in range(abs(n)):
            result = result * base
        return result

    # ------------------------------------------------------------
    # 比较
    # ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, float):
            return abs(float(self) - other) <= get_eps()
        if isinstance(other, QuadExt):
            return self.D == other.D and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def _cmp(self, other) -> int:
        if isinstance(other, float):
            diff = float(self) - other
            return 0 if abs(diff) <= get_eps() else _sgn(diff)
        d = self - other
        if d is NotImplemented:
            raise TypeError(f"cannot compare QuadExt with {type(other).__name__}")
        return sign(d)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, {self.D})"

    def __str__(self):
        b = "" if self.b == 1 else ("-" if self.b == -1 else str(self.b))
        if self.a == 0:
            return f"{b}√{self.D}"
        joiner = "" if b.startswith("-") else "+"
        return f"{self.a}{joiner}{b}√{self.D}"


Scalar = Union[int, Fraction, QuadExt, float]


# ============================================================
# 通用函数
# ============================================================


def exact(x: Scalar) -> Scalar:
    """int → Fraction，其余原样返回"""
    if isinstance(x, bool):
        raise DomainError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    return x


def is_exact(x: Scalar) -> bool:
    return not isinstance(x, float)


def mode_of(x: Scalar) -> ScalarMode:
    if isinstance(x, float):
        return ScalarMode.FLOAT
    if isinstance(x, QuadExt):
        return ScalarMode.QUAD
    return ScalarMode.RATIONAL


def require_exact(*xs: Scalar, what: str = "this operation") -> None:
    for x in xs:
        if isinstance(x, float):
            raise ModeError(f"{what} requires exact scalars")


def sign(x: Scalar) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    if isinstance(x, float):
        return 0 if abs(x) <= get_eps() else _sgn(x)
    return _sgn(x)


def cmp(a: Scalar, b: Scalar) -> int:
    """a−b 的符号；浮点按 ε_cmp 判等，不同 D 抛 ModeError"""
    if isinstance(a, float) or isinstance(b, float):
        return sign(float(a) - float(b))
    return sign(a - b)


def to_float(x: Scalar) -> float:
    return float(x)


def floor_scalar(x: Scalar) -> int:
    if isinstance(x, (int, Fraction)):
        return math.floor(x)
    if isinstance(x, float):
        return math.floor(x)
    n = math.floor(float(x))
    while sign(x - n) < 0:
        n -= 1
    while sign(x - (n + 1)) >= 0:
        n += 1
    return n


def _rational_sqrt(r: Fraction, D_hint: Union[int, None] = None) -> Scalar:
    if r < 0:
        raise DomainError(f"square root of negative number {r}")
    if r == 0:
        return Fraction(0)
    n, d = r.numerator, r.denominator
    s, m = _squarefree_split(n * d)
    if m == 1:
        return Fraction(s, d)
    if D_hint is not None and D_hint != m:
        raise ModeError(f"√{r} lies outside ℚ(√{D_hint})")
    return QuadExt(0, Fraction(s, d), m)


def sqrt_scalar(x: Scalar) -> Scalar:
    """精确平方根：结果必须仍在 ℚ 或同一个 ℚ(√D) 中，否则 ModeError"""
    if isinstance(x, float):
        if x < 0:
            raise DomainError(f"square root of negative number {x}")
        return math.sqrt(x)
    if isinstance(x, (int, Fraction)):
        return _rational_sqrt(Fraction(x))
    if x.sign() < 0:
        raise DomainError(f"square root of negative number {x}")
    # (p + q√D)² = a + b√D ⇒ p² + q²D = a, 2pq = b
    disc = x.a * x.a - x.b * x.b * x.D
    sd = _rational_sqrt(disc) if disc >= 0 else None
    if isinstance(sd, Fraction):
        for t in ((x.a + sd) / 2, (x.a - sd) / 2):
            if t <= 0:
                continue
            p = _rational_sqrt(t)
            if isinstance(p, Fraction) and p != 0:
                q = x.b / (2 * p)
                cand = QuadExt.make(p, q, x.D)
                if sign(cand) > 0 and cand * cand == x:
                    return cand
    raise ModeError(f"√({x}) is not in ℚ(√{x.D})")


def solve_char_quadratic(lam: Scalar) -> Tuple[Scalar, Scalar]:
    """x² − λx + 1 的两根 (r₊, r₋)，要求 λ ≥ 2"""
    lam = exact(lam)
    if cmp(lam, 2) < 0:
        raise DomainError(f"λ = {lam} < 2: no positive real roots for staircases")
    disc = lam * lam - 4
    if isinstance(lam, float):
        s = math.sqrt(max(disc, 0.0))
    else:
        s = sqrt_scalar(disc)
    return (lam + s) / 2, (lam - s) / 2


# ============================================================
# 解析与 JSON
# ============================================================

_INT_RE = re.compile(r"^[+-]?\d+$")
_RAT_RE = re.compile(r"^[+-]?\d+/\d+$")
_QUAD_RE = re.compile(
    r"^(?:(?P<a>[+-]?\d+(?:/\d+)?)(?=[+-]))?(?P<b>[+-]?(?:\d+(?:/\d+)?)?)[r√](?P<D>\d+)$"
)


def parse_scalar(text: str) -> Scalar:
    """解析 `n/d`、整数、`a+brD`（也可写 `a+b√D`）或小数（浮点模式）"""
    s = str(text).strip().replace(" ", "")
    if not s:
        raise UsageError("empty scalar")
    if _INT_RE.match(s):
        return Fraction(int(s))
    if _RAT_RE.match(s):
        n, d = s.split("/")
        if int(d) == 0:
            raise UsageError(f"zero denominator in {text!r}")
        return Fraction(int(n), int(d))
    m = _QUAD_RE.match(s)
    if m:
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        braw = m.group("b")
        if braw in ("", "+"):
            b = Fraction(1)
        elif braw == "-":
            b = Fraction(-1)
        else:
            b = Fraction(braw)
        D = int(m.group("D"))
        if D < 1:
            raise UsageError(f"bad radicand in {text!r}")
        return QuadExt.make(a, b, D)
    try:
        value = float(s)
    except ValueError:
        raise UsageError(f"cannot parse scalar {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"non-finite scalar {text!r}")
    return value


def format_scalar(x: Scalar) -> str:
    if isinstance(x, QuadExt):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return str(Fraction(x))


def scalar_to_json(x: Scalar) -> Dict[str, Any]:
    if isinstance(x, QuadExt):
        return {"quad": [x.a.numerator, x.a.denominator, x.b.numerator, x.b.denominator, x.D]}
    if isinstance(x, float):
        return {"f64": x}
    f = Fraction(x)
    return {"rat": [f.numerator, f.denominator]}


def scalar_from_json(obj: Any) -> Scalar:
    if isinstance(obj, dict):
        if "rat" in obj:
            n, d = obj["rat"]
            return Fraction(int(n), int(d))
        if "quad" in obj:
            an, ad, bn, bd, D = obj["quad"]
            return QuadExt.make(Fraction(an, ad), Fraction(bn, bd), int(D))
        if "f64" in obj:
            return float(obj["f64"])
        raise UsageError(f"unknown scalar encoding {obj!r}")
    if isinstance(obj, bool):
        raise UsageError("booleans are not scalars")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str):
        return parse_scalar(obj)
    raise UsageError(f"unknown scalar encoding {obj!r}")


def scalar_key(x: Scalar) -> Tuple:
    """精确标量的规范排序键（仅用于规范形，不表示数值大小）"""
    require_exact(x, what="canonical keys")
    if isinstance(x, QuadExt):
        return ("q", x.a.numerator, x.a.denominator, x.b.numerator, x.b.denominator, x.D)
    f = Fraction(x)
    return ("r", f.numerator, f.denominator)
