"""
统一异常定义

DomainError 同时继承 ValueError，路由层按 ValueError → 400 处理。
"""

from typing import Any, Optional


class FlatlandError(Exception):
    """所有计算错误的基类"""


class DomainError(FlatlandError, ValueError):
    """参数超出数学定义域"""


class ModeError(FlatlandError):
    """数域不兼容（例如 √2 与 √5 混算，或需要精确值却给了浮点）"""


class NotFinite(FlatlandError):
    """需要有限曲面却给了惰性（无限）曲面"""


class Undefined(FlatlandError):
    """在奇点（分割点）处求值"""


class TruncationTooCoarse(FlatlandError):
    """截断窗口不足以回答问题"""


class UnsupportedIrrational(FlatlandError):
    """无理角多边形的展开无法物化"""


class UsageError(FlatlandError, ValueError):
    """命令行 / 输入格式错误"""


class PartialResult(FlatlandError):
    """预算耗尽；partial 为已算出的部分结果，covered 为已覆盖的测度"""

    def __init__(self, message: str, partial: Any = None, covered: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial
        self.covered = covered


class DisconnectedCover(UserWarning):
    """上同调类不满秩，覆叠曲面不连通"""
