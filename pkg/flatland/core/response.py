from typing import Any, Dict, Generic, Optional, TypeVar

from pydantic import BaseModel

T = TypeVar("T")


class Res(BaseModel, Generic[T]):
    """统一 API 响应格式；provenance 记录本次计算的模式、种子与窗口"""

    code: int = 200
    message: str = "success"
    data: Optional[T] = None
    provenance: Optional[Dict[str, Any]] = None
