from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class IETRequestDTO(BaseModel):
    """spec 为 IET JSON：字母表 + 秩数组 + 长度，或 {"generator": 名称, "params": {...}}，或显式分量"""

    spec: Dict[str, Any]
    x: Optional[str] = None
    n: int = 10
    depth: int = 20
    n_max: int = 20
    strict: bool = False


class EntropyDTO(BaseModel):
    """三种来源任选其一：IET JSON、显式长度列表、台阶台球参数"""

    spec: Optional[Dict[str, Any]] = None
    lengths: Optional[List[str]] = None
    remainder: str = "0"
    ratio: Optional[str] = None
    direction: Optional[List[str]] = None
    levels: int = 20
    m_min: int = 2
    m_max: Optional[int] = None


class KeaneDTO(BaseModel):
    truncation: int = Field(default=30, ge=1)
    depth: int = Field(default=20, ge=0)
    cantor_depth: int = Field(default=10, ge=1)
