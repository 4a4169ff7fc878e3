from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class HTVAssembleDTO(BaseModel):
    """图族 + λ 给出闭式调和函数；graph 为有限带状图 JSON 时改用 Perron-Frobenius"""

    family: Optional[str] = None
    lam: Optional[str] = Field(default=None, alias="lambda")
    k: Optional[int] = None
    q: Optional[int] = None
    A: Optional[str] = None
    B: Optional[str] = None
    h0: Optional[str] = None
    graph: Optional[Dict[str, Any]] = None
    window: int = Field(default=10, ge=1)
    include_surface: bool = False

    model_config = {"populate_by_name": True}


class HTVBakerDTO(BaseModel):
    q: int = Field(default=2, ge=2)
