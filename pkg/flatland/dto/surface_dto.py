from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class SurfaceBuildDTO(BaseModel):
    """按族名构造曲面；params 的标量可写成 "1/2"、"1+1r2" 或 JSON 编码"""

    family: str
    params: Dict[str, Any] = Field(default_factory=dict)
    window: Optional[int] = None
    include_surface: bool = True
    seed: Optional[int] = None


class SurfaceInputDTO(BaseModel):
    """曲面可以直接给 JSON，也可以给族名与参数"""

    surface: Optional[Dict[str, Any]] = None
    family: Optional[str] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    window: Optional[int] = None


class IsomorphismDTO(BaseModel):
    first: SurfaceInputDTO
    second: SurfaceInputDTO
    forget_marked: bool = True


class TraceDTO(SurfaceInputDTO):
    direction: List[str]
    poly: Any = 0
    point: List[str]
    max_crossings: int = 10_000


class DirectionDTO(SurfaceInputDTO):
    """柱面、鞍点连接与多重扭转共用；length 只用于鞍点连接，lam 只用于多重扭转"""

    direction: List[str]
    length: Optional[str] = None
    lam: Optional[str] = Field(default=None, alias="lambda")
    through_regular: bool = False

    model_config = {"populate_by_name": True}
