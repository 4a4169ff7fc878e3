from typing import Optional

from pydantic import BaseModel, Field


class RosenExpandDTO(BaseModel):
    x: str
    lam: str = Field(alias="lambda")
    depth: int = Field(default=30, ge=1)

    model_config = {"populate_by_name": True}


class RosenGapDTO(BaseModel):
    lam: str = Field(alias="lambda")

    model_config = {"populate_by_name": True}


class RosenReduceDTO(BaseModel):
    """z = x + iy，y > 0"""

    x: str
    y: str
    lam: str = Field(alias="lambda")
    seed: Optional[int] = None

    model_config = {"populate_by_name": True}
