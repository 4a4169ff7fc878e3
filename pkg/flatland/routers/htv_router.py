from typing import Any, Dict

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from flatland.core.codec import surface_to_json
from flatland.core.config import RunConfig
from flatland.core.enums import CommandEnum
from flatland.core.errors import FlatlandError
from flatland.core.response import Res
from flatland.core.scalar import parse_scalar
from flatland.db.database import get_db
from flatland.dto.htv_dto import HTVAssembleDTO, HTVBakerDTO
from flatland.repositories.run_repository import RunRepository
from flatland.services.htv_service import HTVService, harmonic_for
from flatland.services.run_service import RunService

router = APIRouter(prefix="/htv", tags=["HTV"])


def get_service(db: Session = Depends(get_db)) -> HTVService:
    return HTVService(RunService(RunRepository(db)))


def _opt(v):
    return None if v is None else parse_scalar(v)


@router.post(
    "/assemble",
    response_model=Res[Dict[str, Any]],
    summary="HTV 拼装",
    description="由带状图与正的 λ-调和函数拼出曲面，并从几何读出柱面模数、面积与多重扭转矩阵",
)
def assemble(dto: HTVAssembleDTO, service: HTVService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.HTV, window=dto.window, params=dto.model_dump(by_alias=True))
    try:
        h = harmonic_for(
            family=dto.family,
            lam=_opt(dto.lam),
            graph=dto.graph,
            k=dto.k,
            q=dto.q,
            A=_opt(dto.A),
            B=_opt(dto.B),
            h0=_opt(dto.h0),
        )
        surface, summary = service.assemble(config, h)
        data = {"report": summary}
        if dto.include_surface:
            data["surface"] = surface_to_json(surface, dto.window)
        return Res(data=data, code=200, message="拼装成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/baker",
    response_model=Res[Dict[str, Any]],
    summary="面包师曲面规范化",
    description="B_(1/q) 的仿射规范化：剪切、对角缩放，以及规范化后的公共模数",
)
def baker(dto: HTVBakerDTO, service: HTVService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.HTV, params=dto.model_dump())
    try:
        summary = service.baker(config, dto.q)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))
