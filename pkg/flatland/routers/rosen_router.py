from typing import Any, Dict

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from flatland.core.config import RunConfig
from flatland.core.enums import CommandEnum
from flatland.core.errors import FlatlandError
from flatland.core.response import Res
from flatland.core.scalar import mode_of, parse_scalar
from flatland.db.database import get_db
from flatland.dto.rosen_dto import RosenExpandDTO, RosenGapDTO, RosenReduceDTO
from flatland.repositories.run_repository import RunRepository
from flatland.services.rosen_service import RosenService
from flatland.services.run_service import RunService

router = APIRouter(prefix="/rosen", tags=["Rosen"])


def get_service(db: Session = Depends(get_db)) -> RosenService:
    return RosenService(RunService(RunRepository(db)))


@router.post(
    "/expand",
    response_model=Res[Dict[str, Any]],
    summary="Rosen 连分数展开",
    description="逐位展开并给出渐近分数；同时报告增长界与逼近界是否成立",
)
def expand(dto: RosenExpandDTO, service: RosenService = Depends(get_service)):
    try:
        lam, x = parse_scalar(dto.lam), parse_scalar(dto.x)
        config = RunConfig(command=CommandEnum.ROSEN, mode=mode_of(lam), params=dto.model_dump(by_alias=True))
        summary = service.expand(config, x, lam, dto.depth)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/gap",
    response_model=Res[Dict[str, Any]],
    summary="极限集缺口",
    description="λ > 2 时极限集补集中的缺口、喇叭口长度与 Λ(T) 的上界",
)
def gap(dto: RosenGapDTO, service: RosenService = Depends(get_service)):
    try:
        lam = parse_scalar(dto.lam)
        config = RunConfig(command=CommandEnum.ROSEN, mode=mode_of(lam), params=dto.model_dump(by_alias=True))
        summary = service.gap(config, lam)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/reduce",
    response_model=Res[Dict[str, Any]],
    summary="基本域约化",
    description="把上半平面中的点用 G_λ 的元素移进闭基本域，返回所用的词与矩阵",
)
def reduce(dto: RosenReduceDTO, service: RosenService = Depends(get_service)):
    try:
        lam = parse_scalar(dto.lam)
        config = RunConfig(
            command=CommandEnum.ROSEN, mode=mode_of(lam), seed=dto.seed, params=dto.model_dump(by_alias=True)
        )
        summary = service.reduce(config, parse_scalar(dto.x), parse_scalar(dto.y), lam)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))
