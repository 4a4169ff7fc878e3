from typing import Any, Dict

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from flatland.core.codec import surface_to_json
from flatland.core.config import Budget, RunConfig
from flatland.core.enums import CommandEnum
from flatland.core.errors import FlatlandError
from flatland.core.response import Res
from flatland.core.scalar import parse_scalar
from flatland.db.database import get_db
from flatland.dto.surface_dto import DirectionDTO, IsomorphismDTO, SurfaceBuildDTO, SurfaceInputDTO, TraceDTO
from flatland.repositories.run_repository import RunRepository
from flatland.services.run_service import RunService
from flatland.services.surface_service import SurfaceService, resolve_surface

router = APIRouter(prefix="/surfaces", tags=["Surfaces"])


def get_service(db: Session = Depends(get_db)) -> SurfaceService:
    return SurfaceService(RunService(RunRepository(db)))


def _config(command: CommandEnum, dto, **extra) -> RunConfig:
    params = dto.model_dump(exclude={"surface", "first", "second"}, by_alias=True)
    return RunConfig(command=command, window=getattr(dto, "window", None), params=params, **extra)


@router.post(
    "/build",
    response_model=Res[Dict[str, Any]],
    summary="构造曲面",
    description="按族名与参数构造曲面，返回校验结果、顶点类、亏格，以及（可选）窗口内的曲面 JSON",
)
def build_surface(dto: SurfaceBuildDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.BUILD, dto, seed=dto.seed)
    try:
        surface, summary = service.build(config, dto.family, dto.params)
        data = {"summary": summary}
        if dto.include_surface:
            data["surface"] = surface_to_json(surface, dto.window)
        return Res(data=data, code=200, message="构造成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/validate",
    response_model=Res[Dict[str, Any]],
    summary="校验曲面",
    description="检查多边形与配对，给出顶点类、亏格与面积；惰性曲面只检查窗口",
)
def validate_surface(dto: SurfaceInputDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.BUILD, dto)
    try:
        surface = resolve_surface(dto.surface, dto.family, dto.params)
        summary = service.describe(config, surface)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/isomorphic",
    response_model=Res[bool],
    summary="同构判定",
    description="两个有限曲面是否相差一个平移同构；forget_marked 时忽略正则标记点",
)
def isomorphic(dto: IsomorphismDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.BUILD, dto)
    try:
        first = resolve_surface(dto.first.surface, dto.first.family, dto.first.params)
        second = resolve_surface(dto.second.surface, dto.second.family, dto.second.params)
        same = service.isomorphic(config, first, second, dto.forget_marked)
        return Res(data=same, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/trace",
    response_model=Res[Dict[str, Any]],
    summary="追踪直线流",
    description="从多边形 poly 内的点沿给定方向追踪，直到撞上奇点、闭合、离开窗口或预算耗尽",
)
def trace(dto: TraceDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.TRACE, dto, budget=Budget(max_crossings=dto.max_crossings))
    try:
        surface = resolve_surface(dto.surface, dto.family, dto.params)
        direction = [parse_scalar(v) for v in dto.direction]
        point = [parse_scalar(v) for v in dto.point]
        poly = tuple(dto.poly) if isinstance(dto.poly, list) else dto.poly
        _, summary = service.trace(config, surface, poly, point, direction)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/cylinders",
    response_model=Res[Dict[str, Any]],
    summary="柱面分解",
    description="给定方向上窗口内的极大柱面及其模数",
)
def cylinders(dto: DirectionDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.TRACE, dto)
    try:
        surface = resolve_surface(dto.surface, dto.family, dto.params)
        direction = [parse_scalar(v) for v in dto.direction]
        summary = service.cylinders(config, surface, direction)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/saddle-connections",
    response_model=Res[Dict[str, Any]],
    summary="鞍点连接",
    description="给定方向上长度不超过 length 的鞍点连接",
)
def saddle_connections(dto: DirectionDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.TRACE, dto)
    try:
        surface = resolve_surface(dto.surface, dto.family, dto.params)
        direction = [parse_scalar(v) for v in dto.direction]
        L = parse_scalar(dto.length or "10")
        summary = service.saddle_connections(config, surface, direction, L, dto.through_regular)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/multitwist",
    response_model=Res[bool],
    summary="多重扭转检查",
    description="该方向上所有柱面模数是否都等于 1/λ（有限曲面上还检查扭转矩阵作用后同构）",
)
def multitwist(dto: DirectionDTO, service: SurfaceService = Depends(get_service)):
    config = _config(CommandEnum.TRACE, dto)
    try:
        surface = resolve_surface(dto.surface, dto.family, dto.params)
        direction = [parse_scalar(v) for v in dto.direction]
        lam = parse_scalar(dto.lam) if dto.lam else None
        ok = service.multitwist(config, surface, direction, lam)
        return Res(data=ok, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))
