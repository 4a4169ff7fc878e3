from typing import Any, Dict

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from flatland.core.config import RunConfig
from flatland.core.enums import CommandEnum
from flatland.core.errors import FlatlandError, UsageError
from flatland.core.response import Res
from flatland.core.scalar import parse_scalar
from flatland.db.database import get_db
from flatland.dto.iet_dto import EntropyDTO, IETRequestDTO, KeaneDTO
from flatland.repositories.run_repository import RunRepository
from flatland.services.iet_service import IETService
from flatland.services.run_service import RunService

router = APIRouter(prefix="/iet", tags=["IET"])


def get_service(db: Session = Depends(get_db)) -> IETService:
    return IETService(RunService(RunRepository(db)))


def _x(dto: IETRequestDTO):
    if dto.x is None:
        raise UsageError("x is required")
    return parse_scalar(dto.x)


@router.post(
    "/eval",
    response_model=Res[Dict[str, Any]],
    summary="求值",
    description="f(x)；x 落在分割点或未定义区域时返回错误",
)
def eval_iet(dto: IETRequestDTO, service: IETService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.IET, params=dto.model_dump())
    try:
        summary = service.eval(config, service.load(dto.spec), _x(dto))
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/orbit",
    response_model=Res[Dict[str, Any]],
    summary="轨道",
    description="迭代 n 次；中途无定义时提前停止并给出状态",
)
def orbit(dto: IETRequestDTO, service: IETService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.IET, params=dto.model_dump())
    try:
        summary = service.orbit(config, service.load(dto.spec), _x(dto), dto.n)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/connections",
    response_model=Res[Dict[str, Any]],
    summary="连接搜索",
    description="从每个后向奇点出发最多走 depth 步，精确比对前向奇点",
)
def connections(dto: IETRequestDTO, service: IETService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.IET, params=dto.model_dump())
    try:
        summary = service.connections(config, service.load(dto.spec), dto.depth)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/periodic",
    response_model=Res[Dict[str, Any]],
    summary="周期分量",
    description="f^n（n ≤ n_max）为恒等的极大开区间",
)
def periodic(dto: IETRequestDTO, service: IETService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.IET, params=dto.model_dump())
    try:
        summary = service.periodic(config, service.load(dto.spec), dto.n_max, dto.strict)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/entropy",
    response_model=Res[Dict[str, Any]],
    summary="熵上界",
    description="log(m)·Λ_m 序列及其前缀下确界",
)
def entropy(dto: EntropyDTO, service: IETService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.ENTROPY, params=dto.model_dump())
    try:
        m_range = range(dto.m_min, dto.m_max + 1) if dto.m_max else None
        if dto.spec is not None:
            summary = service.entropy_of_iet(config, service.load(dto.spec), m_range)
        elif dto.lengths is not None:
            lengths = [parse_scalar(v) for v in dto.lengths]
            summary = service.entropy_of_lengths(config, lengths, parse_scalar(dto.remainder), m_range)
        elif dto.ratio is not None and dto.direction is not None:
            direction = tuple(parse_scalar(v) for v in dto.direction)
            summary = service.entropy_of_step_billiard(config, parse_scalar(dto.ratio), direction, dto.levels)
        else:
            raise UsageError("give spec, lengths, or ratio with direction")
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))


@router.post(
    "/keane",
    response_model=Res[Dict[str, Any]],
    summary="Keane 反例",
    description="默认参数族的三族约束、连接搜索与 Cantor 端点检查",
)
def keane(dto: KeaneDTO, service: IETService = Depends(get_service)):
    config = RunConfig(command=CommandEnum.IET, truncation=dto.truncation, params=dto.model_dump())
    try:
        summary = service.keane(config, dto.truncation, dto.depth, dto.cantor_depth)
        return Res(data=summary, code=200, message="查询成功", provenance=config.provenance())
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except FlatlandError as e:
        raise HTTPException(status_code=422, detail=str(e))
