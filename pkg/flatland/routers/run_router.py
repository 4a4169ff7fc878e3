from typing import List, Optional

from fastapi import APIRouter, Depends
from sqlalchemy.orm import Session

from flatland.core.response import Res
from flatland.db.database import get_db
from flatland.dto.run_dto import RunResponseDTO
from flatland.repositories.run_repository import RunRepository
from flatland.services.run_service import RunService

router = APIRouter(prefix="/runs", tags=["Runs"])


def get_service(db: Session = Depends(get_db)) -> RunService:
    return RunService(RunRepository(db))


@router.get(
    "",
    response_model=Res[List[RunResponseDTO]],
    summary="查询运行记录",
    description="列出账本中的全部运行，可按子命令筛选",
)
def get_all_runs(command: Optional[str] = None, service: RunService = Depends(get_service)):
    entities = service.get_all_runs(command)
    dtos = [RunResponseDTO(**e.__dict__) for e in entities]
    return Res(data=dtos, code=200, message="查询成功")


@router.get(
    "/{run_id}",
    response_model=Res[RunResponseDTO],
    summary="查询单次运行",
    description="根据 ID 查询运行记录",
)
def get_run(run_id: int, service: RunService = Depends(get_service)):
    entity = service.get_run(run_id)
    if entity:
        return Res(data=RunResponseDTO(**entity.__dict__), code=200, message="查询成功")
    return Res(data=None, code=404, message="运行记录不存在")


@router.delete(
    "/{run_id}",
    response_model=Res[bool],
    summary="删除运行记录",
    description="根据 ID 删除运行记录",
)
def delete_run(run_id: int, service: RunService = Depends(get_service)):
    ok = service.delete_run(run_id)
    if ok:
        return Res(data=True, code=200, message="删除成功")
    return Res(data=False, code=404, message="运行记录不存在")
