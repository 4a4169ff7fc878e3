from typing import Optional, Sequence

from sqlalchemy import select
from sqlalchemy.orm import Session

from flatland.models.po import RunPO


class RunRepository:
    def __init__(self, db: Session):
        self.db = db

    def get_by_id(self, run_id: int) -> Optional[RunPO]:
        """根据 ID 查询运行记录"""
        return self.db.get(RunPO, run_id)

    def get_all(self) -> Sequence[RunPO]:
        return self.db.execute(select(RunPO).order_by(RunPO.id)).scalars().all()

    def get_by_command(self, command: str) -> Sequence[RunPO]:
        """按子命令筛选"""
        stmt = select(RunPO).where(RunPO.command == command).order_by(RunPO.id)
        return self.db.execute(stmt).scalars().all()

    def create(self, run: RunPO) -> RunPO:
        self.db.add(run)
        self.db.commit()
        self.db.refresh(run)
        return run

    def delete(self, run_id: int) -> bool:
        run = self.get_by_id(run_id)
        if not run:
            return False
        self.db.delete(run)
        self.db.commit()
        return True
