import logging
from typing import Any, Dict, List, Optional

from flatland.core.config import RunConfig
from flatland.entity.run_entity import RunEntity
from flatland.models.po import RunPO
from flatland.repositories.run_repository import RunRepository

logger = logging.getLogger(__name__)


class RunService:
    def __init__(self, repository: RunRepository):
        """注入 repository"""
        self.repository = repository

    @staticmethod
    def _to_entity(po: RunPO) -> RunEntity:
        data = {k: v for k, v in po.__dict__.items() if not k.startswith("_")}
        return RunEntity(**data)

    def record(self, config: RunConfig, summary: Optional[Dict[str, Any]], status: str = "ok") -> RunEntity:
        """把一次计算写进账本；params 取 RunConfig 的来源信息"""
        po = RunPO(
            command=config.command.value,
            params=config.provenance(),
            summary=summary,
            seed=config.seed,
            status=status,
        )
        res = self.repository.create(po)
        logger.info("记录运行 #%s：%s（%s）", res.id, res.command, status)
        return self._to_entity(res)

    def get_run(self, run_id: int) -> Optional[RunEntity]:
        po = self.repository.get_by_id(run_id)
        if not po:
            return None
        return self._to_entity(po)

    def get_all_runs(self, command: Optional[str] = None) -> List[RunEntity]:
        pos = self.repository.get_by_command(command) if command else self.repository.get_all()
        return [self._to_entity(po) for po in pos]

    def delete_run(self, run_id: int) -> bool:
        return self.repository.delete(run_id)


class LedgerMixin:
    """计算服务的公共部分：有账本时记录每次运行，没有时（命令行）只做计算"""

    runs: Optional[RunService] = None

    def _record(self, config: RunConfig, summary: Dict[str, Any], status: str = "ok") -> Optional[int]:
        if self.runs is None:
            return None
        return self.runs.record(config, summary, status).id
