"""
运行配置：数据目录、账本数据库、比较容差与单次运行参数 RunConfig
"""

import os
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Dict, Iterator, Optional

from pydantic import BaseModel, Field

from flatland.core.enums import CommandEnum, ScalarMode

DEFAULT_EPS_CMP = 1e-9
DEFAULT_EPS_HIT = 1e-9

_eps_cmp: ContextVar[float] = ContextVar("flatland_eps_cmp", default=DEFAULT_EPS_CMP)


def get_data_dir() -> str:
    """数据目录：优先 $FLATLAND_HOME，否则为包目录下的 user_data/"""
    base = os.environ.get("FLATLAND_HOME") or os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "user_data"
    )
    os.makedirs(base, exist_ok=True)
    return base


def get_database_url() -> str:
    url = os.environ.get("FLATLAND_DB_URL")
    if url:
        return url
    return f"sqlite:///{os.path.join(get_data_dir(), 'runs.db')}"


def get_eps() -> float:
    return _eps_cmp.get()


@contextmanager
def tolerance(eps: float) -> Iterator[float]:
    """在本上下文内临时修改浮点比较容差 ε_cmp"""
    if eps <= 0:
        raise ValueError("tolerance must be positive")
    token = _eps_cmp.set(eps)
    try:
        yield eps
    finally:
        _eps_cmp.reset(token)


class Budget(BaseModel):
    max_length: Optional[float] = None
    max_crossings: int = 10_000
    max_leaves: int = 10_000


class RunConfig(BaseModel):
    """一次运行的全部可复现参数，序列化后写入每个输出文件的来源头"""

    command: CommandEnum
    mode: Optional[ScalarMode] = None
    eps_cmp: float = DEFAULT_EPS_CMP
    eps_hit: float = DEFAULT_EPS_HIT
    window: Optional[int] = None
    truncation: Optional[int] = None
    budget: Budget = Field(default_factory=Budget)
    outputs: Dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None
    params: Dict[str, Any] = Field(default_factory=dict)

    def provenance(self) -> Dict[str, Any]:
        return {
            "tool": "flatland",
            "command": self.command.value,
            "mode": self.mode.value if self.mode else None,
            "eps_cmp": self.eps_cmp,
            "seed": self.seed,
            "window": self.window,
            "truncation": self.truncation,
            "params": self.params,
        }
