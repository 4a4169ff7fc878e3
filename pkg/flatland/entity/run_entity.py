from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, Optional


@dataclass
class RunEntity:
    """业务实体：一次计算的记录"""

    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    summary: Optional[Dict[str, Any]] = None
    seed: Optional[int] = None
    status: str = "ok"
    id: Optional[int] = None
    created_at: Optional[datetime] = None
