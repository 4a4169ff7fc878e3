from datetime import datetime
from typing import Any, Dict, Optional

from pydantic import BaseModel


class RunResponseDTO(BaseModel):
    """账本中的一次运行"""

    id: int
    command: str
    params: Dict[str, Any] = {}
    summary: Optional[Dict[str, Any]] = None
    seed: Optional[int] = None
    status: str = "ok"
    created_at: Optional[datetime] = None
