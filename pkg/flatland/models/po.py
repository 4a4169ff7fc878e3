from datetime import datetime, timezone

from sqlalchemy import JSON, Column, DateTime, Integer, String

from flatland.db.database import Base


# ------------------------------
# 运行账本 runs
# ------------------------------
class RunPO(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, autoincrement=True, index=True)
    # 子命令：build / trace / iet / cutstack / htv / rosen / entropy / windtree
    command = Column(String(32), nullable=False, index=True)
    # RunConfig.provenance() 的完整内容
    params = Column(JSON, nullable=False, default=dict)
    summary = Column(JSON, nullable=True)
    seed = Column(Integer, nullable=True)
    # ok / partial / error
    status = Column(String(16), nullable=False, default="ok")
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc), nullable=False)
