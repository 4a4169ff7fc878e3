from typing import Any, Generator

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from flatland.core.config import get_database_url

SQLALCHEMY_DATABASE_URL = get_database_url()


def make_engine(url: str) -> Engine:
    """SQLite 使用 StaticPool：所有请求复用同一个连接，内存库也能跨请求保留数据"""
    if url.startswith("sqlite"):
        return create_engine(url, connect_args={"check_same_thread": False}, poolclass=StaticPool, echo=False)
    return create_engine(url, echo=False)


engine = make_engine(SQLALCHEMY_DATABASE_URL)

# SessionLocal 用于依赖注入
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

# Base 类，所有 ORM 模型继承它
Base = declarative_base()


def get_db() -> Generator[Session, Any, None]:
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()
