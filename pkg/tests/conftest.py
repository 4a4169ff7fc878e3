import os

# 账本用内存库；必须在导入 flatland.db 之前设置
os.environ.setdefault("FLATLAND_DB_URL", "sqlite://")

from pathlib import Path  # noqa: E402

import pytest  # noqa: E402
from fastapi.testclient import TestClient  # noqa: E402
from sqlalchemy.orm import sessionmaker  # noqa: E402

from flatland.core import builders  # noqa: E402
from flatland.db.database import Base, get_db, make_engine  # noqa: E402
from flatland.main import app  # noqa: E402

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture
def l_shape():
    return builders.l_shape()


@pytest.fixture
def torus():
    return builders.torus()


@pytest.fixture
def two_square_torus():
    return builders.two_square_torus()


@pytest.fixture
def staircase_origami():
    return builders.square_tiled(builders.staircase_origami(), name="staircase origami")


@pytest.fixture
def client():
    """每个测试一个新的内存账本"""
    engine = make_engine("sqlite://")
    Base.metadata.create_all(bind=engine)
    TestingSession = sessionmaker(autocommit=False, autoflush=False, bind=engine)

    def override_get_db():
        db = TestingSession()
        try:
            yield db
        finally:
            db.close()

    app.dependency_overrides[get_db] = override_get_db
    with TestClient(app) as c:
        yield c
    app.dependency_overrides.clear()
    engine.dispose()


@pytest.fixture
def golden():
    """与 tests/golden/ 下的文件比对；缺失即失败，FLATLAND_UPDATE_GOLDEN=1 时重新写入"""

    def check(name: str, text: str) -> None:
        path = GOLDEN_DIR / name
        if os.environ.get("FLATLAND_UPDATE_GOLDEN") == "1":
            GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            return
        if not path.exists():
            pytest.fail(f"golden file {path} is missing; rerun with FLATLAND_UPDATE_GOLDEN=1 to create it")
        assert path.read_text(encoding="utf-8") == text

    return check
