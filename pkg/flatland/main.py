"""
flatland HTTP 服务入口：曲面、IET、HTV 与 Rosen 计算，以及运行账本
"""

import logging

import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from flatland import __version__
from flatland.db.database import Base, engine
from flatland.models.po import RunPO  # noqa: F401  建表前需要注册模型
from flatland.routers import htv_router, iet_router, rosen_router, run_router, surface_router

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
)
logger = logging.getLogger("flatland")

app = FastAPI(
    title="flatland",
    description="平移曲面、区间交换变换与 Hecke 型 Fuchs 群的精确计算",
    version=__version__,
    redirect_slashes=False,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.on_event("startup")
async def startup_event():
    try:
        Base.metadata.create_all(bind=engine)
    except Exception as e:
        logger.exception("数据库建表失败: %s", e)
    logger.info("flatland 服务启动完成")


app.include_router(surface_router.router)
app.include_router(iet_router.router)
app.include_router(rosen_router.router)
app.include_router(htv_router.router)
app.include_router(run_router.router)


@app.get("/", tags=["System"])
def read_root():
    return {"msg": "flatland 服务运行中", "version": __version__}


@app.get("/api/health", tags=["System"])
def health():
    return {"status": "ok"}


def serve(host: str = "127.0.0.1", port: int = 8200) -> None:
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    serve()
