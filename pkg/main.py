from fastapi import FastAPI

from src.api.v1.resources import closure, eigen, realizability
from src.cli import cli
from src.core import config
from src.core.logger import setup_logging
from src.services import gauss_half_quadrature

app = FastAPI(
    # Конфигурируем название проекта. Оно будет отображаться в документации
    title=config.PROJECT_NAME,
    version=config.VERSION,
    # Адрес документации в красивом интерфейсе
    docs_url="/api/openapi",
    redoc_url="/api/redoc",
    # Адрес документации в формате OpenAPI
    openapi_url="/api/openapi.json",
)


@app.get("/")
def root():
    return {"service": config.PROJECT_NAME, "version": config.VERSION}


@app.on_event("startup")
def startup():
    """Настраиваем логирование и заранее строим квадратуру"""
    setup_logging()
    gauss_half_quadrature(config.QUAD_POINTS)


# Подключаем роутеры к серверу
app.include_router(router=realizability.router, prefix="/api/v1/realizability")
app.include_router(router=closure.router, prefix="/api/v1/closure")
app.include_router(router=eigen.router, prefix="/api/v1/eigen")

if __name__ == "__main__":
    # Сервер запускается командой `python main.py serve`
    # или `uvicorn main:app --host 0.0.0.0 --port 8000`,
    # остальные команды - расчёты и сканы (`python main.py --help`)
    cli()
