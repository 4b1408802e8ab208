import logging
from logging.config import fileConfig
from typing import Optional

from src.core import config

__all__ = ("setup_logging",)


def setup_logging(level: Optional[str] = None) -> None:
    """Настройка логгеров из logging.ini (как в env.py миграций)"""
    if config.LOG_CONFIG.exists():
        fileConfig(config.LOG_CONFIG, disable_existing_loggers=False)
    else:
        logging.basicConfig(level=logging.INFO)
    level = level or config.LOG_LEVEL
    if level:
        logging.getLogger("src").setLevel(level.upper())
