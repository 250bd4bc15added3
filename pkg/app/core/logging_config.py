"""
Logging configuration
"""

import logging
import sys
from pathlib import Path

from app.core.config import settings


def setup_logging(level: str | None = None):
    """Setup application logging"""

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    # Create logs directory if it doesn't exist
    if settings.LOG_DIR:
        log_dir = Path(settings.LOG_DIR)
        log_dir.mkdir(exist_ok=True)
        handlers.append(logging.FileHandler(log_dir / "lab.log"))

    # Configure root logger
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )

    # Set specific log levels
    logging.getLogger("uvicorn").setLevel(logging.INFO)
    logging.getLogger("fastapi").setLevel(logging.INFO)
    logging.getLogger("httpx").setLevel(logging.WARNING)
