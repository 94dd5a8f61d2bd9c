import logging
import os
import sys

import structlog

from app.config import settings


class StderrLoggerFactory:
    """Crea un PrintLogger sobre el sys.stderr vigente en cada llamada"""

    def __call__(self, *args) -> structlog.PrintLogger:
        return structlog.PrintLogger(file=sys.stderr)


def configure_logging(level: str | None = None, json_output: bool | None = None) -> None:
    """
    Configura structlog para toda la aplicación.

    Los eventos se escriben siempre en stderr: stdout queda reservado para
    la salida útil de la CLI.
    """
    level_name = (level or settings.LOG_LEVEL).upper()
    numeric_level = logging.getLevelName(level_name)
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    if json_output is None:
        json_output = settings.LOG_JSON

    if json_output:
        renderer = structlog.processors.JSONRenderer(sort_keys=True)
    else:
        colors = "NO_COLOR" not in os.environ and sys.stderr.isatty()
        renderer = structlog.dev.ConsoleRenderer(colors=colors)

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=StderrLoggerFactory(),
        cache_logger_on_first_use=False,
    )
