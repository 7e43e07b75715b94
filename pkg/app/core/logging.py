"""
Logging configuration for the toolkit.

Human-readable console logging by default, structured JSON on request. In
development a JSON copy is also written to logs/app.log.

JSON records include:
- ISO 8601 timestamps with timezone
- Service name and version
- Environment identifier
- Experiment/run IDs for correlating a CLI run or HTTP request
- File, line, and function
"""

import contextvars
import logging
import sys
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from pythonjsonlogger import jsonlogger

from app.config.settings import get_settings

# Experiment is the CLI subcommand or "http"; run is one invocation or request
experiment_id_ctx: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar(
    "experiment_id", default=None
)
run_id_ctx: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar("run_id", default=None)


def set_run_context(
    experiment_id: Optional[str] = None,
    run_id: Optional[str] = None,
) -> None:
    """Set run-scoped context for logging."""
    if experiment_id:
        experiment_id_ctx.set(experiment_id)
    if run_id:
        run_id_ctx.set(run_id)


def generate_run_id() -> str:
    """Generate a short unique run ID."""
    return str(uuid.uuid4())[:8]


class ProductionJsonFormatter(jsonlogger.JsonFormatter):
    """JSON formatter adding service, environment and run context."""

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        super().__init__(*args, **kwargs)
        self.settings = get_settings()

    def add_fields(
        self,
        log_record: Dict[str, Any],
        record: logging.LogRecord,
        message_dict: Dict[str, Any],
    ) -> None:
        super().add_fields(log_record, record, message_dict)

        log_record["timestamp"] = datetime.now(timezone.utc).isoformat()
        log_record["level"] = record.levelname
        log_record["logger"] = record.name

        # Which build produced the record
        log_record["service"] = self.settings.app_name
        log_record["version"] = self.settings.app_version
        log_record["environment"] = self.settings.environment.value

        # Run context, when set
        if experiment_id_ctx.get():
            log_record["experiment_id"] = experiment_id_ctx.get()
        if run_id_ctx.get():
            log_record["run_id"] = run_id_ctx.get()

        log_record["file"] = record.filename
        log_record["line"] = record.lineno
        log_record["function"] = record.funcName

        if record.exc_info:
            log_record["exception"] = self.formatException(record.exc_info)


HUMAN_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"


def build_formatter(json_format: bool) -> logging.Formatter:
    if json_format:
        return ProductionJsonFormatter()
    return logging.Formatter(fmt=HUMAN_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")


def setup_logging(log_level: Optional[str] = None, json_format: Optional[bool] = None) -> None:
    """
    Route all logging to stderr, replacing any handlers already installed.

    stdout is reserved for the JSON results the CLI prints. Arguments left
    as None fall back to LOG_LEVEL and LOG_JSON_FORMAT.
    """
    settings = get_settings()
    level = log_level or settings.log_level
    use_json = settings.log_json_format if json_format is None else json_format

    root = logging.getLogger()
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    # stderr only; stdout carries CLI results
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    handlers[0].setFormatter(build_formatter(use_json))
    # Development keeps a JSON copy on disk
    if not use_json and settings.is_development and settings.log_to_file:
        Path("logs").mkdir(exist_ok=True)
        file_handler = logging.FileHandler(Path("logs") / "app.log")
        file_handler.setFormatter(build_formatter(True))
        handlers.append(file_handler)
    for handler in handlers:
        handler.setLevel(level)
        root.addHandler(handler)

    # Quiet the test client transport
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger(__name__).debug(
        f"Logging configured: level={level}, json_format={use_json}, "
        f"environment={settings.environment.value}"
    )
