# ============================================================
# audit_logger.py
# Centralized JSON logging + run tracing for extgeo
# - One-line JSON records for every command and suite
# - run_id propagation using contextvars (thread-safe)
# - Console handler on stderr + optional rotating file handler
# - Event helpers (debug carries tracebacks) + timing decorator
# ============================================================

import functools
import json
import logging
import os
import sys
import time
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler

ROOT_LOGGER = "extgeo"

# -------------------------------
# [SECTION] Context (per-run)
# -------------------------------
_run_id: ContextVar[str] = ContextVar("_run_id", default="-")
_component: ContextVar[str] = ContextVar("_component", default="-")


def set_run_id(run_id: str | None = None) -> str:
    """Set/refresh the current run_id in context and return it."""
    rid = run_id or uuid.uuid4().hex[:12]
    _run_id.set(rid)
    return rid


def get_run_id() -> str:
    """Get the current run_id (or '-' if not set)."""
    return _run_id.get()


def set_component(component: str | None = None) -> None:
    """Set the current logical component (cli|metric|connection|deformation|check)."""
    _component.set(component or "-")


def get_component() -> str:
    return _component.get()


# -------------------------------
# [SECTION] JSON Formatter
# -------------------------------
_RECORD_INTERNALS = frozenset((
    "msg", "args", "levelname", "levelno", "pathname", "filename", "module", "exc_info",
    "exc_text", "stack_info", "lineno", "funcName", "created", "msecs", "relativeCreated",
    "thread", "threadName", "processName", "process", "name", "taskName", "message",
))


class JSONFormatter(logging.Formatter):
    """Emit log records as one-line JSON with consistent fields."""

    def format(self, record: logging.LogRecord) -> str:
        base = {
            "ts": datetime.now(timezone.utc).isoformat(timespec="milliseconds"),
            "level": record.levelname,
            "logger": record.name,
            "run_id": getattr(record, "run_id", get_run_id()),
            "component": getattr(record, "component", get_component()),
            "event": getattr(record, "event", record.getMessage()),
        }

        extras = {
            k: v for k, v in record.__dict__.items()
            if k not in base and not k.startswith("_") and k not in _RECORD_INTERNALS
        }
        payload = {**base, **extras}

        if record.exc_info:
            payload["error"] = self.formatException(record.exc_info)

        return json.dumps(payload, default=str, ensure_ascii=False)


# -----------------------------------------
# [SECTION] Logger Construction (idempotent)
# -----------------------------------------
_BUILT = False


def _ensure_dir(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def build_logger(
    name: str = ROOT_LOGGER,
    log_level: str | None = None,
    log_file: str | None = None,
    max_bytes: int = 5 * 1024 * 1024,  # 5MB
    backup_count: int = 3,
) -> logging.Logger:
    """
    Build the extgeo root logger once. Safe to call multiple times; a later
    call only updates the level.
    Reads defaults from environment:
      LOG_LEVEL (default INFO)
      LOG_FILE  (default empty: stderr only)

    Records never go to stdout, which is reserved for reports.
    """
    global _BUILT
    logger = logging.getLogger(name)
    level = (log_level or os.getenv("LOG_LEVEL", "INFO")).upper()
    if _BUILT and logger.handlers:
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)
        return logger

    file_path = log_file if log_file is not None else os.getenv("LOG_FILE", "")
    logger.setLevel(level)
    json_fmt = JSONFormatter()

    ch = logging.StreamHandler(stream=sys.stderr)
    ch.setLevel(level)
    ch.setFormatter(json_fmt)
    logger.addHandler(ch)

    if file_path:
        _ensure_dir(file_path)
        fh = RotatingFileHandler(file_path, maxBytes=max_bytes, backupCount=backup_count, encoding="utf-8")
        fh.setLevel(level)
        fh.setFormatter(json_fmt)
        logger.addHandler(fh)

    logger.propagate = False
    _BUILT = True
    logger.debug("", extra={"event": "logger_initialized", "log_level": level, "log_file": file_path or "-"})
    return logger


# ----------------------------------------
# [SECTION] Convenience logging functions
# ----------------------------------------
def _emit(level: int, event: str, exc_info: BaseException | None = None, **fields):
    """Emit a JSON log with run_id, component and event injected."""
    logger = logging.getLogger(ROOT_LOGGER)
    extra = {"event": event, "run_id": get_run_id(), "component": get_component(), **fields}
    logger.log(level, event, extra=extra, exc_info=exc_info)


def log_debug(event: str, exc_info: BaseException | None = None, **fields):
    _emit(logging.DEBUG, event, exc_info=exc_info, **fields)


def log_info(event: str,  **fields): _emit(logging.INFO,  event, **fields)
def log_warn(event: str,  **fields): _emit(logging.WARNING, event, **fields)
def log_error(event: str, **fields): _emit(logging.ERROR, event, **fields)


# ----------------------------------------
# [SECTION] Timing helper (decorator)
# ----------------------------------------
def log_timing(event: str, component: str | None = None):
    """
    Decorator to measure latency_ms of a function and log start/end events.
    Usage:
        @log_timing("suite_compatibility", component="check")
        def run_suite(...): ...
    """
    def _wrap(fn):
        @functools.wraps(fn)
        def _inner(*args, **kwargs):
            prev_comp = get_component()
            if component:
                set_component(component)
            start = time.perf_counter()
            log_debug(event + "_start")
            try:
                result = fn(*args, **kwargs)
                latency_ms = int((time.perf_counter() - start) * 1000)
                log_info(event + "_end", latency_ms=latency_ms, status="ok")
                return result
            except Exception as ex:
                latency_ms = int((time.perf_counter() - start) * 1000)
                log_error(event + "_end", latency_ms=latency_ms, status="error", exception=str(ex))
                raise
            finally:
                set_component(prev_comp)
        return _inner
    return _wrap
