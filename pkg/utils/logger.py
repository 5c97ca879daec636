import math
import os
import sys
import time
import traceback

# DEBUG_LOG включается через переменную окружения (1/true/yes).
# Без флага log_debug молчит: в цикле планировщика это тысячи строк.
DEBUG_ENABLED = os.getenv("DEBUG_LOG", "0").lower() in {"1", "true", "yes"}

_STARTED = time.perf_counter()


def _value(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.4g}"
    return str(value)


def format_line(level: str, msg: str, fields: dict) -> str:
    """``[LEVEL +12.345s] msg key=value ...``; floats to 4 significant digits."""
    elapsed = time.perf_counter() - _STARTED
    line = f"[{level} +{elapsed:.3f}s] {msg}"
    if fields:
        line += " " + " ".join(f"{key}={_value(value)}" for key, value in fields.items())
    return line


def log_info(msg: str, **fields):
    print(format_line("INFO", msg, fields), file=sys.stdout, flush=True)


def log_debug(msg: str, **fields):
    if DEBUG_ENABLED:
        print(format_line("DEBUG", msg, fields), file=sys.stdout, flush=True)


def log_error(msg: str, exc: Exception | None = None, **fields):
    print(format_line("ERROR", msg, fields), file=sys.stderr, flush=True)
    if exc:
        traceback.print_exception(type(exc), exc, exc.__traceback__, file=sys.stderr)
