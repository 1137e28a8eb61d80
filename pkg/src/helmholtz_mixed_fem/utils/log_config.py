import logging
import logging.config
import time
from functools import wraps

CONSOLE_LEVELS = {0: logging.ERROR, 1: logging.INFO, 2: logging.DEBUG}

FORMATTERS = {
    "standard": {
        "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        "datefmt": "%Y-%m-%d %H:%M:%S",
    },
    "detailed": {
        "format": "%(asctime)s [%(levelname)s] %(name)s %(funcName)s: %(message)s",
        "datefmt": "%Y-%m-%d %H:%M:%S",
    },
}

# third-party loggers that only reach the file, and only at ERROR
QUIET_LOGGERS = ("numexpr",)


def _console_level(verbose_level):
    return CONSOLE_LEVELS[min(max(int(verbose_level), 0), 2)]


def setup_logging(verbose_level=1, log_file_name="helmholtz_fem.log"):
    """
    Configure the root logger for a command line session.

    Args:
        verbose_level: 0 logs errors, 1 info, 2 debug on the console (stderr)
        log_file_name: DEBUG log file, appended to; None disables it

    Stdout is left to results so the CLI output can be piped.
    """
    handlers = {
        "console": {
            "class": "logging.StreamHandler",
            "level": _console_level(verbose_level),
            "formatter": "standard",
            "stream": "ext://sys.stderr",
        },
    }
    if log_file_name is not None:
        handlers["file"] = {
            "class": "logging.FileHandler",
            "level": logging.DEBUG,
            "formatter": "detailed",
            "filename": log_file_name,
            "mode": "a",
        }
    file_only = [name for name in handlers if name == "file"]

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": FORMATTERS,
            "handlers": handlers,
            "loggers": {
                "": {"handlers": list(handlers), "level": "DEBUG", "propagate": True},
                **{
                    name: {"handlers": file_only, "level": "ERROR", "propagate": False}
                    for name in QUIET_LOGGERS
                },
            },
        }
    )
    logging.getLogger(__name__).info(
        f"Logging initialized. Verbose level: {verbose_level}, log file: {log_file_name or 'none'}"
    )


def log_execution_time(func):
    """Decorator logging the wall time of a solve/loop at DEBUG; failures are logged and re-raised."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        logger = logging.getLogger(func.__module__)
        start_time = time.perf_counter()
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__name__} failed after {time.perf_counter() - start_time:.2f} s: {e}")
            raise
        logger.debug(f"{func.__name__} took {time.perf_counter() - start_time:.2f} s")
        return result
    return wrapper
