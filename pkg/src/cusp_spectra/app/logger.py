import logging
import sys

from .config.config import properties

LOG_FORMAT = "[%(asctime)s] %(levelname)s — %(name)s — %(message)s"


def _build_logger(name: str, level: str) -> logging.Logger:
    log = logging.getLogger(name)
    log.setLevel(level.upper())
    log.propagate = False

    # stdout carries CSV/JSON results, diagnostics go to stderr
    if not log.hasHandlers():
        handler = logging.StreamHandler(sys.stderr)
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
        log.addHandler(handler)
    return log


def set_level(level: str) -> None:
    logger.setLevel(level.upper())


logger = _build_logger("cusp_spectra", properties.LOG_LEVEL)
