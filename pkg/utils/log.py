import logging
import sys

_FORMAT = '%(asctime)s %(levelname)5s: %(message)s'
_DATEFMT = '%H:%M:%S'

_loggers = {}


def get_logger(name):
    """
    Named logger writing to stdout, configured once per name.

    Call set_level() from the CLI to change every project logger at once.
    """
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setFormatter(logging.Formatter(_FORMAT, _DATEFMT))
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        logger.propagate = False
    _loggers[name] = logger
    return logger


def set_level(level):
    """Set the level of every logger created through get_logger"""
    if isinstance(level, str):
        level = getattr(logging, level.upper())
    for logger in _loggers.values():
        logger.setLevel(level)
