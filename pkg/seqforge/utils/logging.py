"""Logging utilities.

This module provides the single logging entry point used across the
package. Every module obtains its logger via ``get_logger(__name__)`` so
handler setup and level changes stay in one place.
"""

import logging

_LOGGERS: dict = {}
_LEVEL: int = logging.INFO


def _build_logger(name: str) -> logging.Logger:
    """Create a namespaced logger with the package's stream handler.

    Parameters
    ----------
    name : str
        Logger name (without the ``seqforge.`` prefix).

    Returns
    -------
    logging.Logger
        Configured logger.
    """
    logger = logging.getLogger(f"seqforge.{name}")
    if not logger.handlers:
        handler = logging.StreamHandler()
        formatter = logging.Formatter("%(levelname)s:%(name)s:%(message)s")
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.propagate = False
    logger.setLevel(_LEVEL)
    return logger


def get_logger(name: str) -> logging.Logger:
    """Get a configured logger for the given module.

    Parameters
    ----------
    name : str
        Module name (typically __name__).

    Returns
    -------
    logging.Logger
        Configured logger instance.

    Notes
    -----
    Always use this function instead of direct logging.getLogger().
    A leading ``seqforge.`` is stripped so module loggers are not
    double-prefixed.

    Examples
    --------
    >>> logger = get_logger(__name__)
    >>> logger.info("Refreshing cluster indicator")
    INFO:seqforge.training.trainer:Refreshing cluster indicator
    """
    if name.startswith("seqforge."):
        name = name[len("seqforge."):]
    if name not in _LOGGERS:
        _LOGGERS[name] = _build_logger(name)
    return _LOGGERS[name]


def set_log_level(level: str) -> None:
    """Set the logging level for all seqforge loggers.

    Parameters
    ----------
    level : str
        Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL).
    """
    global _LEVEL
    _LEVEL = getattr(logging, level.upper(), logging.INFO)
    for logger in _LOGGERS.values():
        logger.setLevel(_LEVEL)


def get_phase_logger(phase: str) -> logging.Logger:
    """Get a logger for one phase of collaborative training.

    Parameters
    ----------
    phase : str
        Phase name ("interpreter", "cluster", "classifier").

    Returns
    -------
    logging.Logger
        Logger for phase-level messages.

    Examples
    --------
    >>> logger = get_phase_logger("interpreter")
    >>> logger.info("Bridge loss enabled")
    """
    return get_logger(f"phase.{phase}")
