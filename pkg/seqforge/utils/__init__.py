"""Shared utilities: logging and run-directory result files."""

from seqforge.utils.logging import get_logger, get_phase_logger, set_log_level

__all__ = ["get_logger", "get_phase_logger", "set_log_level"]
