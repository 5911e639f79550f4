"""Integration tests package initialization."""

__all__ = []
