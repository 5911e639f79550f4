"""Unit tests package initialization."""

__all__ = []
