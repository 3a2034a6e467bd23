"""Executable catalog of the groups of order p^6."""

__version__ = "0.1.0"
