"""Annotation tooling for multi-floor human-robot dialogue."""

__version__ = "0.1.0"
