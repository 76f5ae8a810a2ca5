"""Poissonized Robinson-Schensted and geometric RSK processes."""

__version__ = "0.1.0"
