"""Exact-arithmetic workbench for simple density ideals."""

__version__ = "0.1.0"
