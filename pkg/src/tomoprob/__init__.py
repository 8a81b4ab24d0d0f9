"""Tomographic-probability representation of quantum states."""

__version__ = "0.1.0"
