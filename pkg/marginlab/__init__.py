"""Numerical lab for margin generalization bounds of halfspaces."""

__version__ = "0.1.0"
