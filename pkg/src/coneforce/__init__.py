"""Finite-scale machinery for cone-avoiding tree forcing over Cantor space."""

__version__ = "0.1.0"
