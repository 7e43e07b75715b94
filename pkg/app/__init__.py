"""Euler-Helfrich equilibrium toolkit."""

__version__ = "0.1.0"
