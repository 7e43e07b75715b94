"""Core utilities module."""
