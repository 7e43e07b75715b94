"""Application configuration module."""
