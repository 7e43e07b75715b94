"""API v1 endpoints module."""
