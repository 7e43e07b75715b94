"""Schemas module for Pydantic models."""
