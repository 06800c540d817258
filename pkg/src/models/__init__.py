"""Immutable domain models."""
