"""Utility modules: configuration, reports and helpers."""
