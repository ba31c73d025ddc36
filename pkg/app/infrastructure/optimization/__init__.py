"""Numerical optimizer adapters."""
