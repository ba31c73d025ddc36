"""Shared domain base classes."""
