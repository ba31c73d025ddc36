"""Parallel task execution."""
