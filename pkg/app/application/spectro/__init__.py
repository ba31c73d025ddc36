"""Coupling tables and reference checks."""
