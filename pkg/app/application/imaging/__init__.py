"""Geometry fitting and reconstruction benchmarks."""
