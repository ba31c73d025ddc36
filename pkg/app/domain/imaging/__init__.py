"""Geometry reconstruction from measured couplings."""
