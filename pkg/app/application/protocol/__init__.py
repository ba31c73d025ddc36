"""Initialization and readout optimization."""
