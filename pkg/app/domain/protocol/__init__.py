"""Initialization and readout protocol optimization."""
