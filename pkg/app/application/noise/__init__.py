"""Noise propagation and dephasing studies."""
