"""Noise propagation and dephasing."""
