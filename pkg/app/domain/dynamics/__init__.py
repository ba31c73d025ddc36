"""Dynamical decoupling, photon statistics and time traces."""
