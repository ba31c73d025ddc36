"""Decoupling spectra, readout calibration and synthetic traces."""
