"""RF drive simulation and truth tables."""
