"""Labeled eigensystems and effective couplings."""
