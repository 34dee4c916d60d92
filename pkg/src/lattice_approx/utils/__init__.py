"""Utility modules for lattice-approx."""
