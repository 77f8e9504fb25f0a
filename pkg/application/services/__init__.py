"""Numerical services of the margin bound lab."""
