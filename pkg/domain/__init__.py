"""
Domain layer for the margin laboratory.

Value objects (vectors, samples, distributions, grid points, bound inputs),
entities (check reports) and the error hierarchy. Nothing here depends on
the application or infrastructure layers.
"""
