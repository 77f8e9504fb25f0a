"""
Infrastructure layer for the margin bound lab.

This layer contains the YAML and CSV adapters, lab configuration,
structured logging and the seeded trial executor.
"""
