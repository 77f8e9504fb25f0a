"""
Application layer for the margin bound lab.

This layer contains the numerical services (bounds, discretization, the
lower-bound construction, verification checks and the learner) and the port
interfaces for configuration and report output.
"""
