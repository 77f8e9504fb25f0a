"""Tests for the margin bound lab."""
