"""Molecule parsing and the five descriptor groups."""
