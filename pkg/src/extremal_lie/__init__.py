"""Extremal elements of Chevalley Lie algebras and their root filtration geometries."""

__version__ = "0.1.0"
