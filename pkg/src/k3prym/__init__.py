"""Executable checks for double-cover towers over plane quartics, their
bigonal duals, Prym polarization types, and 2-elementary lattices."""

__version__ = "0.1.0"
