"""Exact computations with Lefschetz Lie algebras, Mukai lattices and mirror data."""

__version__ = "0.1.0"
