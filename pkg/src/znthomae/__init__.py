"""Numerical verification of Thomae-type formulae for singular Z_N curves."""

__version__ = "0.1.0"
