"""Numerical and tropical toolkit for the SYZ duality of smoothed A_n singularities."""

__version__ = "0.1.0"
