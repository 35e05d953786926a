"""Scalar-flat Kahler metrics with Poincare-type cusps: construction and numerical checks."""

__version__ = "0.1.0"
