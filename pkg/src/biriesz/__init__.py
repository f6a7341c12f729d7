"""Numerical laboratory for bilinear Fourier multipliers."""
__version__ = "0.1.0"
