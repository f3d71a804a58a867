"""Numerical toolkit for variational Fourier multipliers on vector-valued signals."""

__version__ = "0.1.0"
