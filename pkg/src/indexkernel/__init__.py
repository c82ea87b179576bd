"""Index-transform kernels and certified lattice summation checks."""

__version__ = "0.1.0"
