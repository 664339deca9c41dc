"""collapsar - wave-function collapse in the complex quantum Hamilton-Jacobi picture."""

__version__ = "0.1.0"
