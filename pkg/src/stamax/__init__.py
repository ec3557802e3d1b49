"""Spacetime-algebra Maxwell toolkit."""

from stamax.algebra import Multivector

__all__ = ["Multivector"]
__version__ = "0.1.0"
