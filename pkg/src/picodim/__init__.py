"""Codimension growth and the PI-exponent of a four-dimensional simple algebra."""
from .algebra import AlgebraSpec, Element, build_W, multiply
from .exponent import exp_estimate
from .symfunc import multiplicities

__all__ = ["AlgebraSpec", "Element", "build_W", "multiply", "exp_estimate", "multiplicities"]
__version__ = "0.1.0"
