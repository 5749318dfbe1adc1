"""Small Lie incidence geometries: construction, opposition, exhaustive search."""

from .geometry import Geometry, Kind, validate, is_generalized_polygon

__all__ = ["Geometry", "Kind", "validate", "is_generalized_polygon"]
__version__ = "0.1.0"
