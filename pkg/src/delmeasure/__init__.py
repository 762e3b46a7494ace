"""Determinant measure on planar Delaunay triangulations with numerical checks."""

from .geom import INF, DegenerateError, Mobius, PointConfiguration, incircle, orient2d
from .kahler import free_kahler_matrix, kahler_matrix, measure_density, prepotential
from .tri import Triangulation, delaunay, flip, insert_point

__version__ = "0.1.0"

__all__ = [
    "INF",
    "DegenerateError",
    "Mobius",
    "PointConfiguration",
    "Triangulation",
    "delaunay",
    "flip",
    "free_kahler_matrix",
    "incircle",
    "insert_point",
    "kahler_matrix",
    "measure_density",
    "orient2d",
    "prepotential",
]
