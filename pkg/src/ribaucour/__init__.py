"""Ribaucour reductions, umbilic classification and curvature-line indices
for surfaces in Euclidean and Lorentz-Minkowski 3-space."""

__version__ = "0.1.0"
