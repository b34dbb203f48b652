"""Jet coordinates, total derivatives and prolonged infinitesimal generators."""

from .space import JetSpace, MultiIndex, SURFACES
from .fields import (
    LieAnalysis,
    ProlongedField,
    VectorFieldSpec,
    bracket,
    generalized_lie_matrix,
    orbit_dimensions,
    point_rank,
    prolong,
)


def total_derivative(e, i: int, space: JetSpace = SURFACES):
    """D_i e for the jet space ``space`` (directions are 0-based)."""
    return space.total_derivative(e, i)


__all__ = [
    "JetSpace",
    "LieAnalysis",
    "MultiIndex",
    "ProlongedField",
    "SURFACES",
    "VectorFieldSpec",
    "bracket",
    "generalized_lie_matrix",
    "orbit_dimensions",
    "point_rank",
    "prolong",
    "total_derivative",
]
