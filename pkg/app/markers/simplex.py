"""
Simplex projection of entropy vectors and the leading component.

An entropy vector H is normalized by its l1 norm and the N-th coordinate is
dropped, giving a point of the standard simplex. The influence area of vertex
V_d is bounded by the hyperplanes through the centroid where two barycentric
coordinates are equal, so membership reduces to an argmax over the
barycentric coordinates (lowest index wins ties).
"""
from dataclasses import dataclass
import logging

import numpy as np

from .exceptions import AnalysisError, DegenerateError

logger = logging.getLogger(__name__)

BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class SimplexPoint:
    coords: np.ndarray
    dimension: int

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.shape != (self.dimension - 1,):
            raise AnalysisError(
                f"a point of the {self.dimension}-simplex needs {self.dimension - 1} coordinates"
            )
        if np.any(coords < -BOUNDARY_SLACK) or coords.sum() > 1.0 + BOUNDARY_SLACK:
            raise AnalysisError(f"point {coords.tolist()} lies outside the simplex")
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)

    def barycentric(self):
        """All N coordinates; the dropped one is 1 - sum(coords)."""
        return np.append(self.coords, 1.0 - self.coords.sum())

    def __eq__(self, other):
        if not isinstance(other, SimplexPoint):
            return NotImplemented
        return self.dimension == other.dimension and np.array_equal(self.coords, other.coords)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class InfluenceVerdict:
    leading: int
    barycentric: np.ndarray


def _l1(vector):
    total = float(np.sum(vector.values))
    if total <= 0.0:
        raise DegenerateError("degenerate: all components constant", entity_id=vector.entity_id or None)
    return total


def project(vector):
    total = _l1(vector)
    return SimplexPoint(coords=vector.values[:-1] / total, dimension=vector.dimension)


def leading_component(values):
    """1-based index of the largest value; the lowest index wins a tie."""
    return int(np.argmax(values)) + 1


def influence(vector):
    total = _l1(vector)
    barycentric = vector.values / total
    return InfluenceVerdict(leading=leading_component(barycentric), barycentric=barycentric)


def influence_map(collection):
    """(entity_id, point, verdict) for every vector, in input order."""
    collection = list(collection)
    dimensions = {vector.dimension for vector in collection}
    if len(dimensions) > 1:
        raise AnalysisError(f"entropy vectors of mixed dimensions: {sorted(dimensions)}")
    return [(vector.entity_id, project(vector), influence(vector)) for vector in collection]
