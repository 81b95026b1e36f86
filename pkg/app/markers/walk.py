"""
Mobile-window entropy analysis.

Windows of equal length are cut from every component, each window gets an
entropy value, and the per-window entropy vectors projected onto the simplex
form the entropy walk. The walk's trend is the leading component of the last
window plus the chronologically oriented direction of the total-least-squares
line through the walk. A new window is "within" the walk when its distance
from that line does not exceed the walk's mean distance.
"""
from dataclasses import dataclass
import logging

import numpy as np

from .entropy import EntropyVector, compression_ratio
from .exceptions import AnalysisError, ConfigurationError, DegenerateError, MarkersError
from .series import Series, analysis_series, symbolize
from .simplex import influence, project

logger = logging.getLogger(__name__)

OVERLAPPING = 'overlapping'
NONOVERLAPPING = 'nonoverlapping'
RANDOM_STARTS = 'random_starts'
WINDOW_KINDS = (OVERLAPPING, NONOVERLAPPING, RANDOM_STARTS)

GLOBAL_RANGE = 'global'
PER_WINDOW = 'per_window'
SYMBOLIZATION_MODES = (GLOBAL_RANGE, PER_WINDOW)

WITHIN = 'within'
OUTSIDE_SAME_LEADING = 'outside_same_leading'
OUTSIDE_CHANGED_LEADING = 'outside_changed_leading'

COINCIDENT_TOLERANCE = 1e-12
COLINEAR_TOLERANCE = 1e-9
ORIENTATION_TOLERANCE = 1e-12
ISOTROPY_RTOL = 1e-9


@dataclass(frozen=True)
class WindowScheme:
    kind: str = OVERLAPPING
    length: int = 350
    step: int = 52
    count: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.kind not in WINDOW_KINDS:
            raise ConfigurationError(f"unknown window kind {self.kind!r}")
        if self.length < 1:
            raise ConfigurationError("window length must be >= 1")
        if self.kind == OVERLAPPING and self.step < 1:
            raise ConfigurationError("window step must be >= 1")
        if self.kind == RANDOM_STARTS and self.count < 1:
            raise ConfigurationError("random_starts needs a window count >= 1")

    def starts(self, series_length):
        """Window offsets for a series of the given length, in chronological order."""
        if self.length > series_length:
            raise AnalysisError(
                f"window longer than series: {self.length} > {series_length}"
            )
        last = series_length - self.length
        if self.kind == OVERLAPPING:
            return list(range(0, last + 1, self.step))
        if self.kind == NONOVERLAPPING:
            return list(range(0, last + 1, self.length))
        if self.count > last + 1:
            raise AnalysisError(
                f"cannot draw {self.count} distinct windows of length {self.length} "
                f"from a series of length {series_length}"
            )
        # Same seed and length => same offsets for every entity of a collection.
        rng = np.random.default_rng(self.seed)
        return sorted(int(s) for s in rng.choice(last + 1, size=self.count, replace=False))

    def window_count(self, series_length):
        return len(self.starts(series_length))


@dataclass(frozen=True, eq=False)
class MovingMatrix:
    """N x k entropies: row j is component j, column i is window i."""

    values: np.ndarray
    entity_id: str = ''
    starts: tuple = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] < 1:
            raise AnalysisError("moving matrix must be N x k with k >= 1", entity_id=self.entity_id)
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise AnalysisError("moving matrix entries must lie in [0, 1]", entity_id=self.entity_id)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'starts', tuple(self.starts))

    @property
    def dimension(self):
        return self.values.shape[0]

    @property
    def window_count(self):
        return self.values.shape[1]

    def column(self, index):
        return EntropyVector(self.values[:, index], entity_id=self.entity_id)


@dataclass(frozen=True)
class EntropyWalk:
    points: tuple
    entity_id: str = ''

    def __len__(self):
        return len(self.points)

    def coordinates(self):
        return np.vstack([point.coords for point in self.points])


@dataclass(frozen=True, eq=False)
class Trend:
    leading_last: int
    direction: np.ndarray
    line_point: np.ndarray
    mean_distance: float

    def distance(self, coords):
        """Orthogonal distance of a point (simplex coordinates) to the trend line."""
        offset = np.asarray(coords, dtype=float) - self.line_point
        return float(np.linalg.norm(offset - np.dot(offset, self.direction) * self.direction))


@dataclass(frozen=True)
class AttributionVerdict:
    status: str
    distance: float
    threshold: float
    leading: int = None

    @property
    def within(self):
        return self.status == WITHIN


def make_windows(series, scheme):
    return [series.window(start, scheme.length) for start in scheme.starts(len(series))]


def moving_matrix(multi, alphabet, use_differencing, scheme, mode=GLOBAL_RANGE):
    """Entropy of every window of every component.

    In global mode the component is symbolized on its whole range and then
    windowed; in per_window mode each window is symbolized on its own range.
    """
    if mode not in SYMBOLIZATION_MODES:
        raise ConfigurationError(f"unknown symbolization mode {mode!r}")
    rows = []
    starts = ()
    for component in multi.components:
        try:
            measured = analysis_series(component, use_differencing)
            starts = tuple(scheme.starts(len(measured)))
            if mode == GLOBAL_RANGE:
                symbols = symbolize(measured, alphabet)
                windows = [symbols.window(start, scheme.length) for start in starts]
            else:
                windows = [
                    symbolize(Series(measured.values[start:start + scheme.length]), alphabet)
                    for start in starts
                ]
            rows.append([min(1.0, compression_ratio(window)) for window in windows])
        except MarkersError as exc:
            raise exc.with_context(entity_id=multi.entity_id, component=component.label)
    return MovingMatrix(np.array(rows), entity_id=multi.entity_id, starts=starts)


def walk(matrix):
    points = []
    for index in range(matrix.window_count):
        column = matrix.column(index)
        if not np.any(column.values):
            raise DegenerateError(f"degenerate window {index + 1}: null entropy vector",
                                  entity_id=matrix.entity_id or None)
        points.append(project(column))
    return EntropyWalk(points=tuple(points), entity_id=matrix.entity_id)


def orthogonal_distances(points, line_point, direction):
    offsets = points - line_point
    along = offsets @ direction
    return np.linalg.norm(offsets - np.outer(along, direction), axis=1)


def fit_trend(entropy_walk, matrix):
    """Total-least-squares line through the walk, oriented chronologically."""
    if len(entropy_walk) < 2:
        raise AnalysisError("trend needs at least 2 windows", entity_id=entropy_walk.entity_id or None)
    points = entropy_walk.coordinates()
    centroid = points.mean(axis=0)
    centered = points - centroid
    if np.max(np.abs(centered)) <= COINCIDENT_TOLERANCE:
        raise DegenerateError("trend undefined: stationary walk", entity_id=entropy_walk.entity_id or None)
    _, singular, rows = np.linalg.svd(centered, full_matrices=False)
    if singular.size > 1 and np.isclose(singular[0], singular[1], rtol=ISOTROPY_RTOL, atol=0.0):
        raise DegenerateError("trend direction ambiguous", entity_id=entropy_walk.entity_id or None)
    direction = rows[0]
    orientation = float(direction @ (points[-1] - points[0]))
    if abs(orientation) <= ORIENTATION_TOLERANCE:
        orientation = float(direction @ (points[-1] - centroid))
        if abs(orientation) <= ORIENTATION_TOLERANCE:
            raise DegenerateError("trend direction ambiguous", entity_id=entropy_walk.entity_id or None)
    if orientation < 0:
        direction = -direction
    distances = orthogonal_distances(points, centroid, direction)
    direction.setflags(write=False)
    centroid.setflags(write=False)
    return Trend(
        leading_last=influence(matrix.column(matrix.window_count - 1)).leading,
        direction=direction,
        line_point=centroid,
        mean_distance=float(distances.mean()),
    )


def attribute(point, trend, point_entropy):
    """Is the point within the walk? If not, did its leading component change?"""
    distance = trend.distance(point.coords)
    threshold = trend.mean_distance
    leading = influence(point_entropy).leading
    if distance <= max(threshold, COLINEAR_TOLERANCE):
        status = WITHIN
    elif leading == trend.leading_last:
        status = OUTSIDE_SAME_LEADING
    else:
        status = OUTSIDE_CHANGED_LEADING
    return AttributionVerdict(status=status, distance=distance, threshold=threshold, leading=leading)
