"""
SVG plots of the 3-simplex: a collection's projected entropy vectors with
the influence areas, and one entity's entropy walk with its trend.

Vertex V_j of the drawing is component j; a point with barycentric
coordinates (b1, b2, b3) sits at b1*V1 + b2*V2 + b3*V3. The influence area
of V_j is the quadrilateral V_j, midpoint, centroid, midpoint.
"""
import logging
import math

import numpy as np
from django.template.loader import render_to_string

from .exceptions import AnalysisError
from .simplex import influence_map

logger = logging.getLogger(__name__)

PLOT_DIMENSION = 3
SIZE = 480
MARGIN = 40
PRECISION = 2
PALETTE = ('#1f77b4', '#d62728', '#2ca02c')

# Unit equilateral triangle: V1 bottom left, V2 bottom right, V3 on top.
VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def check_dimension(dimension):
    if dimension != PLOT_DIMENSION:
        raise AnalysisError(f"plotting supports N = 3 only (got N = {dimension})")


def planar(barycentric):
    """Unit-triangle position of barycentric coordinates (one row per point)."""
    return np.asarray(barycentric, dtype=float) @ VERTICES


def influence_polygon(index):
    """Corners of the influence area of vertex `index` (1-based) in the unit triangle."""
    vertex = VERTICES[index - 1]
    others = [VERTICES[j] for j in range(PLOT_DIMENSION) if j != index - 1]
    centroid = VERTICES.mean(axis=0)
    return np.array([vertex, (vertex + others[0]) / 2.0, centroid, (vertex + others[1]) / 2.0])


def _canvas(xy):
    """Unit-triangle position to SVG user units (y axis pointing down)."""
    xy = np.atleast_2d(xy)
    scale = SIZE - 2 * MARGIN
    x = MARGIN + xy[:, 0] * scale
    y = SIZE - MARGIN - xy[:, 1] * scale
    return [(f"{a:.{PRECISION}f}", f"{b:.{PRECISION}f}") for a, b in zip(x, y)]


def _frame(labels):
    corners = _canvas(VERTICES)
    midpoints = _canvas([(VERTICES[i] + VERTICES[(i + 1) % 3]) / 2.0 for i in range(3)])
    centroid = _canvas(VERTICES.mean(axis=0))[0]
    offsets = ((-14, 18), (14, 18), (0, -10))
    return {
        'size': SIZE,
        'triangle': ' '.join(f"{x},{y}" for x, y in corners),
        'boundaries': [{'x1': centroid[0], 'y1': centroid[1], 'x2': x, 'y2': y} for x, y in midpoints],
        'vertices': [
            {
                'x': f"{float(x) + dx:.{PRECISION}f}",
                'y': f"{float(y) + dy:.{PRECISION}f}",
                'label': f"V{i + 1} {label}".strip(),
            }
            for i, ((x, y), (dx, dy), label) in enumerate(zip(corners, offsets, labels))
        ],
    }


def simplex_svg(vectors, labels, title='Projected entropy vectors'):
    """Projection of every entropy vector, colored by its leading component."""
    vectors = list(vectors)
    if not vectors:
        raise AnalysisError("nothing to plot: no entropy vectors")
    for vector in vectors:
        check_dimension(vector.dimension)
    points = []
    for entity_id, _, verdict in influence_map(vectors):
        (x, y), = _canvas(planar(verdict.barycentric))
        points.append({
            'x': x,
            'y': y,
            'entity_id': entity_id,
            'leading': verdict.leading,
            'color': PALETTE[verdict.leading - 1],
        })
    context = {**_frame(labels), 'title': title, 'points': points}
    logger.info(f"Rendered simplex plot of {len(points)} entities")
    return render_to_string('markers/simplex.svg', context)


def trend_segment(entropy_walk, trend):
    """Two barycentric endpoints spanning the walk along its trend line."""
    along = (entropy_walk.coordinates() - trend.line_point) @ trend.direction
    ends = [trend.line_point + t * trend.direction for t in (along.min(), along.max())]
    return [np.append(end, 1.0 - end.sum()) for end in ends]


def walk_svg(entropy_walk, trend, labels, holdout_point=None, attribution=None):
    """Entropy walk of one entity with its trend arrow and holdout point, when it has them."""
    check_dimension(len(labels))
    steps = []
    for index, point in enumerate(entropy_walk.points, start=1):
        (x, y), = _canvas(planar(point.barycentric()))
        steps.append({'x': x, 'y': y, 'index': index})
    segment = None
    if trend is not None:
        (x1, y1), (x2, y2) = _canvas(planar(trend_segment(entropy_walk, trend)))
        segment = {'x1': x1, 'y1': y1, 'x2': x2, 'y2': y2, 'leading_last': trend.leading_last}
    holdout = None
    if holdout_point is not None:
        (hx, hy), = _canvas(planar(holdout_point.barycentric()))
        holdout = {'x': hx, 'y': hy, 'status': attribution.status if attribution is not None else ''}
    context = {
        **_frame(labels),
        'title': f"Entropy walk of {entropy_walk.entity_id}",
        'path': ' '.join(f"{step['x']},{step['y']}" for step in steps),
        'steps': steps,
        'trend': segment,
        'holdout': holdout,
    }
    return render_to_string('markers/walk.svg', context)


def report_walk_svg(report):
    return walk_svg(report.walk, report.trend, report.labels, report.holdout_point, report.attribution)
