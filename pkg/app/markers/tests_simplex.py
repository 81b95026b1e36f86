import math

from django.test import SimpleTestCase
from hypothesis import given, strategies as st
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from markers.entropy import EntropyVector
from markers.exceptions import AnalysisError, DegenerateError
from markers.simplex import influence, influence_map, project

TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def quadrilateral(index):
    """Vertex, midpoint, centroid, midpoint: the area bounded by the two centroid lines."""
    vertex = TRIANGLE[index]
    centroid = TRIANGLE.mean(axis=0)
    a, b = (TRIANGLE[j] for j in range(3) if j != index)
    return [vertex, (vertex + a) / 2.0, centroid, (vertex + b) / 2.0]


def inside(polygon, point):
    crosses = []
    for start, end in zip(polygon, polygon[1:] + polygon[:1]):
        edge, offset = end - start, point - start
        crosses.append(edge[0] * offset[1] - edge[1] * offset[0])
    return all(c >= 0 for c in crosses) or all(c <= 0 for c in crosses)


class ProjectionTestCase(SimpleTestCase):
    """Test cases for projection onto the simplex"""

    def test_equal_entropies_project_to_the_centroid(self):
        """Test that equal entropies project to the centroid"""
        assert_allclose(project(EntropyVector([1, 1, 1])).coords, [1 / 3, 1 / 3])

    def test_vertices(self):
        """Test that a single nonzero entropy projects to its vertex"""
        assert_array_equal(project(EntropyVector([1, 0, 0])).coords, [1, 0])
        assert_array_equal(project(EntropyVector([0, 0, 0.5])).coords, [0, 0])

    def test_null_vector_is_degenerate(self):
        """Test that a null vector is degenerate"""
        with self.assertRaisesMessage(DegenerateError, "degenerate: all components constant"):
            project(EntropyVector([0, 0, 0]))

    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=8).filter(lambda v: sum(v) > 1e-6))
    def test_projection_stays_in_the_simplex(self, values):
        """Test that every projection stays in the simplex"""
        point = project(EntropyVector(values))
        barycentric = point.barycentric()
        self.assertTrue(np.all(point.coords >= 0.0))
        self.assertLessEqual(point.coords.sum(), 1.0 + 1e-12)
        assert_allclose(barycentric, np.array(values) / np.sum(values), atol=1e-12)


class InfluenceTestCase(SimpleTestCase):
    """Test cases for the leading component"""

    def test_argmax(self):
        """Test that the leading component is the largest entropy"""
        self.assertEqual(influence(EntropyVector([0.9, 0.1, 0.2])).leading, 1)
        self.assertEqual(influence(EntropyVector([0.1, 0.2, 0.9])).leading, 3)

    def test_ties_go_to_the_lowest_index(self):
        """Test that ties go to the lowest index"""
        self.assertEqual(influence(EntropyVector([0.5, 0.5, 0.5])).leading, 1)
        self.assertEqual(influence(EntropyVector([0.1, 0.5, 0.5])).leading, 2)

    @given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=6),
           st.sampled_from([0.5, 0.25, 0.125, 2.0 ** -10]))
    def test_scaling_keeps_the_leading_component(self, values, factor):
        """Test that scaling keeps the leading component"""
        self.assertEqual(influence(EntropyVector(values)).leading,
                         influence(EntropyVector(np.array(values) * factor)).leading)

    def test_argmax_agrees_with_the_polygon_construction(self):
        """Test the leading component against point-in-quadrilateral on 10^4 random vectors"""
        rng = np.random.default_rng(42)
        polygons = [quadrilateral(i) for i in range(3)]
        checked = 0
        while checked < 10_000:
            values = rng.uniform(0.0, 1.0, size=3)
            if min(abs(values[i] - values[j]) for i, j in ((0, 1), (0, 2), (1, 2))) <= 1e-9:
                continue
            point = (values / values.sum()) @ TRIANGLE
            containing = [i + 1 for i, polygon in enumerate(polygons) if inside(polygon, point)]
            self.assertEqual(containing, [influence(EntropyVector(values)).leading])
            checked += 1

    def test_influence_map(self):
        """Test the influence map of a collection"""
        self.assertEqual(influence_map([]), [])
        vector = EntropyVector([0.2, 0.7, 0.4], entity_id='E1')
        [(entity_id, point, verdict)] = influence_map([vector])
        self.assertEqual(entity_id, 'E1')
        self.assertEqual(point, project(vector))
        self.assertEqual(verdict.leading, influence(vector).leading)

    def test_influence_map_rejects_mixed_dimensions(self):
        """Test that the influence map rejects mixed dimensions"""
        with self.assertRaises(AnalysisError):
            influence_map([EntropyVector([0.1, 0.2]), EntropyVector([0.1, 0.2, 0.3])])
