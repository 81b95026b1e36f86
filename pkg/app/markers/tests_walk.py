from django.test import SimpleTestCase
from hypothesis import given, strategies as st
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from markers.entropy import EntropyVector, entropy_vector
from markers.exceptions import AnalysisError, ConfigurationError, DegenerateError
from markers.series import Alphabet, MultiSeries, SymbolicSeries
from markers.simplex import SimplexPoint
from markers.walk import (
    COLINEAR_TOLERANCE,
    NONOVERLAPPING,
    OUTSIDE_CHANGED_LEADING,
    OUTSIDE_SAME_LEADING,
    OVERLAPPING,
    PER_WINDOW,
    RANDOM_STARTS,
    WITHIN,
    EntropyWalk,
    MovingMatrix,
    WindowScheme,
    attribute,
    fit_trend,
    make_windows,
    moving_matrix,
    walk,
)

SQRT_HALF = np.sqrt(0.5)


def walk_of(columns):
    """Entropy walk and moving matrix whose columns are the given entropy vectors."""
    matrix = MovingMatrix(np.array(columns, dtype=float).T, entity_id='E1')
    return walk(matrix), matrix


def walk_through(coords):
    return EntropyWalk(points=tuple(SimplexPoint(c, 3) for c in coords), entity_id='E1')


class WindowSchemeTestCase(SimpleTestCase):
    """Test cases for window offsets"""

    def test_protocol_schedule_gives_four_windows(self):
        """Test that the default schedule gives four windows on 533 points"""
        self.assertEqual(WindowScheme(OVERLAPPING, 350, 52).starts(533), [0, 52, 104, 156])

    def test_nonoverlapping(self):
        """Test non-overlapping window starts"""
        self.assertEqual(WindowScheme(NONOVERLAPPING, 5).starts(10), [0, 5])

    def test_single_window_covering_the_series(self):
        """Test a single window covering the whole series"""
        scheme = WindowScheme(OVERLAPPING, 5, 1)
        windows = make_windows(SymbolicSeries([1, 2, 3, 4, 1], Alphabet(4)), scheme)
        self.assertEqual(len(windows), 1)
        assert_array_equal(windows[0].symbols, [1, 2, 3, 4, 1])

    def test_window_longer_than_series(self):
        """Test that a window longer than the series is an analysis error"""
        with self.assertRaisesMessage(AnalysisError, "window longer than series"):
            WindowScheme(OVERLAPPING, 350, 52).starts(300)

    def test_unknown_kind(self):
        """Test that an unknown window kind is a configuration error"""
        with self.assertRaises(ConfigurationError):
            WindowScheme('sliding')

    def test_count_formula_matches_enumeration(self):
        """Test floor((t - w) / s) + 1 against enumeration on 10^4 random schedules"""
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            t = int(rng.integers(1, 2000))
            w = int(rng.integers(1, t + 1))
            s = int(rng.integers(1, 500))
            enumerated = []
            start = 0
            while start + w <= t:
                enumerated.append(start)
                start += s
            starts = WindowScheme(OVERLAPPING, w, s).starts(t)
            self.assertEqual(starts, enumerated)
            self.assertEqual(len(starts), (t - w) // s + 1)

    @given(st.integers(20, 500), st.integers(1, 10), st.integers(0, 2**32 - 1))
    def test_random_starts_are_seeded_distinct_and_sorted(self, t, k, seed):
        """Test that random starts are seeded, distinct and sorted"""
        scheme = WindowScheme(RANDOM_STARTS, 10, count=k, seed=seed)
        starts = scheme.starts(t)
        self.assertEqual(starts, scheme.starts(t))
        self.assertEqual(len(set(starts)), k)
        self.assertEqual(starts, sorted(starts))
        self.assertTrue(all(0 <= s <= t - 10 for s in starts))

    def test_random_starts_cannot_exceed_available_offsets(self):
        """Test that random starts cannot exceed the available offsets"""
        with self.assertRaises(AnalysisError):
            WindowScheme(RANDOM_STARTS, 10, count=5).starts(12)


class MovingMatrixTestCase(SimpleTestCase):
    """Test cases for the per-window entropies"""

    def setUp(self):
        self.alphabet = Alphabet(4)
        self.scheme = WindowScheme(OVERLAPPING, 350, 52)

    def test_constant_series(self):
        """Test the moving matrix of a constant series"""
        multi = MultiSeries.from_arrays('E1', [np.full(351, 4.0)] * 3)
        for mode in ('global', PER_WINDOW):
            matrix = moving_matrix(multi, self.alphabet, True, self.scheme, mode)
            assert_array_equal(matrix.values, np.full((3, 1), 151 / 700))

    def test_single_window_equals_the_entropy_vector(self):
        """Test that a single window equals the entropy vector"""
        rng = np.random.default_rng(11)
        multi = MultiSeries.from_arrays('E1', [rng.uniform(0, 5, 351) for _ in range(3)])
        matrix = moving_matrix(multi, self.alphabet, True, self.scheme)
        self.assertEqual(matrix.window_count, 1)
        assert_array_equal(matrix.column(0).values, entropy_vector(multi, self.alphabet).values)

    def test_permuting_components_permutes_rows(self):
        """Test that permuting components permutes the rows"""
        rng = np.random.default_rng(12)
        arrays = [rng.uniform(0, 5, 600), rng.integers(0, 2, 600), rng.uniform(0, 1, 600)]
        forward = moving_matrix(MultiSeries.from_arrays('E1', arrays), self.alphabet, True, self.scheme)
        backward = moving_matrix(MultiSeries.from_arrays('E1', arrays[::-1]), self.alphabet, True, self.scheme)
        assert_array_equal(forward.values, backward.values[::-1])
        self.assertEqual(forward.starts, (0, 52, 104, 156, 208))

    def test_errors_name_entity_and_component(self):
        """Test that errors name the entity and component"""
        multi = MultiSeries.from_arrays('E9', [np.ones(100)] * 2, ['tv', 'press'])
        with self.assertRaises(AnalysisError) as caught:
            moving_matrix(multi, self.alphabet, True, self.scheme)
        self.assertEqual((caught.exception.entity_id, caught.exception.component), ('E9', 'tv'))


class WalkTestCase(SimpleTestCase):
    """Test cases for the entropy walk"""

    def test_vertex_columns(self):
        """Test that vertex columns walk through the vertices"""
        entropy_walk, _ = walk_of([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
        assert_array_equal(entropy_walk.coordinates(), [[1, 0], [0, 1], [0, 0]])

    def test_identical_columns_give_identical_points(self):
        """Test that identical columns give identical points"""
        entropy_walk, _ = walk_of([(0.3, 0.5, 0.2)] * 4)
        self.assertEqual(len(set(map(tuple, entropy_walk.coordinates()))), 1)

    def test_null_column_is_degenerate(self):
        """Test that a null column is degenerate"""
        with self.assertRaisesMessage(DegenerateError, "degenerate window 2"):
            walk_of([(0.2, 0.3, 0.1), (0, 0, 0), (0.1, 0.1, 0.1)])


class TrendTestCase(SimpleTestCase):
    """Test cases for the fitted trend"""

    def test_colinear_walk(self):
        """Test the trend of a colinear walk"""
        entropy_walk, matrix = walk_of([(0.1, 0.1, 0.8), (0.2, 0.2, 0.6), (0.3, 0.3, 0.4)])
        trend = fit_trend(entropy_walk, matrix)
        assert_allclose(trend.direction, [SQRT_HALF, SQRT_HALF], atol=1e-9)
        self.assertLess(trend.mean_distance, 1e-12)
        self.assertEqual(trend.leading_last, 3)

    def test_reversed_chronology_flips_the_direction(self):
        """Test that reversing the chronology flips the direction"""
        entropy_walk, matrix = walk_of([(0.3, 0.3, 0.4), (0.2, 0.2, 0.6), (0.1, 0.1, 0.8)])
        trend = fit_trend(entropy_walk, matrix)
        assert_allclose(trend.direction, [-SQRT_HALF, -SQRT_HALF], atol=1e-9)

    def test_mean_distance_matches_direct_computation(self):
        """Test the mean distance against a direct computation"""
        entropy_walk, matrix = walk_of([(0.0, 0.0, 1.0), (0.2, 0.1, 0.7), (0.4, 0.0, 0.6)])
        trend = fit_trend(entropy_walk, matrix)
        points = entropy_walk.coordinates()
        centered = points - points.mean(axis=0)
        _, vectors = np.linalg.eigh(centered.T @ centered)
        ux, uy = vectors[:, -1]
        expected = np.mean([abs(x * uy - y * ux) for x, y in centered])
        self.assertAlmostEqual(trend.mean_distance, expected, places=12)
        self.assertAlmostEqual(np.linalg.norm(trend.direction), 1.0, places=12)

    def test_translation_invariance(self):
        """Test that translating the walk keeps the direction and the mean distance"""
        rng = np.random.default_rng(3)
        _, matrix = walk_of([(0.2, 0.3, 0.5)] * 5)
        for _ in range(100):
            coords = rng.uniform(0.1, 0.4, size=(5, 2))
            shift = rng.uniform(-0.05, 0.05, size=2)
            base = fit_trend(walk_through(coords), matrix)
            moved = fit_trend(walk_through(coords + shift), matrix)
            assert_allclose(moved.direction, base.direction, atol=1e-9)
            self.assertAlmostEqual(moved.mean_distance, base.mean_distance, delta=1e-9)

    def test_single_window(self):
        """Test that a single window has no trend"""
        entropy_walk, matrix = walk_of([(0.1, 0.2, 0.3)])
        with self.assertRaisesMessage(AnalysisError, "at least 2 windows"):
            fit_trend(entropy_walk, matrix)

    def test_stationary_walk(self):
        """Test that a stationary walk has no trend"""
        entropy_walk, matrix = walk_of([(0.1, 0.2, 0.3)] * 3)
        with self.assertRaisesMessage(DegenerateError, "trend undefined: stationary walk"):
            fit_trend(entropy_walk, matrix)

    def test_isotropic_walk(self):
        """Test that an isotropic walk has no trend direction"""
        entropy_walk, matrix = walk_of([(0.2, 0.2, 0.6), (0.4, 0.2, 0.4), (0.4, 0.4, 0.2), (0.2, 0.4, 0.4)])
        with self.assertRaisesMessage(DegenerateError, "trend direction ambiguous"):
            fit_trend(entropy_walk, matrix)


class AttributionTestCase(SimpleTestCase):
    """Test cases for the within/outside verdict"""

    def setUp(self):
        # Points at distance 0.05 on both sides of the line y = 0.3.
        self.coords = [(0.1, 0.35), (0.2, 0.25), (0.3, 0.25), (0.4, 0.35)]
        self.entropy_walk, self.matrix = walk_of([(x, y, 1.0 - x - y) for x, y in self.coords])
        self.trend = fit_trend(self.entropy_walk, self.matrix)

    def test_trend_of_symmetric_walk(self):
        """Test the trend of a walk symmetric about a line"""
        assert_allclose(self.trend.direction, [1.0, 0.0], atol=1e-9)
        self.assertAlmostEqual(self.trend.mean_distance, 0.05, places=9)
        self.assertEqual(self.trend.leading_last, 1)

    def test_point_on_the_line_is_within(self):
        """Test that a point on the trend line is within"""
        verdict = attribute(SimplexPoint([0.25, 0.3], 3), self.trend, EntropyVector([0.25, 0.3, 0.45]))
        self.assertEqual(verdict.status, WITHIN)
        self.assertTrue(verdict.within)

    def test_far_point_with_same_leading_component(self):
        """Test a far point with the same leading component"""
        verdict = attribute(SimplexPoint([0.25, 0.4], 3), self.trend, EntropyVector([0.5, 0.2, 0.3]))
        self.assertEqual(verdict.status, OUTSIDE_SAME_LEADING)
        self.assertAlmostEqual(verdict.distance, 0.1, places=9)
        self.assertGreater(verdict.distance, verdict.threshold)

    def test_far_point_with_changed_leading_component(self):
        """Test a far point with a changed leading component"""
        verdict = attribute(SimplexPoint([0.25, 0.4], 3), self.trend, EntropyVector([0.25, 0.4, 0.35]))
        self.assertEqual(verdict.status, OUTSIDE_CHANGED_LEADING)
        self.assertEqual(verdict.leading, 2)

    def test_some_walk_point_is_within(self):
        """Test that some point of every walk is within"""
        rng = np.random.default_rng(21)
        for _ in range(50):
            coords = rng.uniform(0.05, 0.45, size=(6, 2))
            entropy_walk, matrix = walk_of([(x, y, 1.0 - x - y) for x, y in coords])
            trend = fit_trend(entropy_walk, matrix)
            verdicts = [
                attribute(point, trend, matrix.column(i))
                for i, point in enumerate(entropy_walk.points)
            ]
            self.assertTrue(any(v.within for v in verdicts))

    def test_colinear_walk_uses_absolute_tolerance(self):
        """Test that a colinear walk uses the absolute tolerance"""
        entropy_walk, matrix = walk_of([(0.1, 0.1, 0.8), (0.2, 0.2, 0.6), (0.3, 0.3, 0.4)])
        trend = fit_trend(entropy_walk, matrix)
        self.assertEqual(attribute(SimplexPoint([0.15, 0.15], 3), trend, matrix.column(0)).status, WITHIN)
        self.assertNotEqual(attribute(SimplexPoint([0.15, 0.2], 3), trend, matrix.column(0)).status, WITHIN)

    def test_threshold_is_the_mean_distance(self):
        """Test that the verdict reports the mean walk distance as its threshold"""
        verdict = attribute(SimplexPoint([0.25, 0.4], 3), self.trend, EntropyVector([0.5, 0.2, 0.3]))
        self.assertEqual(verdict.threshold, self.trend.mean_distance)

    def test_colinear_walk_reports_its_own_mean_distance(self):
        """Test that the absolute tolerance decides the verdict without replacing the threshold"""
        entropy_walk, matrix = walk_of([(0.1, 0.1, 0.8), (0.2, 0.2, 0.6), (0.3, 0.3, 0.4)])
        trend = fit_trend(entropy_walk, matrix)
        verdict = attribute(SimplexPoint([0.15, 0.15], 3), trend, matrix.column(0))
        self.assertEqual(verdict.threshold, trend.mean_distance)
        self.assertLess(verdict.threshold, COLINEAR_TOLERANCE)
        self.assertEqual(verdict.status, WITHIN)
