from collections import Counter

from django.test import SimpleTestCase
from hypothesis import given, strategies as st
import numpy as np
from numpy.testing import assert_array_equal

from markers.exceptions import AnalysisError
from markers.series import Alphabet, MultiSeries, SymbolicSeries
from markers.zipf import (
    COMPOSITION,
    EXACT,
    HIGHLY_DIVERSIFIED,
    INTERMEDIATE,
    RICH,
    TOTALLY_UNBALANCED,
    WordCensus,
    categorize,
    census_frame,
    composition_class_space,
    diversification,
    diversification_from_rhos,
    rank_frequency_frame,
    word_census,
    zipf_coefficient,
)


def census_of(frequencies):
    classes = tuple(((rank,), frequency, frequency) for rank, frequency in enumerate(frequencies, start=1))
    return WordCensus(classes=classes, word_length=1, equivalence=EXACT, total_words=len(classes),
                      alphabet=Alphabet(4))


class WordCensusTestCase(SimpleTestCase):
    """Test cases for word censuses"""

    def setUp(self):
        self.abab = SymbolicSeries([1, 2, 1, 2], Alphabet(4))

    def test_exact_words(self):
        """Test a census of exact words"""
        census = word_census(self.abab, 2, EXACT)
        self.assertEqual(census.classes, (((1, 2), 2, 2 / 3), ((2, 1), 1, 1 / 3)))
        self.assertEqual(census.total_words, 3)
        frame = census_frame(census)
        self.assertEqual(frame['class_id'].tolist(), ['ab', 'ba'])
        self.assertEqual(frame['rank'].tolist(), [1, 2])

    def test_composition_merges_reordered_words(self):
        """Test that composition merges reordered words"""
        census = word_census(self.abab, 2, COMPOSITION)
        self.assertEqual(census.classes, (((1, 1, 0, 0), 3, 1.0),))
        self.assertEqual(census_frame(census)['class_id'].tolist(), ['(1,1,0,0)'])

    def test_composition_class_space(self):
        """Test the size of the composition class space"""
        self.assertEqual(composition_class_space(4, 12), 455)

    def test_word_length_must_be_shorter_than_the_series(self):
        """Test that the word length must be shorter than the series"""
        with self.assertRaises(AnalysisError):
            word_census(self.abab, 4)

    def test_reachable_classes_within_class_space(self):
        """Test that the reachable classes fit in the class space"""
        rng = np.random.default_rng(4)
        sequence = SymbolicSeries(rng.integers(1, 5, size=5000), Alphabet(4))
        census = word_census(sequence, 12, COMPOSITION)
        self.assertLessEqual(census.class_count, 455)
        self.assertTrue(all(sum(class_id) == 12 for class_id, _, _ in census.classes))

    def test_ties_are_ordered_by_class_id(self):
        """Test that ties are ordered by class id"""
        census = word_census(SymbolicSeries([2, 1, 3, 1], Alphabet(4)), 1, EXACT)
        self.assertEqual([class_id for class_id, _, _ in census.classes], [(1,), (2,), (3,)])

    @given(st.lists(st.integers(1, 4), min_size=3, max_size=200), st.integers(1, 6))
    def test_census_invariants(self, values, p):
        """Test the invariants of any census"""
        if p >= len(values):
            p = len(values) - 1
        sequence = SymbolicSeries(values, Alphabet(4))
        exact = word_census(sequence, p, EXACT)
        composition = word_census(sequence, p, COMPOSITION)
        self.assertEqual(exact.total_words, len(values) - p + 1)
        self.assertAlmostEqual(exact.frequencies().sum(), 1.0, delta=1e-12)
        self.assertTrue(np.all(np.diff(exact.frequencies()) <= 0))
        merged = Counter()
        for word, count, _ in exact.classes:
            merged[tuple(word.count(s) for s in range(1, 5))] += count
        self.assertEqual(merged, Counter({class_id: count for class_id, count, _ in composition.classes}))


class ZipfCoefficientTestCase(SimpleTestCase):
    """Test cases for the rank-frequency slope"""

    def test_power_law(self):
        """Test the slope of an exact power law"""
        frequencies = np.array([1 / r for r in range(1, 11)])
        fit = zipf_coefficient(census_of(frequencies / frequencies.sum()), rare_threshold=0.0)
        self.assertAlmostEqual(fit.rho, -1.0, delta=1e-9)
        self.assertEqual(fit.points_used, 10)
        self.assertFalse(fit.degenerate)

    def test_uniform_census(self):
        """Test that a uniform census has slope 0"""
        fit = zipf_coefficient(census_of([1 / 8] * 8))
        self.assertEqual(fit.rho, 0.0)

    def test_single_surviving_class_is_degenerate(self):
        """Test that a single surviving class gives a degenerate fit"""
        with self.assertLogs('markers.zipf', level='WARNING'):
            fit = zipf_coefficient(census_of([0.995, 0.005]), rare_threshold=0.01)
        self.assertEqual(fit.rho, 0.0)
        self.assertEqual(fit.points_used, 1)
        self.assertTrue(fit.degenerate)

    def test_counts_give_the_same_slope_as_frequencies(self):
        """Test that counts and frequencies give the same slope"""
        counts = np.array([40.0, 22.0, 13.0, 9.0, 5.0, 3.0, 2.0])
        by_frequency = zipf_coefficient(census_of(counts / counts.sum()), rare_threshold=0.0)
        by_count = zipf_coefficient(census_of(counts), rare_threshold=0.0)
        self.assertAlmostEqual(by_frequency.rho, by_count.rho, places=12)

    @given(st.lists(st.integers(1, 1000), min_size=2, max_size=40))
    def test_non_increasing_frequencies_give_non_positive_slope(self, counts):
        """Test that non-increasing frequencies give a non-positive slope"""
        counts = np.sort(np.array(counts, dtype=float))[::-1]
        fit = zipf_coefficient(census_of(counts / counts.sum()), rare_threshold=0.0)
        self.assertLessEqual(fit.rho, 1e-12)


class DiversificationTestCase(SimpleTestCase):
    """Test cases for the diversification marker and its categories"""

    def test_marker_arithmetic(self):
        """Test the diversification arithmetic"""
        self.assertEqual(diversification_from_rhos([0.0, 0.0, 0.0]).value, 1.0)
        self.assertEqual(diversification_from_rhos([0.0, 0.0, 0.0]).category, HIGHLY_DIVERSIFIED)
        unbalanced = diversification_from_rhos([-1.0, -1.0, -1.0])
        self.assertEqual(unbalanced.value, 0.0)
        self.assertEqual(unbalanced.category, TOTALLY_UNBALANCED)
        rich = diversification_from_rhos([-0.3, -0.3, -0.3])
        self.assertAlmostEqual(rich.value, 0.7, places=12)
        self.assertEqual(rich.category, RICH)

    def test_category_boundaries(self):
        """Test the category boundaries"""
        self.assertEqual(categorize(1.0), HIGHLY_DIVERSIFIED)
        self.assertEqual(categorize(0.8000001), HIGHLY_DIVERSIFIED)
        self.assertEqual(categorize(0.8), RICH)
        self.assertEqual(categorize(1e-12), RICH)
        self.assertEqual(categorize(0.0), TOTALLY_UNBALANCED)
        self.assertEqual(categorize(-2.5), TOTALLY_UNBALANCED)
        self.assertEqual(categorize(1.05), INTERMEDIATE)

    def test_diversification_of_a_multi_series(self):
        """Test the diversification of a multi-series"""
        rng = np.random.default_rng(8)
        multi = MultiSeries.from_arrays('E1', [rng.uniform(0, 10, 400) for _ in range(3)])
        div = diversification(multi, Alphabet(4), True, 12, COMPOSITION, 0.01)
        self.assertEqual(len(div.per_component_rho), 3)
        self.assertAlmostEqual(div.value, 1.0 + np.mean(div.per_component_rho), places=12)
        self.assertTrue(all(c.class_space == 455 for c in div.components))
        self.assertTrue(all(c.class_count <= 455 for c in div.components))

    def test_rank_frequency_frame(self):
        """Test the rank-frequency frame"""
        census = census_of([0.5, 0.25, 0.25])
        frame = rank_frequency_frame(census)
        assert_array_equal(frame['rank'], [1, 2, 3])
        self.assertAlmostEqual(frame['log10_frequency'].iloc[0], np.log10(0.5))
