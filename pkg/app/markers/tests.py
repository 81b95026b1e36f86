import itertools

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
import numpy as np
from numpy.testing import assert_array_equal

from markers.entropy import (
    EntropyVector,
    compression_ratio,
    entropy,
    entropy_vector,
    lz_parse,
    norm_euclidean,
    norm_l1,
    phrase_cost,
)
from markers.exceptions import AnalysisError, ConfigurationError, DataError
from markers.series import (
    Alphabet,
    MultiSeries,
    Series,
    SymbolicSeries,
    difference,
    sparsity,
    symbolize,
)


def symbols(text, size=4):
    """'abab' -> SymbolicSeries over an alphabet of `size` letters."""
    return SymbolicSeries([ord(c) - ord('a') + 1 for c in text], Alphabet(size))


def brute_phrase_count(text):
    """Independent incremental parse over plain strings."""
    seen = set()
    position = 0
    count = 0
    while position < len(text):
        end = position + 1
        while end <= len(text) and text[position:end] in seen:
            end += 1
        count += 1
        if end > len(text):
            break
        seen.add(text[position:end])
        position = end
    return count


class SeriesTestCase(SimpleTestCase):
    """Test cases for series construction, differencing and sparsity"""

    def test_series_rejects_non_finite_values(self):
        """Test that empty series and non-finite values are rejected"""
        with self.assertRaises(DataError):
            Series([1.0, float('nan')])
        with self.assertRaises(DataError):
            Series([])

    def test_multi_series_needs_two_equal_components(self):
        """Test that a multi-series needs two or more components of equal length"""
        with self.assertRaises(DataError):
            MultiSeries.from_arrays('E1', [[1.0, 2.0]])
        with self.assertRaises(DataError):
            MultiSeries.from_arrays('E1', [[1.0, 2.0], [1.0]])

    def test_difference(self):
        """Test the difference series of the documented examples"""
        assert_array_equal(difference(Series([1, 3, 2])).values, [2, -1])
        assert_array_equal(difference(Series([5, 5, 5, 5])).values, [0, 0, 0])
        assert_array_equal(difference(Series([0, 1, 0, 2, 0])).values, [1, -1, 2, -2])

    def test_difference_of_single_value_fails(self):
        """Test that differencing a single value fails"""
        with self.assertRaisesMessage(AnalysisError, "cannot difference"):
            difference(Series([3.0]))

    @given(st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=60))
    def test_cumulative_sum_reconstructs_series(self, values):
        """Test that the cumulative sum of the differences rebuilds the series"""
        diffs = difference(Series(values)).values
        rebuilt = np.concatenate([[values[0]], values[0] + np.cumsum(diffs)])
        assert_array_equal(rebuilt, values)

    def test_sparsity(self):
        """Test the zero-density rule: sparse iff zeros >= length * delta"""
        profile = sparsity(Series([0, 3, 0, 1, 2, 5, 4, 7]), 0.25)
        self.assertEqual(profile.null_count, 2)
        self.assertTrue(profile.is_sparse)
        self.assertFalse(sparsity(Series([1, 2, 3, 4]), 0.25).is_sparse)
        self.assertTrue(sparsity(Series([1, 2, 3]), 0.0).is_sparse)

    def test_sparsity_rejects_delta_outside_unit_interval(self):
        """Test that a sparsity delta outside [0, 1] is rejected"""
        with self.assertRaises(ConfigurationError):
            sparsity(Series([1, 2]), 1.5)

    @given(st.lists(st.sampled_from([0.0, 0.0, 1.0, 2.5]), min_size=1, max_size=40),
           st.floats(0.0, 1.0))
    def test_sparsity_matches_defining_inequality(self, values, delta):
        """Test that sparsity follows null_count >= length * delta"""
        profile = sparsity(Series(values), delta)
        self.assertEqual(profile.is_sparse, values.count(0.0) >= len(values) * delta)


class SymbolizeTestCase(SimpleTestCase):
    """Test cases for the uniform-partition symbolization"""

    def test_ramp_uses_every_quarter(self):
        """Test that a ramp fills every quarter of the range"""
        result = symbolize(Series([0.0, 1.0, 2.0, 3.0]), Alphabet(4))
        assert_array_equal(result.symbols, [1, 2, 3, 4])

    def test_constant_series_maps_to_first_symbol(self):
        """Test that a constant series maps to the first symbol"""
        assert_array_equal(symbolize(Series([7, 7, 7]), Alphabet(5)).symbols, [1, 1, 1])

    def test_maximum_is_last_symbol_and_minimum_first(self):
        """Test that the maximum maps to the last symbol and the minimum to the first"""
        result = symbolize(Series([0.0, 1.0, 2.0, 4.0]), Alphabet(4))
        assert_array_equal(result.symbols, [1, 2, 3, 4])
        self.assertEqual(result.text(), 'abcd')

    def test_doubling_gives_the_same_symbols(self):
        """Test that doubling the values keeps the symbols"""
        values = np.random.default_rng(3).normal(size=200)
        assert_array_equal(symbolize(Series(2 * values), Alphabet(4)).symbols,
                           symbolize(Series(values), Alphabet(4)).symbols)

    @given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=50),
           st.integers(1, 1000), st.integers(-10**6, 10**6), st.integers(2, 9))
    def test_integer_affine_maps_keep_symbols(self, values, a, b, size):
        """Test that positive integer affine maps keep the symbols"""
        x = np.array(values, dtype=float)
        alphabet = Alphabet(size)
        assert_array_equal(symbolize(Series(a * x + b), alphabet).symbols,
                           symbolize(Series(x), alphabet).symbols)

    def test_random_affine_maps_keep_symbols(self):
        """Test affine invariance on 500 random real-valued series"""
        rng = np.random.default_rng(20240601)
        for _ in range(500):
            x = rng.uniform(0.0, 1000.0, size=int(rng.integers(2, 200)))
            a = rng.uniform(0.5, 100.0)
            b = rng.uniform(-1000.0, 1000.0)
            alphabet = Alphabet(int(rng.integers(2, 9)))
            assert_array_equal(symbolize(Series(a * x + b), alphabet).symbols,
                               symbolize(Series(x), alphabet).symbols)

    def test_alphabet_size_below_two_is_rejected(self):
        """Test that an alphabet of fewer than two symbols is rejected"""
        with self.assertRaises(ConfigurationError):
            Alphabet(1)


class ParseTestCase(SimpleTestCase):
    """Test cases for the incremental dictionary parse and its bit cost"""

    def test_constant_string(self):
        """Test the parse and cost of a constant string"""
        parse = lz_parse(symbols('aaaaaaaa'))
        self.assertEqual(parse.phrase_count, 4)
        self.assertTrue(parse.partial)
        self.assertEqual(parse.phrases, ((0, 1), (1, 1), (2, 1), (1, 1)))
        # (0+2) + (1+2) + (2+2) + (2+2)
        self.assertEqual(parse.bit_cost, 13)
        self.assertEqual(entropy(symbols('aaaaaaaa')), 13 / 16)

    def test_alternating_string(self):
        """Test the parse of an alternating string"""
        parse = lz_parse(symbols('ababab', size=2))
        self.assertEqual(parse.phrase_count, 4)
        self.assertEqual(parse.bit_cost, 9)

    def test_single_symbol(self):
        """Test that a single symbol is one phrase"""
        parse = lz_parse(symbols('a'))
        self.assertEqual(parse.phrase_count, 1)
        self.assertEqual(parse.bit_cost, 2)
        self.assertFalse(parse.partial)

    def test_empty_sequence_fails(self):
        """Test that parsing an empty sequence fails"""
        with self.assertRaises(AnalysisError):
            lz_parse(SymbolicSeries([], Alphabet(4)))

    def test_phrase_counts_match_brute_force_on_all_short_binary_strings(self):
        """Test the parser against an independent parse of all 2046 binary strings up to length 10"""
        checked = 0
        for length in range(1, 11):
            for letters in itertools.product('ab', repeat=length):
                text = ''.join(letters)
                self.assertEqual(lz_parse(symbols(text, size=2)).phrase_count, brute_phrase_count(text), text)
                checked += 1
        self.assertEqual(checked, 2046)

    def test_distinct_strings_give_distinct_phrase_lists(self):
        """Test that distinct strings give distinct phrase lists"""
        for length in range(1, 9):
            parses = {
                lz_parse(symbols(''.join(letters), size=2)).phrases
                for letters in itertools.product('ab', repeat=length)
            }
            self.assertEqual(len(parses), 2 ** length)

    @given(st.lists(st.integers(1, 4), min_size=1, max_size=300))
    def test_decoding_reproduces_the_sequence(self, values):
        """Test that decoding the phrases reproduces the sequence"""
        sequence = SymbolicSeries(values, Alphabet(4))
        assert_array_equal(lz_parse(sequence).decode(), values)

    def test_cost_grows_with_phrase_count(self):
        """Test that the bit cost grows with the phrase count"""
        alphabet = Alphabet(4)
        totals = np.cumsum([phrase_cost(k, alphabet) for k in range(1, 200)])
        self.assertTrue(np.all(np.diff(totals) > 0))


class EntropyTestCase(SimpleTestCase):
    """Test cases for entropy values, vectors and norms"""

    def test_constant_sequences_have_low_entropy(self):
        """Test that constant sequences have low entropy"""
        # 91 phrases: lengths 1..90 plus one partial phrase.
        self.assertEqual(entropy(SymbolicSeries(np.ones(4096), Alphabet(4))), 692 / 8192)
        self.assertEqual(entropy(SymbolicSeries(np.ones(350), Alphabet(4))), 151 / 700)

    def test_random_sequences_are_bounded_and_uniform_beats_constant(self):
        """Test h in [0, 1] on 1000 random sequences, and uniform minus constant >= 0.5"""
        rng = np.random.default_rng(1)
        alphabet = Alphabet(4)
        for _ in range(1000):
            length = int(rng.integers(50, 5001))
            h = entropy(SymbolicSeries(rng.integers(1, 5, size=length), alphabet))
            self.assertGreaterEqual(h, 0.0)
            self.assertLessEqual(h, 1.0)
        uniform = np.mean([entropy(SymbolicSeries(rng.integers(1, 5, size=4096), alphabet))
                           for _ in range(20)])
        constant = entropy(SymbolicSeries(np.ones(4096), alphabet))
        self.assertGreaterEqual(uniform - constant, 0.5)

    def test_entropy_is_clamped_but_raw_ratio_is_kept(self):
        """Test that the entropy is clamped to 1 while the raw ratio is kept"""
        short = symbols('abcd')
        self.assertGreater(compression_ratio(short), 1.0)
        self.assertEqual(entropy(short), 1.0)

    def test_entropy_vector_of_identical_components(self):
        """Test that identical components get identical entropies"""
        values = np.random.default_rng(5).uniform(0, 10, size=120)
        vector = entropy_vector(MultiSeries.from_arrays('E1', [values, values, values]), Alphabet(4))
        self.assertEqual(len(set(vector.values.tolist())), 1)
        self.assertEqual(vector.entity_id, 'E1')

    def test_entropy_vector_of_constant_components(self):
        """Test the entropy vector of constant components"""
        vector = entropy_vector(MultiSeries.from_arrays('E1', [np.full(100, 3.0)] * 3), Alphabet(4))
        # 99 difference symbols: 13 full phrases plus one partial, 69 bits.
        assert_array_equal(vector.values, [69 / 198] * 3)

    def test_entropy_vector_is_order_equivariant(self):
        """Test that permuting components permutes the entropy vector"""
        rng = np.random.default_rng(9)
        arrays = [rng.uniform(0, 10, size=200), np.zeros(200), rng.integers(0, 3, size=200)]
        forward = entropy_vector(MultiSeries.from_arrays('E1', arrays), Alphabet(4))
        backward = entropy_vector(MultiSeries.from_arrays('E1', arrays[::-1]), Alphabet(4))
        assert_array_equal(forward.values, backward.values[::-1])

    def test_component_errors_carry_the_label(self):
        """Test that a component error carries the component label"""
        multi = MultiSeries.from_arrays('E7', [[1.0], [2.0]], ['tv', 'radio'])
        with self.assertRaises(AnalysisError) as caught:
            entropy_vector(multi, Alphabet(4), use_differencing=True)
        self.assertEqual(caught.exception.entity_id, 'E7')
        self.assertEqual(caught.exception.component, 'tv')

    def test_norms(self):
        """Test the Euclidean and L1 norms of an entropy vector"""
        self.assertAlmostEqual(norm_euclidean(EntropyVector([0.3, 0.4])), 0.5)
        self.assertAlmostEqual(norm_l1(EntropyVector([0.3, 0.4])), 0.7)
        self.assertEqual(norm_euclidean(EntropyVector([0, 0, 0])), 0.0)
        self.assertEqual(norm_l1(EntropyVector([0, 0, 0])), 0.0)
        self.assertEqual(norm_euclidean(EntropyVector([1, 1, 1, 1])), 2.0)
        self.assertEqual(norm_l1(EntropyVector([1, 1, 1, 1])), 4.0)

    @settings(max_examples=50)
    @given(st.lists(st.integers(1, 4), min_size=1, max_size=500))
    def test_entropy_always_in_unit_interval(self, values):
        """Test that entropy always lies in [0, 1]"""
        h = entropy(SymbolicSeries(values, Alphabet(4)))
        self.assertTrue(0.0 <= h <= 1.0)
