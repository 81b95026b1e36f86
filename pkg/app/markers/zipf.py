"""
Rank-frequency word statistics and the diversification marker.

Words of length p are read with a step-1 sliding window. In composition mode
two words are the same class when they hold the same number of each symbol,
so a class is the count vector (n_1, ..., n_L). The Zipf coefficient is the
least-squares slope of log frequency against log rank over the non-rare
classes; diversification is 1 + mean(rho_j) over the components.
"""
from collections import Counter
from dataclasses import dataclass
import logging
import math

import numpy as np
import pandas as pd

from .entropy import symbolic_components
from .exceptions import AnalysisError, ConfigurationError, MarkersError

logger = logging.getLogger(__name__)

EXACT = 'exact'
COMPOSITION = 'composition'
EQUIVALENCES = (EXACT, COMPOSITION)

DEFAULT_RARE_THRESHOLD = 0.01

HIGHLY_DIVERSIFIED = 'highly_diversified'
RICH = 'rich'
TOTALLY_UNBALANCED = 'totally_unbalanced'
INTERMEDIATE = 'intermediate'
CATEGORIES = (HIGHLY_DIVERSIFIED, RICH, TOTALLY_UNBALANCED, INTERMEDIATE)


@dataclass(frozen=True)
class WordCensus:
    # (class_id, count, frequency), most frequent first; rank = position + 1
    classes: tuple
    word_length: int
    equivalence: str
    total_words: int
    alphabet: object

    @property
    def class_count(self):
        return len(self.classes)

    def counts(self):
        return np.array([count for _, count, _ in self.classes], dtype=float)

    def frequencies(self):
        return np.array([frequency for _, _, frequency in self.classes], dtype=float)


@dataclass(frozen=True)
class ZipfFit:
    rho: float
    points_used: int
    rare_threshold: float
    degenerate: bool = False


@dataclass(frozen=True)
class ComponentDiversification:
    fit: ZipfFit
    class_count: int
    class_space: int


@dataclass(frozen=True)
class Diversification:
    value: float
    per_component_rho: tuple
    category: str
    components: tuple = ()

    @property
    def degenerate(self):
        return any(component.fit.degenerate for component in self.components)


def composition_class_space(alphabet_size, word_length):
    """Number of count vectors (n_1..n_L) summing to p (stars and bars)."""
    return math.comb(word_length + alphabet_size - 1, alphabet_size - 1)


def word_census(sequence, word_length, equivalence=COMPOSITION):
    if equivalence not in EQUIVALENCES:
        raise ConfigurationError(f"unknown equivalence {equivalence!r}")
    length = len(sequence)
    if word_length < 1 or word_length >= length:
        raise AnalysisError(f"word length {word_length} must satisfy 1 <= p < {length}")
    words = np.lib.stride_tricks.sliding_window_view(sequence.symbols, word_length)
    if equivalence == EXACT:
        keys = words.tolist()
    else:
        symbols = np.arange(1, sequence.alphabet.size + 1)
        keys = (words[:, :, None] == symbols).sum(axis=1).tolist()
    counter = Counter(map(tuple, keys))
    total = len(keys)
    ordered = sorted(counter.items(), key=lambda item: (-item[1], item[0]))
    return WordCensus(
        classes=tuple((class_id, count, count / total) for class_id, count in ordered),
        word_length=word_length,
        equivalence=equivalence,
        total_words=total,
        alphabet=sequence.alphabet,
    )


def rank_frequency_slope(values):
    """Least-squares slope of log(value) on log(rank) for values listed by rank 1..n."""
    values = np.asarray(values, dtype=float)
    y = np.log(values)
    if np.ptp(y) == 0.0:
        return 0.0
    x = np.log(np.arange(1, values.size + 1, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def zipf_coefficient(census, rare_threshold=DEFAULT_RARE_THRESHOLD):
    if census.class_count == 0:
        raise AnalysisError("empty census")
    frequencies = census.frequencies()
    # Sorted by frequency, so the survivors are exactly ranks 1..m.
    survivors = frequencies[frequencies >= rare_threshold]
    if survivors.size < 2:
        logger.warning(
            f"Degenerate Zipf fit: {survivors.size} class(es) at or above {rare_threshold}"
        )
        return ZipfFit(rho=0.0, points_used=int(survivors.size), rare_threshold=rare_threshold,
                       degenerate=True)
    return ZipfFit(
        rho=rank_frequency_slope(survivors),
        points_used=int(survivors.size),
        rare_threshold=rare_threshold,
    )


def categorize(value):
    if value > 1.0:
        return INTERMEDIATE
    if value > 0.8:
        return HIGHLY_DIVERSIFIED
    if value > 0.0:
        return RICH
    return TOTALLY_UNBALANCED


def diversification_from_rhos(rhos, components=()):
    rhos = tuple(float(rho) for rho in rhos)
    value = 1.0 + math.fsum(rhos) / len(rhos)
    return Diversification(
        value=value,
        per_component_rho=rhos,
        category=categorize(value),
        components=tuple(components),
    )


def component_censuses(multi, alphabet, use_differencing, word_length, equivalence):
    censuses = []
    for component, sequence in zip(multi.components,
                                   symbolic_components(multi, alphabet, use_differencing)):
        try:
            censuses.append(word_census(sequence, word_length, equivalence))
        except MarkersError as exc:
            raise exc.with_context(entity_id=multi.entity_id, component=component.label)
    return censuses


def diversification(multi, alphabet, use_differencing=True, word_length=12,
                    equivalence=COMPOSITION, rare_threshold=DEFAULT_RARE_THRESHOLD):
    components = []
    for census in component_censuses(multi, alphabet, use_differencing, word_length, equivalence):
        components.append(ComponentDiversification(
            fit=zipf_coefficient(census, rare_threshold),
            class_count=census.class_count,
            class_space=(composition_class_space(alphabet.size, word_length)
                         if equivalence == COMPOSITION else alphabet.size ** word_length),
        ))
    return diversification_from_rhos([c.fit.rho for c in components], components)


def class_label(class_id, census):
    if census.equivalence == EXACT:
        return ''.join(census.alphabet.letter(symbol) for symbol in class_id)
    return '(' + ','.join(str(n) for n in class_id) + ')'


def census_frame(census):
    """rank, class_id, count, frequency, one row per class."""
    return pd.DataFrame({
        'rank': np.arange(1, census.class_count + 1),
        'class_id': [class_label(class_id, census) for class_id, _, _ in census.classes],
        'count': [count for _, count, _ in census.classes],
        'frequency': census.frequencies(),
    })


def rank_frequency_frame(census):
    """Bilogarithmic rank-frequency points for external plotting."""
    ranks = np.arange(1, census.class_count + 1, dtype=float)
    frequencies = census.frequencies()
    return pd.DataFrame({
        'rank': ranks.astype(int),
        'frequency': frequencies,
        'log10_rank': np.log10(ranks),
        'log10_frequency': np.log10(frequencies),
    })
