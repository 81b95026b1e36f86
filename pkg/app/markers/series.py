"""
Core series types, differencing, sparsity detection and symbolization.

A measured series is translated into a finite alphabet by a uniform
partition of its range: with w = (max - min) / L, symbol l covers
[min + (l-1)w, min + lw), and the last interval is closed at the maximum.
"""
from dataclasses import dataclass, field
import logging
import string

import numpy as np

from .exceptions import AnalysisError, ConfigurationError, DataError

logger = logging.getLogger(__name__)

DEFAULT_SPARSITY_DELTA = 0.25


def _frozen(values, dtype):
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Series:
    """One component: ordered real measurements plus the component name."""

    values: np.ndarray
    label: str = ''

    def __post_init__(self):
        values = _frozen(self.values, float)
        if values.ndim != 1 or values.size < 1:
            raise DataError("series must hold at least one value", component=self.label or None)
        if not np.all(np.isfinite(values)):
            raise DataError("series values must be finite", component=self.label or None)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return int(self.values.size)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MultiSeries:
    """N aligned components measured on one entity."""

    components: tuple
    entity_id: str

    def __post_init__(self):
        components = tuple(self.components)
        if len(components) < 2:
            raise DataError("a multi-series needs at least 2 components", entity_id=self.entity_id)
        lengths = {len(component) for component in components}
        if len(lengths) != 1:
            raise DataError(
                f"component lengths differ: {sorted(lengths)}", entity_id=self.entity_id
            )
        object.__setattr__(self, 'components', components)

    @classmethod
    def from_arrays(cls, entity_id, arrays, labels=None):
        labels = labels or [str(i + 1) for i in range(len(arrays))]
        return cls(
            components=tuple(Series(values, label) for values, label in zip(arrays, labels)),
            entity_id=entity_id,
        )

    @property
    def dimension(self):
        return len(self.components)

    @property
    def length(self):
        return len(self.components[0])

    @property
    def labels(self):
        return [component.label for component in self.components]

    def matrix(self):
        return np.vstack([component.values for component in self.components])

    def grand_total(self):
        """Sum of every raw measurement across components and time."""
        return float(self.matrix().sum())

    def slice(self, start, stop):
        """Time range [start, stop) of every component, as a new multi-series."""
        return MultiSeries(
            components=tuple(
                Series(component.values[start:stop], component.label)
                for component in self.components
            ),
            entity_id=self.entity_id,
        )

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return self.entity_id == other.entity_id and self.components == other.components

    __hash__ = None


@dataclass(frozen=True)
class Alphabet:
    size: int = 4

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 2:
            raise ConfigurationError(f"alphabet size must be an integer >= 2, got {self.size}")

    @property
    def symbol_bits(self):
        """ceil(log2 L): bits spent on one extension symbol."""
        return (self.size - 1).bit_length()

    def letter(self, symbol):
        # a = large decrement ... last letter = huge increment
        if self.size <= len(string.ascii_lowercase):
            return string.ascii_lowercase[symbol - 1]
        return str(symbol)


@dataclass(frozen=True, eq=False)
class SymbolicSeries:
    symbols: np.ndarray
    alphabet: Alphabet = field(default_factory=Alphabet)

    def __post_init__(self):
        symbols = _frozen(self.symbols, np.int64)
        if symbols.ndim != 1:
            raise DataError("symbolic series must be one-dimensional")
        if symbols.size and (symbols.min() < 1 or symbols.max() > self.alphabet.size):
            raise DataError(f"symbols must lie in [1, {self.alphabet.size}]")
        object.__setattr__(self, 'symbols', symbols)

    def __len__(self):
        return int(self.symbols.size)

    def window(self, start, length):
        return SymbolicSeries(self.symbols[start:start + length], self.alphabet)

    def text(self):
        return ''.join(self.alphabet.letter(int(s)) for s in self.symbols)

    def __eq__(self, other):
        if not isinstance(other, SymbolicSeries):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.symbols, other.symbols)

    __hash__ = None


@dataclass(frozen=True)
class SparsityProfile:
    null_count: int
    length: int
    threshold_delta: float
    is_sparse: bool


def difference(series):
    """Difference series d_j = y_{j+1} - y_j."""
    if len(series) < 2:
        raise AnalysisError("cannot difference a series of length 1", component=series.label or None)
    return Series(np.diff(series.values), series.label)


def sparsity(series, delta=DEFAULT_SPARSITY_DELTA):
    """A series is sparse when its exact zeros are at least length * delta."""
    if not 0.0 <= delta <= 1.0:
        raise ConfigurationError(f"sparsity delta must lie in [0, 1], got {delta}")
    null_count = int(np.count_nonzero(series.values == 0.0))
    length = len(series)
    return SparsityProfile(
        null_count=null_count,
        length=length,
        threshold_delta=float(delta),
        is_sparse=bool(null_count >= length * delta),
    )


def symbolize(series, alphabet):
    """Translate a series into symbols 1..L by uniform partition of its range."""
    values = series.values
    low, high = values.min(), values.max()
    if high == low:
        # Constant series: the partition is undefined, everything is symbol 1.
        return SymbolicSeries(np.ones(values.size, dtype=np.int64), alphabet)
    fraction = (values - low) / (high - low)
    symbols = np.floor(fraction * alphabet.size).astype(np.int64) + 1
    np.clip(symbols, 1, alphabet.size, out=symbols)
    return SymbolicSeries(symbols, alphabet)


def analysis_series(series, use_differencing):
    """The series the symbolic analysis runs on (difference series when enabled)."""
    return difference(series) if use_differencing else series
