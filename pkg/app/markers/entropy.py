"""
Compression-based information content and entropy of symbolic sequences.

The compressor is an incremental dictionary parse: each new phrase is the
longest phrase already in the dictionary extended by one symbol. The k-th
phrase costs ceil(log2 k) bits for its prefix index plus ceil(log2 L) bits
for the extension symbol, and the entropy is the cost per symbol normalized
by log2 L, clamped at 1.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from .exceptions import AnalysisError, MarkersError
from .series import analysis_series, symbolize

logger = logging.getLogger(__name__)

PARSE_RULE = 'lz78-incremental'
COST_RULE = 'ceil(log2 k) + ceil(log2 L) bits per phrase'


def phrase_cost(k, alphabet):
    """Bits spent on the k-th phrase (k >= 1)."""
    return (k - 1).bit_length() + alphabet.symbol_bits


@dataclass(frozen=True)
class ParseResult:
    # (prefix_index, extension_symbol); prefix 0 is the empty phrase.
    phrases: tuple
    alphabet: object
    length: int
    partial: bool

    @property
    def phrase_count(self):
        return len(self.phrases)

    @property
    def bit_cost(self):
        return sum(phrase_cost(k, self.alphabet) for k in range(1, self.phrase_count + 1))

    def decode(self):
        """Rebuild the parsed sequence from its phrases."""
        dictionary = [()]
        output = []
        for prefix_index, symbol in self.phrases:
            entry = dictionary[prefix_index] + (symbol,)
            dictionary.append(entry)
            output.extend(entry)
        return np.array(output, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class EntropyVector:
    values: np.ndarray
    entity_id: str = ''
    raw_values: np.ndarray = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise AnalysisError("entropy vector must be a non-empty 1-d array", entity_id=self.entity_id)
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise AnalysisError("entropy values must lie in [0, 1]", entity_id=self.entity_id)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        raw = values if self.raw_values is None else np.array(self.raw_values, dtype=float)
        raw.setflags(write=False)
        object.__setattr__(self, 'raw_values', raw)

    @property
    def dimension(self):
        return int(self.values.size)

    def __eq__(self, other):
        if not isinstance(other, EntropyVector):
            return NotImplemented
        return self.entity_id == other.entity_id and np.array_equal(self.values, other.values)

    __hash__ = None


def lz_parse(sequence):
    """Incremental dictionary parse of a symbolic sequence."""
    if len(sequence) == 0:
        raise AnalysisError("cannot parse an empty sequence")
    children = {}
    phrases = []
    node = 0
    for symbol in sequence.symbols.tolist():
        child = children.get((node, symbol))
        if child is not None:
            node = child
            continue
        phrases.append((node, symbol))
        children[(node, symbol)] = len(phrases)
        node = 0
    partial = node != 0
    if partial:
        # The tail repeats phrase `node`; it is emitted again with the same pair.
        phrases.append(phrases[node - 1])
    return ParseResult(
        phrases=tuple(phrases),
        alphabet=sequence.alphabet,
        length=len(sequence),
        partial=partial,
    )


def compression_ratio(sequence):
    """Unclamped bit cost per symbol, normalized by log2 L."""
    parse = lz_parse(sequence)
    return parse.bit_cost / (parse.length * math.log2(sequence.alphabet.size))


def entropy(sequence):
    return min(1.0, compression_ratio(sequence))


def entropy_of_sequences(sequences, entity_id=''):
    """Entropy vector of already symbolized components, in order."""
    raw = []
    for index, sequence in enumerate(sequences, start=1):
        try:
            raw.append(compression_ratio(sequence))
        except MarkersError as exc:
            raise exc.with_context(entity_id=entity_id, component=index)
    raw = np.array(raw, dtype=float)
    return EntropyVector(np.minimum(raw, 1.0), entity_id=entity_id, raw_values=raw)


def symbolic_components(multi, alphabet, use_differencing):
    """difference? then symbolize, for each component of a multi-series."""
    sequences = []
    for component in multi.components:
        try:
            sequences.append(symbolize(analysis_series(component, use_differencing), alphabet))
        except MarkersError as exc:
            raise exc.with_context(entity_id=multi.entity_id, component=component.label)
    return sequences


def entropy_vector(multi, alphabet, use_differencing=True):
    sequences = symbolic_components(multi, alphabet, use_differencing)
    vector = entropy_of_sequences(sequences, entity_id=multi.entity_id)
    logger.debug(f"Entropy vector for {multi.entity_id}: {vector.values.tolist()}")
    return vector


def norm_euclidean(vector):
    return float(np.sqrt(np.sum(np.square(vector.values))))


def norm_l1(vector):
    return float(np.sum(vector.values))
