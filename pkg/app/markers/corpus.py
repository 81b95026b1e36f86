"""
Deterministic synthetic corpora shaped like weekly, non-negative, sparse
investment data (entity x time x component), written in the stacked layout.
"""
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd

from .artifacts import write_frame
from .exceptions import ConfigurationError
from .series import MultiSeries

logger = logging.getLogger(__name__)

CONSTANT = 'constant'
IID_UNIFORM = 'iid_uniform'
MARKOV = 'markov'
BURSTY_SPARSE = 'bursty_sparse'

# kind -> default parameter (None: the kind takes no parameter)
GENERATOR_DEFAULTS = {
    CONSTANT: None,
    IID_UNIFORM: None,
    MARKOV: 0.7,
    BURSTY_SPARSE: 0.25,
}

# Spending regimes visited by the Markov generator, as multiples of the level.
MARKOV_REGIMES = np.array([0.0, 0.5, 1.0, 2.0])


@dataclass(frozen=True)
class Generator:
    kind: str
    parameter: float = None

    def __str__(self):
        if self.parameter is None:
            return self.kind
        return f"{self.kind}:{self.parameter!r}"


@dataclass(frozen=True)
class CorpusSpec:
    entity_count: int
    component_count: int
    length: int
    generators: tuple
    seed: int
    level: float = 100.0


def parse_generator(text):
    """'kind' or 'kind:parameter', e.g. 'markov:0.8' or 'bursty_sparse:0.25'."""
    kind, _, raw = str(text).partition(':')
    kind = kind.strip()
    if kind not in GENERATOR_DEFAULTS:
        raise ConfigurationError(
            f"unknown generator {kind!r}; expected one of {', '.join(GENERATOR_DEFAULTS)}"
        )
    default = GENERATOR_DEFAULTS[kind]
    if default is None:
        if raw:
            raise ConfigurationError(f"generator {kind!r} takes no parameter")
        return Generator(kind)
    try:
        parameter = float(raw) if raw else default
    except ValueError:
        raise ConfigurationError(f"generator parameter {raw!r} is not a number")
    if not 0.0 <= parameter <= 1.0:
        raise ConfigurationError(f"generator {kind!r} parameter must lie in [0, 1], got {parameter}")
    return Generator(kind, parameter)


def corpus_spec(data):
    """Validated CorpusSpec from raw values."""
    from .serializers import CorpusSpecSerializer

    serializer = CorpusSpecSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigurationError("invalid corpus specification", errors=serializer.errors)
    return serializer.save()


def _markov(rng, length, stay, level):
    states = np.empty(length, dtype=np.int64)
    states[0] = rng.integers(MARKOV_REGIMES.size)
    moves = rng.random(length)
    jumps = rng.integers(1, MARKOV_REGIMES.size, size=length)
    for i in range(1, length):
        if moves[i] < stay:
            states[i] = states[i - 1]
        else:
            states[i] = (states[i - 1] + jumps[i]) % MARKOV_REGIMES.size
    return MARKOV_REGIMES[states] * level


def _bursty_sparse(rng, length, zero_density, level):
    values = rng.lognormal(mean=np.log(level), sigma=1.0, size=length)
    # Exactly round(density * t) zeros, so the density holds at any length.
    zeros = rng.choice(length, size=int(round(zero_density * length)), replace=False)
    values[zeros] = 0.0
    return values


def generate_component(generator, rng, length, level):
    if generator.kind == CONSTANT:
        values = np.full(length, level)
    elif generator.kind == IID_UNIFORM:
        values = rng.uniform(0.0, 2.0 * level, size=length)
    elif generator.kind == MARKOV:
        values = _markov(rng, length, generator.parameter, level)
    else:
        values = _bursty_sparse(rng, length, generator.parameter, level)
    return np.round(values, 2)


def generate_corpus(spec):
    """In-memory corpus; every (entity, component) stream has its own seed."""
    width = len(str(spec.entity_count))
    entities = []
    for e in range(spec.entity_count):
        arrays = [
            generate_component(generator, np.random.default_rng([spec.seed, e, c]), spec.length, spec.level)
            for c, generator in enumerate(spec.generators)
        ]
        entities.append(MultiSeries.from_arrays(
            f"E{e + 1:0{width}d}",
            arrays,
            [f"c{c + 1}" for c in range(spec.component_count)],
        ))
    return entities


def stacked_frame(entities):
    """entity_id, time, component, value rows (values as exact round-trip text)."""
    rows = []
    for multi in entities:
        for t in range(multi.length):
            for component in multi.components:
                rows.append((multi.entity_id, t, component.label, repr(float(component.values[t]))))
    return pd.DataFrame(rows, columns=['entity_id', 'time', 'component', 'value'])


def generate(spec, out_path):
    entities = generate_corpus(spec)
    write_frame(stacked_frame(entities), out_path)
    logger.info(
        f"Generated {spec.entity_count} entities x {spec.component_count} components "
        f"x {spec.length} steps into {out_path}"
    )
    return entities
