"""
CSV ingestion.

stacked: one file, header entity_id,time,component,value (canonical for
         collections).
wide:    one file per entity, a time column plus one column per component.

Missing cells and missing (entity, time, component) rows become 0.0, which
also pads shorter components with trailing zeros; every fill is logged.
"""
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from .exceptions import ConfigurationError, DataError, ParseError
from .series import MultiSeries

logger = logging.getLogger(__name__)

STACKED = 'stacked'
WIDE = 'wide'
LAYOUTS = (STACKED, WIDE)
STACKED_COLUMNS = ['entity_id', 'time', 'component', 'value']

# header is line 1, the first data row is line 2
FIRST_DATA_LINE = 2


def _read(path):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such data file: {path}")
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot read {path}: {e}")


def _first_line(mask):
    return int(np.flatnonzero(mask.to_numpy())[0]) + FIRST_DATA_LINE


def _numbers(frame, column):
    """Parse a column exactly; empty cells are reported as missing (NaN)."""
    text = frame[column].str.strip()
    missing = text == ''
    parsed = pd.to_numeric(text.where(~missing), errors='coerce')
    bad = parsed.isna() & ~missing
    if bad.any():
        line = _first_line(bad)
        cell = frame[column].iloc[line - FIRST_DATA_LINE]
        raise ParseError(f"line {line}: non-numeric {column} value {cell!r}", line=line)
    return text.where(~missing, 'nan').map(float)


def _times(frame, column):
    times = _numbers(frame, column)
    bad = times.isna() | (times < 0) | (times != np.floor(times))
    if bad.any():
        line = _first_line(bad)
        raise ParseError(f"line {line}: time must be a non-negative integer index", line=line)
    return times.astype(np.int64)


def _fill(entity_id, table):
    """Zero-fill missing cells of a time x component table, logging what was filled."""
    filled = int(table.isna().to_numpy().sum())
    if filled:
        logger.warning(f"Entity {entity_id}: padded {filled} missing cell(s) with 0.0")
    return table.fillna(0.0)


def read_stacked(path):
    frame = _read(path)
    missing_columns = [c for c in STACKED_COLUMNS if c not in frame.columns]
    if missing_columns:
        raise ParseError(f"{path}: missing column(s) {', '.join(missing_columns)}", line=1)
    if frame.empty:
        raise DataError(f"no entities in {path}: no data rows")
    frame = frame.assign(time=_times(frame, 'time'), value=_numbers(frame, 'value'))
    duplicated = frame.duplicated(['entity_id', 'time', 'component'], keep='first')
    if duplicated.any():
        line = _first_line(duplicated)
        row = frame.iloc[line - FIRST_DATA_LINE]
        raise DataError(
            f"line {line}: duplicate row for entity {row.entity_id}, time {row.time}, "
            f"component {row.component}",
            entity_id=row.entity_id,
        )
    components = list(dict.fromkeys(frame['component']))
    entities = []
    for entity_id, rows in frame.groupby('entity_id', sort=False):
        table = rows.pivot(index='time', columns='component', values='value')
        table = table.reindex(index=range(int(rows['time'].max()) + 1), columns=components)
        table = _fill(entity_id, table)
        entities.append(MultiSeries.from_arrays(
            str(entity_id),
            [table[c].to_numpy(dtype=float) for c in components],
            [str(c) for c in components],
        ))
    logger.info(f"Ingested {len(entities)} entities from {path}")
    return entities


def read_wide(path, entity_id=None, time_column='time'):
    frame = _read(path)
    if time_column not in frame.columns:
        raise ParseError(f"{path}: missing column {time_column}", line=1)
    entity_id = entity_id or Path(path).stem
    if frame.empty:
        raise DataError(f"no entities in {path}: no data rows")
    times = _times(frame, time_column)
    if times.duplicated().any():
        line = _first_line(times.duplicated())
        raise DataError(f"line {line}: duplicate time {times.iloc[line - FIRST_DATA_LINE]}",
                        entity_id=entity_id)
    components = [c for c in frame.columns if c != time_column]
    table = pd.DataFrame({c: _numbers(frame, c).to_numpy() for c in components}, index=times.to_numpy())
    table = _fill(entity_id, table.sort_index().reindex(range(int(times.max()) + 1)))
    return [MultiSeries.from_arrays(
        entity_id,
        [table[c].to_numpy(dtype=float) for c in components],
        [str(c) for c in components],
    )]


def ingest(path, layout=STACKED, entity_id=None):
    if layout == STACKED:
        return read_stacked(path)
    if layout == WIDE:
        return read_wide(path, entity_id=entity_id)
    raise ConfigurationError(f"unknown layout {layout!r}; expected one of {', '.join(LAYOUTS)}")
