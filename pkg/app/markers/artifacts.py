"""
Output artifacts: JSON reports, CSV tables and SVG files.

Every write goes to a temporary file in the target directory and is then
renamed over the target, so readers never see a half-written artifact.
"""
import logging
import os
from pathlib import Path
import tempfile

import pandas as pd
from rest_framework.renderers import JSONRenderer

from .exceptions import DataError

logger = logging.getLogger(__name__)

JSON_INDENT = 2


def write_text(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as handle:
                handle.write(text)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}")
    logger.debug(f"Wrote {path}")
    return path


def frame_text(frame):
    return frame.to_csv(index=False, lineterminator='\n')


def write_frame(frame, path):
    return write_text(path, frame_text(frame))


def render_json(data):
    """Indented JSON text of serializer output (DRF renderer, trailing newline)."""
    rendered = JSONRenderer().render(data, renderer_context={'indent': JSON_INDENT})
    return rendered.decode('utf-8') + '\n'


def write_json(data, path):
    return write_text(path, render_json(data))


def _vector_text(values):
    return ';'.join(repr(float(v)) for v in values)


def summary_frame(summary):
    """One row per analyzed entity, in input order."""
    rows = []
    for report in summary.reports:
        trend = report.trend
        rows.append({
            'entity_id': report.entity_id,
            'leading': report.leading,
            'trend_leading_last': trend.leading_last if trend is not None else '',
            'trend_direction': _vector_text(trend.direction) if trend is not None else '',
            'diversification': report.diversification.value,
            'category': report.diversification.category,
            'verdict': report.attribution.status if report.attribution is not None else '',
            'grand_total': report.grand_total,
            'norm_euclidean': report.norm_euclidean,
            'norm_l1': report.norm_l1,
        })
    return pd.DataFrame(rows, columns=[
        'entity_id', 'leading', 'trend_leading_last', 'trend_direction', 'diversification',
        'category', 'verdict', 'grand_total', 'norm_euclidean', 'norm_l1',
    ])


def failures_frame(failures):
    return pd.DataFrame(
        [(f.entity_id, f.kind, f.message, f.component or '') for f in failures],
        columns=['entity_id', 'kind', 'message', 'component'],
    )


def diversification_frame(entries):
    """Diversification with the per-component Zipf coefficients behind it.

    `entries` are (entity_id, Diversification) pairs.
    """
    entries = list(entries)
    width = max((len(div.per_component_rho) for _, div in entries), default=0)
    rows = []
    for entity_id, div in entries:
        row = {'entity_id': entity_id, 'diversification': div.value, 'category': div.category}
        for j in range(width):
            row[f"rho_{j + 1}"] = div.per_component_rho[j] if j < len(div.per_component_rho) else None
        row['degenerate'] = div.degenerate
        rows.append(row)
    columns = ['entity_id', 'diversification', 'category']
    columns += [f"rho_{j + 1}" for j in range(width)] + ['degenerate']
    return pd.DataFrame(rows, columns=columns)


def entropy_vs_total_frame(summary):
    """Euclidean entropy norm against the normalized grand total, by increasing total."""
    frame = pd.DataFrame(
        [(p.entity_id, p.grand_total, p.grand_total_normalized, p.norm_euclidean)
         for p in summary.entropy_vs_total],
        columns=['entity_id', 'grand_total', 'grand_total_normalized', 'norm_euclidean'],
    )
    return frame.sort_values(['grand_total_normalized', 'entity_id'], kind='mergesort').reset_index(drop=True)


def walk_frame(starts, entropy_walk):
    """Window index, start offset and simplex coordinates of every walk point."""
    rows = []
    for index, (start, point) in enumerate(zip(starts, entropy_walk.points), start=1):
        row = {'window': index, 'start': start}
        for j, value in enumerate(point.barycentric(), start=1):
            row[f"b{j}"] = float(value)
        rows.append(row)
    return pd.DataFrame(rows)
