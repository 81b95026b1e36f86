"""
Marker assembly: one report per entity, one summary per collection.

The three markers are the leading component of the complete series, the
trend of the entropy walk and the diversification. Reports also carry the
entropy vector and its norms, the grand total of the raw measurements and
the sparsity profile of every component.
"""
from collections import Counter
from dataclasses import dataclass
import logging
import math

import numpy as np

from .entropy import COST_RULE, PARSE_RULE, entropy_vector, norm_euclidean, norm_l1
from .exceptions import AnalysisError, DataError, MarkersError
from .series import sparsity
from .simplex import influence, project
from .walk import (
    OUTSIDE_CHANGED_LEADING,
    OUTSIDE_SAME_LEADING,
    WITHIN,
    attribute,
    fit_trend,
    moving_matrix,
    walk,
)
from .zipf import CATEGORIES, diversification, diversification_from_rhos

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 2
CONSISTENCY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class MarkerReport:
    entity_id: str
    labels: tuple
    leading: int
    trend: object
    diversification: object
    entropy_vector: object
    norm_euclidean: float
    norm_l1: float
    grand_total: float
    sparsity: tuple
    config_echo: dict
    walk: object
    window_starts: tuple = ()
    trend_error: object = None
    attribution: object = None
    holdout_point: object = None
    parse_rule: str = PARSE_RULE
    cost_rule: str = COST_RULE

    @property
    def schema_version(self):
        return SCHEMA_VERSION

    @property
    def dimension(self):
        return len(self.labels)


@dataclass(frozen=True)
class EntityFailure:
    entity_id: str
    kind: str
    message: str
    component: str = None

    @classmethod
    def from_error(cls, entity_id, error):
        component = None if error.component is None else str(error.component)
        return cls(entity_id=entity_id, kind=error.kind, message=error.message, component=component)


@dataclass(frozen=True)
class TotalPoint:
    entity_id: str
    grand_total: float
    grand_total_normalized: float
    norm_euclidean: float


@dataclass(frozen=True)
class CollectionSummary:
    reports: tuple
    failures: tuple
    within_walk_fraction: float
    attributed_count: int
    within_count: int
    changed_leading_count: int
    same_leading_count: int
    diversification_category_histogram: dict
    entropy_vs_total: tuple
    config_echo: dict


def holdout_length(config):
    """Raw points needed for one holdout window of the configured length."""
    return config.window_length + config.differencing_offset


def check_holdout(holdout, multi, config):
    if holdout.dimension != multi.dimension:
        raise DataError(
            f"holdout has {holdout.dimension} components, series has {multi.dimension}",
            entity_id=multi.entity_id,
        )
    window = holdout.length - config.differencing_offset
    if window != config.window_length:
        raise DataError(
            f"holdout window length {window} does not match window length {config.window_length}",
            entity_id=multi.entity_id,
        )


def split_holdout(multi, config):
    """Analysis range and holdout window taken from the tail of a series.

    The analysis range drops the last `window_step` raw points; the holdout is
    the last window of the full series, i.e. the next window of the walk.
    """
    needed = holdout_length(config)
    if multi.length - config.window_step < needed or multi.length < needed:
        raise DataError(
            f"series of length {multi.length} is too short to hold out a window of {needed} points",
            entity_id=multi.entity_id,
        )
    training = multi.slice(0, multi.length - config.window_step)
    holdout = multi.slice(multi.length - needed, multi.length)
    return training, holdout


def split_collection(entities, config):
    """Analysis ranges and holdout windows for every entity long enough to split.

    Returns the analysis ranges, a holdout map keyed by entity_id and one
    EntityFailure per entity that could not be split.
    """
    training, holdout, failures = [], {}, []
    for multi in entities:
        try:
            analysis, window = split_holdout(multi, config)
        except MarkersError as exc:
            failure = EntityFailure.from_error(multi.entity_id, exc)
            logger.warning(f"Entity {failure.entity_id} failed ({failure.kind}): {failure.message}")
            failures.append(failure)
            continue
        training.append(analysis)
        holdout[multi.entity_id] = window
    return training, holdout, failures


def optional_trend(entropy_walk, matrix):
    """Trend of the walk, or None and the failure that left it undefined.

    A stationary or single-window walk has no trend; the other markers of the
    entity are still well defined.
    """
    try:
        return fit_trend(entropy_walk, matrix), None
    except AnalysisError as exc:
        logger.info(f"No trend for {matrix.entity_id}: {exc.message}")
        return None, EntityFailure.from_error(matrix.entity_id, exc)


def analyze_entity(multi, config, holdout=None):
    """Full pipeline for one multi-series; deterministic for a fixed config."""
    alphabet = config.alphabet()
    try:
        vector = entropy_vector(multi, alphabet, config.differencing)
        verdict = influence(vector)
        matrix = moving_matrix(multi, alphabet, config.differencing, config.window_scheme(),
                               config.symbolization_mode)
        entropy_walk = walk(matrix)
        trend, trend_error = optional_trend(entropy_walk, matrix)
        div = diversification(multi, alphabet, config.differencing, config.word_length,
                              config.equivalence, config.rare_threshold)
        profiles = tuple(sparsity(component, config.sparsity_delta) for component in multi.components)
        verdict_q = point_q = None
        if holdout is not None:
            check_holdout(holdout, multi, config)
            q_vector = entropy_vector(holdout, alphabet, config.differencing)
            point_q = project(q_vector)
            if trend is not None:
                verdict_q = attribute(point_q, trend, q_vector)
    except MarkersError as exc:
        raise exc.with_context(entity_id=multi.entity_id)

    logger.info(
        f"Analyzed {multi.entity_id}: leading={verdict.leading} "
        f"D={div.value:.4f} ({div.category})"
    )
    return MarkerReport(
        entity_id=multi.entity_id,
        labels=tuple(multi.labels),
        leading=verdict.leading,
        trend=trend,
        diversification=div,
        entropy_vector=vector,
        norm_euclidean=norm_euclidean(vector),
        norm_l1=norm_l1(vector),
        grand_total=multi.grand_total(),
        sparsity=profiles,
        config_echo=config.echo(),
        walk=entropy_walk,
        window_starts=matrix.starts,
        trend_error=trend_error,
        attribution=verdict_q,
        holdout_point=point_q,
    )


def normalized_totals(totals):
    """Min-max normalization to [0, 1]; a constant collection maps to 0."""
    totals = np.asarray(totals, dtype=float)
    if totals.size == 0:
        return totals
    low, high = totals.min(), totals.max()
    if high == low:
        return np.zeros_like(totals)
    return (totals - low) / (high - low)


def summarize(reports, failures, config):
    """Deterministic fold of per-entity reports into the collection summary."""
    reports = tuple(reports)
    verdicts = [r.attribution for r in reports if r.attribution is not None]
    statuses = Counter(v.status for v in verdicts)
    histogram = Counter(r.diversification.category for r in reports)
    normalized = normalized_totals([r.grand_total for r in reports])
    return CollectionSummary(
        reports=reports,
        failures=tuple(failures),
        within_walk_fraction=(statuses[WITHIN] / len(verdicts)) if verdicts else None,
        attributed_count=len(verdicts),
        within_count=statuses[WITHIN],
        changed_leading_count=statuses[OUTSIDE_CHANGED_LEADING],
        same_leading_count=statuses[OUTSIDE_SAME_LEADING],
        diversification_category_histogram={c: histogram.get(c, 0) for c in CATEGORIES},
        entropy_vs_total=tuple(
            TotalPoint(r.entity_id, r.grand_total, float(n), r.norm_euclidean)
            for r, n in zip(reports, normalized)
        ),
        config_echo=config.echo(),
    )


def analyze_collection(entities, config, holdout=None, parallel=False, failures=()):
    """Reports for every entity; failures are recorded per entity, never fatal.

    `failures` carries entities that were rejected before analysis, e.g. by
    split_collection; they lead the failure list of the summary.

    `holdout` maps entity_id to its holdout multi-series. With `parallel` the
    entities are dispatched as Celery tasks; results come back in input order.
    """
    entities = list(entities)
    holdout = holdout or {}
    if parallel:
        from .tasks import dispatch_collection

        outcomes = dispatch_collection(entities, config, holdout)
    else:
        outcomes = []
        for multi in entities:
            try:
                outcomes.append(analyze_entity(multi, config, holdout.get(multi.entity_id)))
            except MarkersError as exc:
                outcomes.append(EntityFailure.from_error(multi.entity_id, exc))

    reports, failures = [], list(failures)
    for outcome in outcomes:
        if isinstance(outcome, EntityFailure):
            logger.warning(f"Entity {outcome.entity_id} failed ({outcome.kind}): {outcome.message}")
            failures.append(outcome)
        else:
            reports.append(outcome)
    logger.info(f"Analyzed collection: {len(reports)} report(s), {len(failures)} failure(s)")
    return summarize(reports, failures, config)


def consistency_errors(report, multi, config):
    """Every derived field recomputed from the raw inputs; returns the mismatches."""
    errors = []
    recomputed = entropy_vector(multi, config.alphabet(), config.differencing)
    if not np.array_equal(recomputed.values, report.entropy_vector.values):
        errors.append('entropy_vector')
    if influence(report.entropy_vector).leading != report.leading:
        errors.append('leading')
    if not math.isclose(norm_euclidean(recomputed), report.norm_euclidean,
                        rel_tol=0.0, abs_tol=CONSISTENCY_TOLERANCE):
        errors.append('norm_euclidean')
    if not math.isclose(norm_l1(recomputed), report.norm_l1, rel_tol=0.0, abs_tol=CONSISTENCY_TOLERANCE):
        errors.append('norm_l1')
    if diversification_from_rhos(report.diversification.per_component_rho).value != report.diversification.value:
        errors.append('diversification')
    if not math.isclose(float(multi.matrix().sum()), report.grand_total, rel_tol=1e-12, abs_tol=0.0):
        errors.append('grand_total')
    if report.config_echo != config.echo():
        errors.append('config_echo')
    if (report.trend is None) == (report.trend_error is None):
        errors.append('trend')
    if report.trend is None and report.attribution is not None:
        errors.append('attribution')
    return errors
