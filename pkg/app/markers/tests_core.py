from pathlib import Path
import tempfile
from unittest.mock import patch

from django.test import SimpleTestCase, override_settings
import numpy as np
from rest_framework.exceptions import ValidationError

from markers.artifacts import render_json, summary_frame
from markers.config import (
    AnalysisConfig,
    default_config,
    dump_config,
    load_config,
    parse_config_text,
    validate_config,
)
from markers.core import (
    SCHEMA_VERSION,
    EntityFailure,
    analyze_collection,
    analyze_entity,
    check_holdout,
    consistency_errors,
    normalized_totals,
    split_collection,
    split_holdout,
)
from markers.corpus import corpus_spec, generate_corpus
from markers.entropy import PARSE_RULE
from markers.exceptions import ConfigurationError, DataError
from markers.series import MultiSeries
from markers.plots import report_walk_svg
from markers.serializers import (
    CollectionSummarySerializer,
    MarkerReportSerializer,
    report_from_payload,
)
from markers.walk import COLINEAR_TOLERANCE
from markers.zipf import CATEGORIES


def corpus(entity_count=3, generators=('bursty_sparse',), length=585, seed=7):
    return generate_corpus(corpus_spec({
        'entity_count': entity_count,
        'component_count': 3,
        'length': length,
        'generators': list(generators),
        'seed': seed,
    }))


def uniform_entity(entity_id='U1'):
    """Three i.i.d. uniform components; every window clamps to full entropy."""
    return MultiSeries.from_arrays(
        entity_id, [np.random.default_rng([7, 0, c]).uniform(0, 200, 585) for c in range(3)],
    )


class ConfigTestCase(SimpleTestCase):
    """Test cases for analysis configuration"""

    def test_defaults_come_from_settings(self):
        """Test that the defaults come from settings"""
        self.assertEqual(default_config(), AnalysisConfig())

    @override_settings(MARKERS={**AnalysisConfig().echo(), 'alphabet_size': 6})
    def test_settings_override_defaults(self):
        """Test that settings override the defaults"""
        self.assertEqual(default_config().alphabet_size, 6)

    def test_file_round_trip(self):
        """Test that a configuration survives a file round trip"""
        config = AnalysisConfig(alphabet_size=5, differencing=False, rare_threshold=0.025,
                                window_kind='random_starts', symbolization_mode='per_window')
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'analysis.conf'
            path.write_text(dump_config(config))
            self.assertEqual(load_config(path), config)

    def test_comments_and_blank_lines(self):
        """Test that comments and blank lines are ignored"""
        values = parse_config_text("# protocol\n\nword_length = 8  # shorter words\n")
        self.assertEqual(values, {'word_length': '8'})

    def test_unknown_key(self):
        """Test that an unknown key is a configuration error"""
        with self.assertRaisesMessage(ConfigurationError, "unknown configuration keys: colour"):
            validate_config({**AnalysisConfig().echo(), 'colour': 'red'})

    def test_invalid_value_reports_the_field(self):
        """Test that an invalid value names its field"""
        with self.assertRaises(ConfigurationError) as caught:
            AnalysisConfig().updated(alphabet_size=1)
        self.assertIn('alphabet_size', caught.exception.errors)
        self.assertEqual(caught.exception.exit_code, 1)

    def test_duplicate_key(self):
        """Test that a duplicate key is a configuration error"""
        with self.assertRaises(ConfigurationError):
            parse_config_text("word_length = 8\nword_length = 9\n")


class AnalyzeEntityTestCase(SimpleTestCase):
    """Test cases for the per-entity report"""

    def setUp(self):
        self.config = AnalysisConfig()
        self.entity = corpus(entity_count=1)[0]

    def test_report_is_self_consistent(self):
        """Test that every derived field of a report recomputes"""
        report = analyze_entity(self.entity, self.config)
        self.assertIn(report.leading, (1, 2, 3))
        self.assertEqual(consistency_errors(report, self.entity, self.config), [])
        self.assertEqual(report.schema_version, SCHEMA_VERSION)
        self.assertEqual(report.parse_rule, PARSE_RULE)
        self.assertEqual(report.config_echo, self.config.echo())
        self.assertEqual(len(report.walk), 5)
        self.assertEqual(report.window_starts, (0, 52, 104, 156, 208))
        self.assertEqual(report.grand_total, float(self.entity.matrix().sum()))
        self.assertEqual([p.null_count for p in report.sparsity],
                         [int(np.count_nonzero(c.values == 0.0)) for c in self.entity.components])

    def test_uniform_entity_has_a_full_report(self):
        """Test that a stationary walk leaves the trend out but keeps every other marker"""
        entity = uniform_entity()
        holdout = entity.slice(entity.length - 351, entity.length)
        report = analyze_entity(entity, self.config, holdout)
        self.assertIn(report.leading, (1, 2, 3))
        self.assertEqual(consistency_errors(report, entity, self.config), [])
        self.assertIsNone(report.trend)
        self.assertEqual(report.trend_error.kind, 'degenerate')
        self.assertEqual(report.trend_error.message, 'trend undefined: stationary walk')
        self.assertIsNone(report.attribution)
        self.assertEqual(report.holdout_point.dimension, 3)
        self.assertEqual(len(report.sparsity), 3)
        self.assertEqual(report.grand_total, float(entity.matrix().sum()))

    def test_trendless_report_round_trips_through_its_payload(self):
        """Test that a report without a trend serializes the trend as null and rebuilds"""
        report = analyze_entity(uniform_entity(), self.config)
        payload = MarkerReportSerializer(report).data
        self.assertIsNone(payload['trend'])
        self.assertEqual(payload['trend_error']['kind'], 'degenerate')
        rebuilt = report_from_payload(payload)
        self.assertIsNone(rebuilt.trend)
        self.assertEqual(rebuilt.trend_error, report.trend_error)
        self.assertEqual(render_json(MarkerReportSerializer(rebuilt).data), render_json(payload))

    def test_walk_plot_without_a_trend(self):
        """Test that the walk plot draws the trend arrow only when there is a trend"""
        self.assertNotIn('marker-end', report_walk_svg(analyze_entity(uniform_entity(), self.config)))
        self.assertIn('marker-end', report_walk_svg(analyze_entity(self.entity, self.config)))

    def test_variable_component_leads_two_constant_ones(self):
        """Test that a variable component leads two constant ones"""
        variable = self.entity.components[0].values
        multi = MultiSeries.from_arrays('E1', [np.full(585, 50.0), variable, np.full(585, 20.0)])
        report = analyze_entity(multi, self.config)
        self.assertEqual(report.leading, 2)
        self.assertEqual(report.entropy_vector.values[0], 209 / 1168)

    def test_doubling_changes_only_the_grand_total(self):
        """Test that doubling the series changes only the grand total"""
        doubled = MultiSeries.from_arrays(
            self.entity.entity_id, [2 * c.values for c in self.entity.components], self.entity.labels,
        )
        original = dict(MarkerReportSerializer(analyze_entity(self.entity, self.config)).data)
        scaled = dict(MarkerReportSerializer(analyze_entity(doubled, self.config)).data)
        self.assertEqual(scaled.pop('grand_total'), 2 * original.pop('grand_total'))
        self.assertEqual(render_json(scaled), render_json(original))

    def test_holdout_attribution(self):
        """Test the holdout verdict of a split series"""
        training, holdout = split_holdout(self.entity, self.config)
        self.assertEqual((training.length, holdout.length), (533, 351))
        report = analyze_entity(training, self.config, holdout)
        self.assertEqual(len(report.walk), 4)
        self.assertEqual(report.attribution.threshold, report.trend.mean_distance)
        self.assertEqual(report.attribution.within,
                         report.attribution.distance <= max(report.attribution.threshold, COLINEAR_TOLERANCE))
        self.assertEqual(report.holdout_point.dimension, 3)

    def test_holdout_of_the_wrong_length(self):
        """Test that a holdout of the wrong length names both lengths"""
        with self.assertRaisesMessage(DataError, "holdout window length 299 does not match window length 350"):
            check_holdout(self.entity.slice(0, 300), self.entity, self.config)

    def test_series_too_short_to_split(self):
        """Test that a series too short to split is a data error"""
        with self.assertRaises(DataError):
            split_holdout(self.entity.slice(0, 380), self.config)

    def test_report_round_trips_through_its_payload(self):
        """Test that a report rebuilds from its payload"""
        training, holdout = split_holdout(self.entity, self.config)
        report = analyze_entity(training, self.config, holdout)
        payload = MarkerReportSerializer(report).data
        rebuilt = report_from_payload(payload)
        self.assertEqual(render_json(MarkerReportSerializer(rebuilt).data), render_json(payload))

    def test_unknown_schema_version_is_rejected(self):
        """Test that an unknown schema version is rejected"""
        payload = dict(MarkerReportSerializer(analyze_entity(self.entity, self.config)).data)
        payload['schema_version'] = SCHEMA_VERSION + 1
        with self.assertRaises(ValidationError):
            report_from_payload(payload)


class AnalyzeCollectionTestCase(SimpleTestCase):
    """Test cases for collection summaries"""

    def setUp(self):
        self.config = AnalysisConfig()
        self.entities = corpus(entity_count=4)

    def holdout_split(self, entities):
        split = [split_holdout(multi, self.config) for multi in entities]
        return [t for t, _ in split], {h.entity_id: h for _, h in split}

    def test_single_entity(self):
        """Test the summary of a single entity"""
        training, holdout = self.holdout_split(self.entities[:1])
        summary = analyze_collection(training, self.config, holdout)
        self.assertEqual(summary.attributed_count, 1)
        self.assertIn(summary.within_walk_fraction, (0.0, 1.0))
        self.assertEqual(summary.entropy_vs_total[0].grand_total_normalized, 0.0)

    def test_identical_entities_share_one_verdict(self):
        """Test that identical entities share one verdict"""
        copies = [
            MultiSeries(self.entities[0].components, f"C{i}") for i in range(3)
        ]
        training, holdout = self.holdout_split(copies)
        summary = analyze_collection(training, self.config, holdout)
        self.assertEqual(len({r.attribution.status for r in summary.reports}), 1)
        self.assertIn(summary.within_walk_fraction, (0.0, 1.0))

    def test_summary_counts(self):
        """Test the counts of a collection summary"""
        training, holdout = self.holdout_split(self.entities)
        summary = analyze_collection(training, self.config, holdout)
        self.assertEqual(len(summary.reports), 4)
        self.assertEqual(set(summary.diversification_category_histogram), set(CATEGORIES))
        self.assertEqual(sum(summary.diversification_category_histogram.values()), summary.attributed_count)
        self.assertEqual(summary.within_count + summary.same_leading_count + summary.changed_leading_count, 4)
        self.assertEqual(summary.within_walk_fraction, summary.within_count / 4)
        normalized = sorted(p.grand_total_normalized for p in summary.entropy_vs_total)
        self.assertEqual((normalized[0], normalized[-1]), (0.0, 1.0))
        self.assertEqual(summary.config_echo, self.config.echo())

    def test_without_holdout_there_is_no_fraction(self):
        """Test that a run without holdout has no within-walk fraction"""
        summary = analyze_collection(self.entities[:2], self.config)
        self.assertIsNone(summary.within_walk_fraction)
        self.assertEqual(summary.attributed_count, 0)

    def test_failures_are_quarantined(self):
        """Test that a failing entity is recorded and the rest analyzed"""
        short = MultiSeries.from_arrays('SHORT', [np.arange(100.0)] * 3)
        with self.assertLogs('markers.core', level='WARNING'):
            summary = analyze_collection([short] + self.entities[:2], self.config)
        self.assertEqual(len(summary.reports), 2)
        self.assertEqual(summary.failures, (
            EntityFailure('SHORT', 'analysis_error', 'window longer than series: 350 > 99', '1'),
        ))

    def test_entities_too_short_to_split_are_quarantined(self):
        """Test that a series too short for a holdout becomes a failure, not an abort"""
        short = MultiSeries.from_arrays('SHORT', [np.arange(380.0)] * 3)
        with self.assertLogs('markers.core', level='WARNING'):
            training, holdout, rejected = split_collection([short] + self.entities, self.config)
        self.assertEqual([multi.entity_id for multi in training], [multi.entity_id for multi in self.entities])
        self.assertNotIn('SHORT', holdout)
        self.assertEqual(rejected, [EntityFailure(
            'SHORT', 'data_error', 'series of length 380 is too short to hold out a window of 351 points',
        )])
        summary = analyze_collection(training, self.config, holdout, failures=rejected)
        self.assertEqual(summary.failures, tuple(rejected))
        self.assertEqual(summary.attributed_count, 4)

    def test_trendless_entity_is_reported_without_a_verdict(self):
        """Test that an entity without a trend is reported but not attributed"""
        training, holdout = self.holdout_split(self.entities[:2])
        uniform = uniform_entity()
        holdout[uniform.entity_id] = uniform.slice(uniform.length - 351, uniform.length)
        summary = analyze_collection(training + [uniform], self.config, holdout)
        self.assertEqual(len(summary.reports), 3)
        self.assertEqual(summary.failures, ())
        self.assertEqual(summary.attributed_count, 2)
        row = summary_frame(summary).iloc[2]
        self.assertEqual((row['entity_id'], row['trend_leading_last'], row['trend_direction']), ('U1', '', ''))
        self.assertEqual(row['verdict'], '')

    def test_parallel_dispatch_matches_sequential(self):
        """Test that parallel dispatch gives the sequential summary"""
        training, holdout = self.holdout_split(self.entities)
        sequential = analyze_collection(training, self.config, holdout)
        parallel = analyze_collection(training, self.config, holdout, parallel=True)
        self.assertEqual(render_json(CollectionSummarySerializer(parallel).data),
                         render_json(CollectionSummarySerializer(sequential).data))

    @patch('markers.tasks.dispatch_collection')
    def test_parallel_runs_go_through_celery(self, mock_dispatch):
        """Test that parallel runs are dispatched as Celery tasks"""
        mock_dispatch.return_value = [EntityFailure('E1', 'degenerate', 'trend undefined: stationary walk')]
        with self.assertLogs('markers.core', level='WARNING'):
            summary = analyze_collection(self.entities[:1], self.config, parallel=True)
        mock_dispatch.assert_called_once_with(self.entities[:1], self.config, {})
        self.assertEqual(summary.reports, ())
        self.assertEqual(summary.failures[0].kind, 'degenerate')

    def test_processing_order_does_not_change_reports(self):
        """Test that the processing order does not change the reports"""
        forward = analyze_collection(self.entities, self.config)
        backward = analyze_collection(self.entities[::-1], self.config)
        by_id = {r.entity_id: render_json(MarkerReportSerializer(r).data) for r in backward.reports}
        for report in forward.reports:
            self.assertEqual(render_json(MarkerReportSerializer(report).data), by_id[report.entity_id])

    def test_normalized_totals(self):
        """Test min-max normalization of grand totals"""
        np.testing.assert_array_equal(normalized_totals([2.0, 4.0, 3.0]), [0.0, 1.0, 0.5])
        np.testing.assert_array_equal(normalized_totals([5.0, 5.0]), [0.0, 0.0])
