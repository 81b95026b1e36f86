import logging

from markers.artifacts import (
    diversification_frame,
    entropy_vs_total_frame,
    failures_frame,
    summary_frame,
    write_frame,
    write_json,
    write_text,
)
from markers.core import analyze_collection, consistency_errors, split_collection
from markers.exceptions import AnalysisError, DataError
from markers.ingest import STACKED, ingest
from markers.management.base import AnalysisCommand, artifact_name
from markers.plots import report_walk_svg, simplex_svg
from markers.serializers import CollectionSummarySerializer, MarkerReportSerializer

logger = logging.getLogger(__name__)


class Command(AnalysisCommand):
    help = "Compute the leading component, walk trend and diversification of every entity."

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        self.add_config_arguments(parser)
        parser.add_argument('--out-dir', dest='out_dir', required=True)
        holdout = parser.add_mutually_exclusive_group()
        holdout.add_argument('--holdout', default=None,
                             help="stacked CSV with one holdout window per entity")
        holdout.add_argument('--holdout-tail', dest='holdout_tail', action='store_true',
                             help="hold out the last window of every series")
        parser.add_argument('--parallel', action='store_true',
                            help="dispatch entities as Celery tasks")
        parser.add_argument('--plots', action='store_true',
                            help="write the simplex and walk SVGs (N = 3 only)")

    def handle(self, *args, **options):
        config = self.load_config(options)
        entities = self.load_entities(options)
        out_dir = self.out_dir(options)

        holdout, rejected = {}, []
        if options['holdout_tail']:
            entities, holdout, rejected = split_collection(entities, config)
        elif options['holdout']:
            holdout = {multi.entity_id: multi for multi in ingest(options['holdout'], STACKED)}
            unknown = sorted(set(holdout) - {multi.entity_id for multi in entities})
            if unknown:
                raise DataError(f"holdout for unknown entities: {', '.join(unknown)}")

        summary = analyze_collection(entities, config, holdout=holdout,
                                     parallel=options['parallel'], failures=rejected)

        by_id = {multi.entity_id: multi for multi in entities}
        for report in summary.reports:
            mismatched = consistency_errors(report, by_id[report.entity_id], config)
            if mismatched:
                raise AnalysisError(f"report fields do not recompute: {', '.join(mismatched)}",
                                    entity_id=report.entity_id)
            write_json(MarkerReportSerializer(report).data,
                       out_dir / 'reports' / artifact_name(report.entity_id, '.json'))

        write_json(CollectionSummarySerializer(summary).data, out_dir / 'summary.json')
        write_frame(summary_frame(summary), out_dir / 'summary.csv')
        write_frame(failures_frame(summary.failures), out_dir / 'failures.csv')
        write_frame(diversification_frame((r.entity_id, r.diversification) for r in summary.reports),
                    out_dir / 'diversification.csv')
        write_frame(entropy_vs_total_frame(summary), out_dir / 'entropy_vs_total.csv')

        if options['plots'] and summary.reports:
            labels = summary.reports[0].labels
            write_text(out_dir / 'simplex.svg',
                       simplex_svg([r.entropy_vector for r in summary.reports], labels))
            for report in summary.reports:
                write_text(out_dir / 'walks' / artifact_name(report.entity_id, '.svg'),
                           report_walk_svg(report))

        self.stdout.write(
            f"{len(summary.reports)} report(s), {len(summary.failures)} failure(s) written to {out_dir}"
        )
