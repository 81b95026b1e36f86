import pandas as pd

from markers.artifacts import write_frame, write_json
from markers.core import analyze_collection, check_holdout
from markers.exceptions import DataError
from markers.ingest import STACKED, ingest
from markers.management.base import AnalysisCommand
from markers.serializers import AttributionVerdictSerializer


class Command(AnalysisCommand):
    help = "Attribute held-out windows: within the entropy walk, or outside it."

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        self.add_config_arguments(parser)
        parser.add_argument('--holdout', required=True,
                            help="stacked CSV with one holdout window per entity")
        parser.add_argument('--out-dir', dest='out_dir', required=True)

    def handle(self, *args, **options):
        config = self.load_config(options)
        entities = self.load_entities(options)
        out_dir = self.out_dir(options)
        holdout = {multi.entity_id: multi for multi in ingest(options['holdout'], STACKED)}

        by_id = {multi.entity_id: multi for multi in entities}
        for entity_id, window in holdout.items():
            if entity_id not in by_id:
                raise DataError(f"holdout for unknown entity {entity_id}", entity_id=entity_id)
            check_holdout(window, by_id[entity_id], config)

        summary = analyze_collection(entities, config, holdout=holdout)
        rows = []
        for report in summary.reports:
            if report.attribution is None:
                continue
            verdict = report.attribution
            rows.append({
                'entity_id': report.entity_id,
                'status': verdict.status,
                'distance': verdict.distance,
                'threshold': verdict.threshold,
                'leading': verdict.leading,
                'leading_last': report.trend.leading_last,
            })
        write_frame(
            pd.DataFrame(rows, columns=['entity_id', 'status', 'distance', 'threshold', 'leading',
                                        'leading_last']),
            out_dir / 'verdicts.csv',
        )
        write_json(
            {
                'within_walk_fraction': summary.within_walk_fraction,
                'attributed_count': summary.attributed_count,
                'within_count': summary.within_count,
                'changed_leading_count': summary.changed_leading_count,
                'same_leading_count': summary.same_leading_count,
                'verdicts': {
                    r.entity_id: AttributionVerdictSerializer(r.attribution).data
                    for r in summary.reports if r.attribution is not None
                },
                'unattributed': [
                    {'entity_id': r.entity_id, 'kind': r.trend_error.kind, 'message': r.trend_error.message}
                    for r in summary.reports if r.trend_error is not None
                ],
                'failures': [
                    {'entity_id': f.entity_id, 'kind': f.kind, 'message': f.message}
                    for f in summary.failures
                ],
                'config_echo': config.echo(),
            },
            out_dir / 'attribution.json',
        )
        self.stdout.write(
            f"{summary.attributed_count} verdict(s), within-walk fraction {summary.within_walk_fraction}"
        )
