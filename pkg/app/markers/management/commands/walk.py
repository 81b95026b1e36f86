import logging

import numpy as np

from markers.artifacts import failures_frame, walk_frame, write_frame, write_json, write_text
from markers.core import EntityFailure, optional_trend
from markers.exceptions import MarkersError
from markers.management.base import AnalysisCommand, artifact_name
from markers.plots import PLOT_DIMENSION, walk_svg
from markers.walk import moving_matrix, walk

logger = logging.getLogger(__name__)


def trend_payload(trend):
    if trend is None:
        return None
    return {
        'leading_last': trend.leading_last,
        'direction': trend.direction.tolist(),
        'line_point': trend.line_point.tolist(),
        'mean_distance': trend.mean_distance,
    }


class Command(AnalysisCommand):
    help = "Entropy walk and trend of every entity (walk SVG when N = 3)."

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        self.add_config_arguments(parser)
        parser.add_argument('--out-dir', dest='out_dir', required=True)

    def handle(self, *args, **options):
        config = self.load_config(options)
        out_dir = self.out_dir(options)
        failures = []
        for multi in self.load_entities(options):
            try:
                matrix = moving_matrix(multi, config.alphabet(), config.differencing,
                                       config.window_scheme(), config.symbolization_mode)
                entropy_walk = walk(matrix)
            except MarkersError as e:
                failure = EntityFailure.from_error(multi.entity_id, e)
                logger.warning(f"Entity {failure.entity_id} failed ({failure.kind}): {failure.message}")
                failures.append(failure)
                continue
            trend, trend_error = optional_trend(entropy_walk, matrix)
            write_frame(walk_frame(matrix.starts, entropy_walk),
                        out_dir / artifact_name(multi.entity_id, '_walk.csv'))
            write_json(
                {
                    'entity_id': multi.entity_id,
                    'labels': multi.labels,
                    'window_starts': list(matrix.starts),
                    'moving_matrix': np.asarray(matrix.values).tolist(),
                    'trend': trend_payload(trend),
                    'trend_error': None if trend_error is None else {
                        'kind': trend_error.kind,
                        'message': trend_error.message,
                    },
                    'config_echo': config.echo(),
                },
                out_dir / artifact_name(multi.entity_id, '_trend.json'),
            )
            if multi.dimension == PLOT_DIMENSION:
                write_text(out_dir / artifact_name(multi.entity_id, '_walk.svg'),
                           walk_svg(entropy_walk, trend, multi.labels))
            leading_last = trend.leading_last if trend is not None else f"none ({trend_error.message})"
            self.stdout.write(f"{multi.entity_id}: {len(entropy_walk)} windows, leading_last={leading_last}")
        write_frame(failures_frame(failures), out_dir / 'failures.csv')
