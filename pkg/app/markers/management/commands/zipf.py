import logging

from markers.artifacts import diversification_frame, failures_frame, write_frame
from markers.core import EntityFailure
from markers.exceptions import MarkersError
from markers.management.base import AnalysisCommand, artifact_name
from markers.zipf import census_frame, component_censuses, diversification, rank_frequency_frame

logger = logging.getLogger(__name__)


class Command(AnalysisCommand):
    help = "Word censuses, rank-frequency data and diversification of every entity."

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        self.add_config_arguments(parser)
        parser.add_argument('--out-dir', dest='out_dir', required=True)

    def handle(self, *args, **options):
        config = self.load_config(options)
        out_dir = self.out_dir(options)
        alphabet = config.alphabet()
        results, failures = [], []
        for multi in self.load_entities(options):
            try:
                censuses = component_censuses(multi, alphabet, config.differencing,
                                              config.word_length, config.equivalence)
                div = diversification(multi, alphabet, config.differencing, config.word_length,
                                      config.equivalence, config.rare_threshold)
            except MarkersError as e:
                failure = EntityFailure.from_error(multi.entity_id, e)
                logger.warning(f"Entity {failure.entity_id} failed ({failure.kind}): {failure.message}")
                failures.append(failure)
                continue
            for label, census in zip(multi.labels, censuses):
                stem = f"{multi.entity_id}_{label}"
                write_frame(census_frame(census), out_dir / artifact_name(stem, '_census.csv'))
                write_frame(rank_frequency_frame(census), out_dir / artifact_name(stem, '_rank_frequency.csv'))
            results.append((multi.entity_id, div))
            self.stdout.write(f"{multi.entity_id}: D={div.value!r} ({div.category})")
        write_frame(diversification_frame(results), out_dir / 'diversification.csv')
        write_frame(failures_frame(failures), out_dir / 'failures.csv')
