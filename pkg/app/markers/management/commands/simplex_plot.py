import logging

from markers.artifacts import write_text
from markers.entropy import entropy_vector
from markers.exceptions import AnalysisError, MarkersError
from markers.management.base import AnalysisCommand
from markers.plots import check_dimension, simplex_svg

logger = logging.getLogger(__name__)


class Command(AnalysisCommand):
    help = "Projected entropy vectors of a collection on the 3-simplex, as SVG."

    def add_arguments(self, parser):
        self.add_data_arguments(parser)
        self.add_config_arguments(parser)
        parser.add_argument('--out', required=True, help="SVG file to write")

    def handle(self, *args, **options):
        config = self.load_config(options)
        entities = self.load_entities(options)
        check_dimension(entities[0].dimension)
        vectors = []
        for multi in entities:
            try:
                vectors.append(entropy_vector(multi, config.alphabet(), config.differencing))
            except MarkersError as e:
                logger.warning(f"Entity {multi.entity_id} left out of the plot ({e.kind}): {e.message}")
        if not vectors:
            raise AnalysisError("nothing to plot: every entity failed")
        write_text(options['out'], simplex_svg(vectors, entities[0].labels))
        self.stdout.write(f"Plotted {len(vectors)} of {len(entities)} entities to {options['out']}")
