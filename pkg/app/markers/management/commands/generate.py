from markers.corpus import corpus_spec, generate
from markers.management.base import AnalysisCommand


class Command(AnalysisCommand):
    help = "Write a deterministic synthetic corpus in the stacked layout."

    def add_arguments(self, parser):
        parser.add_argument('--entities', type=int, default=42)
        parser.add_argument('--components', type=int, default=3)
        parser.add_argument('--length', type=int, default=585)
        parser.add_argument('--generator', dest='generators', action='append', default=None,
                            metavar='KIND[:PARAM]',
                            help="constant, iid_uniform, markov[:stay], bursty_sparse[:zero_density]; "
                                 "once for all components or once per component")
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--level', type=float, default=100.0)
        parser.add_argument('--out', required=True, help="stacked CSV to write")

    def handle(self, *args, **options):
        spec = corpus_spec({
            'entity_count': options['entities'],
            'component_count': options['components'],
            'length': options['length'],
            'generators': options['generators'] or ['bursty_sparse'],
            'seed': options['seed'],
            'level': options['level'],
        })
        generate(spec, options['out'])
        self.stdout.write(
            f"Wrote {spec.entity_count} x {spec.component_count} x {spec.length} corpus to {options['out']}"
        )
