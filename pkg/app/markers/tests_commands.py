from io import StringIO
import json
from pathlib import Path
import tempfile

from django.core.management import call_command
from django.test import SimpleTestCase
import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
import pandas as pd

from markers.artifacts import write_frame
from markers.corpus import corpus_spec, generate_corpus, stacked_frame
from markers.exceptions import AnalysisError, DataError, ParseError
from markers.ingest import WIDE, ingest, read_stacked, read_wide
from markers.management.commands.markers import Command as MarkersCommand
from markers.management.commands.simplex_plot import Command as SimplexPlotCommand
from markers.series import MultiSeries


class WorkspaceMixin:
    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        super().tearDown()

    def write(self, name, text):
        path = self.root / name
        path.write_text(text)
        return path

    def run_command(self, name, *args):
        call_command(name, *[str(a) for a in args], stdout=StringIO())


class IngestTestCase(WorkspaceMixin, SimpleTestCase):
    """Test cases for CSV ingestion"""

    def test_wide_file(self):
        """Test reading one wide file"""
        path = self.write('E7.csv', "time,tv,radio,press\n0,1,2,3\n1,4,5,6\n2,0,0,0\n3,7.5,8,9\n")
        [multi] = read_wide(path)
        self.assertEqual(multi.entity_id, 'E7')
        self.assertEqual((multi.dimension, multi.length), (3, 4))
        self.assertEqual(multi.labels, ['tv', 'radio', 'press'])
        assert_array_equal(multi.components[0].values, [1, 4, 0, 7.5])

    def test_wide_file_with_explicit_entity_id(self):
        """Test that an explicit entity id replaces the file stem"""
        path = self.write('one.csv', "time,a,b\n0,1,2\n1,3,4\n")
        [multi] = ingest(path, WIDE, entity_id='ACME')
        self.assertEqual(multi.entity_id, 'ACME')

    def test_missing_rows_are_zero_filled_with_a_warning(self):
        """Test that missing rows are filled with zeros and logged"""
        path = self.write('data.csv', (
            "entity_id,time,component,value\n"
            "E1,0,a,1\nE1,0,b,2\n"
            "E1,1,a,3\n"
            "E1,2,a,5\nE1,2,b,6\n"
        ))
        with self.assertLogs('markers.ingest', level='WARNING') as logs:
            [multi] = read_stacked(path)
        self.assertIn('padded 1 missing cell(s)', logs.output[0])
        assert_array_equal(multi.components[1].values, [2, 0, 6])

    def test_non_numeric_value_names_the_line(self):
        """Test that a non-numeric value names its line"""
        path = self.write('data.csv', "entity_id,time,component,value\nE1,0,a,1.5\nE1,1,a,abc\n")
        with self.assertRaisesMessage(ParseError, "line 3: non-numeric value value 'abc'") as caught:
            read_stacked(path)
        self.assertEqual(caught.exception.line, 3)

    def test_duplicate_row(self):
        """Test that a duplicate row is a data error"""
        path = self.write('data.csv', "entity_id,time,component,value\nE1,0,a,1\nE1,0,a,2\n")
        with self.assertRaisesMessage(DataError, "line 3: duplicate row for entity E1, time 0, component a"):
            read_stacked(path)

    def test_missing_file(self):
        """Test that a missing file is a data error"""
        with self.assertRaises(DataError):
            ingest(self.root / 'absent.csv')

    def test_entities_keep_file_order(self):
        """Test that entities keep the order of the file"""
        path = self.write('data.csv', (
            "entity_id,time,component,value\n"
            "Z,0,x,1\nZ,0,y,2\nA,0,x,3\nA,0,y,4\n"
        ))
        self.assertEqual([m.entity_id for m in read_stacked(path)], ['Z', 'A'])


class GenerateTestCase(WorkspaceMixin, SimpleTestCase):
    """Test cases for synthetic corpora"""

    def test_constant_corpus(self):
        """Test that the constant generator writes one value everywhere"""
        out = self.root / 'constant.csv'
        self.run_command('generate', '--entities', 1, '--components', 3, '--length', 10,
                         '--generator', 'constant', '--out', out)
        frame = pd.read_csv(out)
        self.assertEqual(len(frame), 30)
        self.assertEqual(list(frame.columns), ['entity_id', 'time', 'component', 'value'])
        self.assertEqual(set(frame['value']), {100.0})

    def test_bursty_zero_density(self):
        """Test that the bursty generator hits its zero density"""
        [multi] = generate_corpus(corpus_spec({
            'entity_count': 1, 'component_count': 3, 'length': 1000,
            'generators': ['bursty_sparse:0.25'], 'seed': 3,
        }))
        for component in multi.components:
            fraction = np.count_nonzero(component.values == 0.0) / multi.length
            self.assertTrue(0.23 <= fraction <= 0.27, fraction)

    def test_same_seed_gives_identical_bytes(self):
        """Test that the same seed gives identical bytes"""
        first, second = self.root / 'a.csv', self.root / 'b.csv'
        for out in (first, second):
            self.run_command('generate', '--entities', 3, '--length', 40, '--seed', 11,
                             '--generator', 'markov', '--generator', 'bursty_sparse',
                             '--generator', 'iid_uniform', '--out', out)
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_generated_corpus_ingests_back_exactly(self):
        """Test that a generated corpus ingests back exactly"""
        out = self.root / 'corpus.csv'
        self.run_command('generate', '--entities', 4, '--length', 60, '--out', out)
        expected = generate_corpus(corpus_spec({
            'entity_count': 4, 'component_count': 3, 'length': 60,
            'generators': ['bursty_sparse'], 'seed': 0,
        }))
        self.assertEqual(read_stacked(out), expected)


class MarkerCommandsTestCase(WorkspaceMixin, SimpleTestCase):
    """Test cases for the analysis commands on a generated collection"""

    def setUp(self):
        super().setUp()
        self.corpus = self.root / 'corpus.csv'
        self.run_command('generate', '--entities', 42, '--components', 3, '--length', 585,
                         '--out', self.corpus)

    def test_protocol_run(self):
        """Test the full run on the synthetic collection"""
        out = self.root / 'run'
        self.run_command('markers', self.corpus, '--out-dir', out, '--holdout-tail', '--plots')

        summary = pd.read_csv(out / 'summary.csv', keep_default_na=False)
        self.assertEqual(len(summary), 42)
        self.assertTrue(set(summary['leading']) <= {1, 2, 3})
        self.assertTrue(set(summary['verdict']) <= {'within', 'outside_same_leading', 'outside_changed_leading'})
        self.assertEqual(len(pd.read_csv(out / 'entropy_vs_total.csv')), 42)
        diversification = pd.read_csv(out / 'diversification.csv')
        self.assertEqual(list(diversification.columns[3:6]), ['rho_1', 'rho_2', 'rho_3'])
        self.assertEqual(len(list((out / 'reports').glob('*.json'))), 42)
        self.assertEqual(len(list((out / 'walks').glob('*.svg'))), 42)
        self.assertIn('<svg', (out / 'simplex.svg').read_text())

        payload = json.loads((out / 'summary.json').read_text())
        self.assertEqual(payload['attributed_count'], 42)
        self.assertEqual(sum(payload['diversification_category_histogram'].values()), 42)
        self.assertEqual(payload['within_walk_fraction'], payload['within_count'] / 42)
        self.assertEqual(payload['within_count'] + payload['same_leading_count']
                         + payload['changed_leading_count'], 42)
        self.assertEqual(len(pd.read_csv(out / 'failures.csv')), 0)

    def test_runs_are_byte_identical(self):
        """Test that sequential and parallel runs write identical bytes"""
        first, second = self.root / 'first', self.root / 'second'
        self.run_command('markers', self.corpus, '--out-dir', first, '--holdout-tail')
        self.run_command('markers', self.corpus, '--out-dir', second, '--holdout-tail', '--parallel')
        produced = sorted(p.relative_to(first) for p in first.rglob('*') if p.is_file())
        self.assertEqual(produced, sorted(p.relative_to(second) for p in second.rglob('*') if p.is_file()))
        for relative in produced:
            self.assertEqual((first / relative).read_bytes(), (second / relative).read_bytes(), relative)

    def test_config_overrides_are_echoed(self):
        """Test that configuration overrides are echoed in the summary"""
        out = self.root / 'run'
        self.run_command('markers', self.corpus, '--out-dir', out, '--set', 'word_length=8')
        payload = json.loads((out / 'summary.json').read_text())
        self.assertEqual(payload['config_echo']['word_length'], 8)

    def test_walk_and_zipf_commands(self):
        """Test the walk and zipf commands on one entity"""
        single = self.root / 'single.csv'
        write_frame(stacked_frame(read_stacked(self.corpus)[:1]), single)
        self.run_command('walk', single, '--out-dir', self.root / 'walk')
        self.run_command('zipf', single, '--out-dir', self.root / 'zipf')

        walk = pd.read_csv(self.root / 'walk' / 'E01_walk.csv')
        self.assertEqual(list(walk.columns), ['window', 'start', 'b1', 'b2', 'b3'])
        self.assertEqual(walk['start'].tolist(), [0, 52, 104, 156, 208])
        trend = json.loads((self.root / 'walk' / 'E01_trend.json').read_text())
        self.assertIn(trend['trend']['leading_last'], (1, 2, 3))
        self.assertTrue((self.root / 'walk' / 'E01_walk.svg').is_file())

        self.assertTrue((self.root / 'zipf' / 'E01_c1_census.csv').is_file())
        self.assertTrue((self.root / 'zipf' / 'E01_c3_rank_frequency.csv').is_file())
        self.assertEqual(len(pd.read_csv(self.root / 'zipf' / 'diversification.csv')), 1)

    def test_short_entity_does_not_stop_a_holdout_run(self):
        """Test that an entity too short to hold out a window is listed in failures.csv"""
        entities = read_stacked(self.corpus)[:3]
        short = MultiSeries.from_arrays('SHORT', [m.values[:380] for m in entities[0].components],
                                        entities[0].labels)
        data = self.root / 'data.csv'
        write_frame(stacked_frame(entities + [short]), data)
        out = self.root / 'run'
        self.run_command('markers', data, '--out-dir', out, '--holdout-tail')
        self.assertEqual(pd.read_csv(out / 'summary.csv')['entity_id'].tolist(), ['E01', 'E02', 'E03'])
        failures = pd.read_csv(out / 'failures.csv', keep_default_na=False)
        self.assertEqual(failures[['entity_id', 'kind', 'message']].values.tolist(), [[
            'SHORT', 'data_error', 'series of length 380 is too short to hold out a window of 351 points',
        ]])
        self.assertEqual(json.loads((out / 'summary.json').read_text())['attributed_count'], 3)

    def test_walk_and_zipf_list_failing_entities(self):
        """Test that walk and zipf record a failing entity and carry on with the rest"""
        entities = read_stacked(self.corpus)[:2]
        short = MultiSeries.from_arrays('SHORT', [m.values[:10] for m in entities[0].components],
                                        entities[0].labels)
        data = self.root / 'data.csv'
        write_frame(stacked_frame([short] + entities), data)
        self.run_command('walk', data, '--out-dir', self.root / 'walk')
        self.run_command('zipf', data, '--out-dir', self.root / 'zipf')

        walk_failures = pd.read_csv(self.root / 'walk' / 'failures.csv')
        self.assertEqual(walk_failures[['entity_id', 'kind', 'message']].values.tolist(),
                         [['SHORT', 'analysis_error', 'window longer than series: 350 > 9']])
        self.assertTrue((self.root / 'walk' / 'E02_trend.json').is_file())

        zipf_failures = pd.read_csv(self.root / 'zipf' / 'failures.csv')
        self.assertEqual(zipf_failures[['entity_id', 'kind', 'message']].values.tolist(),
                         [['SHORT', 'analysis_error', 'word length 12 must satisfy 1 <= p < 9']])
        self.assertEqual(pd.read_csv(self.root / 'zipf' / 'diversification.csv')['entity_id'].tolist(),
                         ['E01', 'E02'])

    def test_attribute_rejects_a_short_holdout(self):
        """Test that attribute rejects a holdout of the wrong length"""
        entities = read_stacked(self.corpus)[:2]
        data, holdout = self.root / 'data.csv', self.root / 'holdout.csv'
        write_frame(stacked_frame(entities), data)
        write_frame(stacked_frame([entities[0].slice(0, 300)]), holdout)
        with self.assertRaisesMessage(DataError, "holdout window length 299 does not match window length 350"):
            self.run_command('attribute', data, '--holdout', holdout, '--out-dir', self.root / 'out')

    def test_attribute_writes_verdicts(self):
        """Test that attribute writes one verdict per entity"""
        entities = read_stacked(self.corpus)[:3]
        data, holdout = self.root / 'data.csv', self.root / 'holdout.csv'
        write_frame(stacked_frame([m.slice(0, 533) for m in entities]), data)
        write_frame(stacked_frame([m.slice(234, 585) for m in entities]), holdout)
        self.run_command('attribute', data, '--holdout', holdout, '--out-dir', self.root / 'out')
        verdicts = pd.read_csv(self.root / 'out' / 'verdicts.csv')
        self.assertEqual(verdicts['entity_id'].tolist(), ['E01', 'E02', 'E03'])
        payload = json.loads((self.root / 'out' / 'attribution.json').read_text())
        self.assertEqual(payload['attributed_count'], 3)


class StepCorpusTestCase(WorkspaceMixin, SimpleTestCase):
    """Test cases for a holdout run whose verdicts follow from the step positions"""

    def setUp(self):
        super().setUp()
        t = np.arange(585)
        flat = np.full(585, 100.0)
        early = np.where(t <= 10, 100.0, 300.0)
        late = np.where(t < 533, 100.0, 300.0)
        self.data = self.root / 'steps.csv'
        write_frame(stacked_frame([
            MultiSeries.from_arrays('E1', [flat, early, flat], ['a', 'b', 'c']),
            MultiSeries.from_arrays('E2', [late, early, flat], ['a', 'b', 'c']),
            MultiSeries.from_arrays('E3', [flat, early, late], ['a', 'b', 'c']),
        ]), self.data)

    def test_verdicts_of_the_step_corpus(self):
        """Test that a step inside the holdout window moves it off the walk"""
        out = self.root / 'run'
        self.run_command('markers', self.data, '--out-dir', out, '--holdout-tail')
        payload = json.loads((out / 'summary.json').read_text())
        self.assertEqual(payload['attributed_count'], 3)
        self.assertEqual(
            (payload['within_count'], payload['same_leading_count'], payload['changed_leading_count']),
            (1, 1, 1),
        )
        self.assertEqual(payload['within_walk_fraction'], 1 / 3)
        summary = pd.read_csv(out / 'summary.csv')
        self.assertEqual(summary['verdict'].tolist(),
                         ['within', 'outside_same_leading', 'outside_changed_leading'])
        self.assertEqual(summary['trend_leading_last'].tolist(), [1, 1, 1])

    def test_walk_of_the_step_corpus(self):
        """Test that only the first window sees the early step"""
        out = self.root / 'run'
        self.run_command('markers', self.data, '--out-dir', out, '--holdout-tail')
        report = json.loads((out / 'reports' / 'E1.json').read_text())
        self.assertEqual(report['window_starts'], [0, 52, 104, 156])
        assert_allclose(report['walk'][0]['coords'], [151 / 460, 158 / 460], atol=1e-12)
        assert_allclose(report['walk'][3]['coords'], [1 / 3, 1 / 3], atol=1e-12)


class ExitCodeTestCase(WorkspaceMixin, SimpleTestCase):
    """Test cases for exit codes and error records of the command line"""

    def run_argv(self, command, *args):
        stderr = StringIO()
        with self.assertLogs('markers.management.base', level='ERROR'):
            with self.assertRaises(SystemExit) as caught:
                command(stdout=StringIO(), stderr=stderr).run_from_argv(
                    ['manage.py', 'markers'] + [str(a) for a in args]
                )
        return caught.exception.code, json.loads(stderr.getvalue())

    def test_unknown_configuration_key(self):
        """Test that an unknown configuration key exits with code 1"""
        code, record = self.run_argv(MarkersCommand, self.root / 'x.csv', '--out-dir', self.root,
                                     '--set', 'colour=red')
        self.assertEqual(code, 1)
        self.assertEqual(record['error'], 'configuration_error')

    def test_missing_argument_is_a_usage_error(self):
        """Test that a missing argument is a usage error"""
        code, record = self.run_argv(MarkersCommand, self.root / 'x.csv')
        self.assertEqual(code, 1)
        self.assertEqual(record['error'], 'usage_error')
        self.assertIn('--out-dir', record['message'])

    def test_missing_data_file(self):
        """Test that a missing data file exits with code 2"""
        code, record = self.run_argv(MarkersCommand, self.root / 'absent.csv', '--out-dir', self.root)
        self.assertEqual(code, 2)
        self.assertEqual(record['error'], 'data_error')

    def test_plotting_four_components(self):
        """Test that plotting four components exits with code 3"""
        path = self.write('four.csv', "time,a,b,c,d\n" + ''.join(
            f"{t},{t % 3},{t % 5},{t % 7},{t % 2}\n" for t in range(40)
        ))
        code, record = self.run_argv(SimplexPlotCommand, path, '--layout', 'wide',
                                     '--out', self.root / 'simplex.svg')
        self.assertEqual(code, 3)
        self.assertEqual(record['message'], "plotting supports N = 3 only (got N = 4)")

    def test_call_command_raises_the_error_class(self):
        """Test that call_command raises the error class instead of exiting"""
        path = self.write('four.csv', "time,a,b,c,d\n0,1,2,3,4\n1,2,3,4,5\n")
        with self.assertRaisesMessage(AnalysisError, "plotting supports N = 3 only"):
            self.run_command('simplex_plot', path, '--layout', 'wide', '--out', self.root / 'simplex.svg')

    def test_header_only_file(self):
        """Test that a data file without rows exits with the data error code"""
        path = self.write('empty.csv', "entity_id,time,component,value\n")
        code, record = self.run_argv(SimplexPlotCommand, path, '--out', self.root / 'simplex.svg')
        self.assertEqual(code, 2)
        self.assertEqual(record['error'], 'data_error')
        self.assertIn('no entities in', record['message'])
