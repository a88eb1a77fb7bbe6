#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

import io
import os

import fixtures
from oslo_serialization import jsonutils

from qdbench import cli
from qdbench import config
from qdbench import fileio
from qdbench import pipeline
from qdbench.tests import base


class CliTestCase(base.TestCase):

    def setUp(self):
        super().setUp()
        self.tmp = self.useFixture(fixtures.TempDir()).path
        self.stdout = self.useFixture(
            fixtures.MonkeyPatch('sys.stdout', io.StringIO())).new_value
        self.stderr = self.useFixture(
            fixtures.MonkeyPatch('sys.stderr', io.StringIO())).new_value

    def path(self, *parts):
        return os.path.join(self.tmp, *parts)


class TestCalc(CliTestCase):

    def test_purcell(self):
        code = cli.main(['calc', 'purcell', '168', '1140',
                         '--t-on-err', '5', '--t-off-err', '19'])
        self.assertEqual(cli.EXIT_OK, code)
        self.assertEqual('F_P = 5.78571 ± 0.23\n', self.stdout.getvalue())

    def test_purcell_max(self):
        code = cli.main(['calc', 'purcell-max', '5930', '76.377'])
        self.assertEqual(cli.EXIT_OK, code)
        self.assertTrue(self.stdout.getvalue().startswith('F_P,max = 5.9'))

    def test_efficiency(self):
        code = cli.main(['calc', 'efficiency', '1.3e6',
                         '--setup-efficiency-err', '0.001'])
        self.assertEqual(cli.EXIT_OK, code)
        self.assertEqual('eta = 0.754936 ± 0.036\n', self.stdout.getvalue())

    def test_invalid_parameter(self):
        self.assertEqual(cli.EXIT_CONFIG,
                         cli.main(['calc', 'purcell', '0', '1140']))
        self.assertIn('Lifetimes must be positive', self.stderr.getvalue())
        self.assertEqual(cli.EXIT_CONFIG,
                         cli.main(['calc', 'purcell-max', '-1', '70']))


class TestSimAnalyze(CliTestCase):

    def _sim(self, out, *extra):
        return cli.main(['sim', base.REFERENCE_CONF, '--periods', '20000',
                         '--out', out] + list(extra))

    def test_decay_round_trip(self):
        out = self.path('decay')
        self.assertEqual(cli.EXIT_OK, self._sim(out, '--mode', 'decay'))
        for name in (cli.CLICKS_FILE, cli.RUN_FILE):
            self.assertTrue(os.path.isfile(os.path.join(out, name)))
        run = fileio.read_json(os.path.join(out, cli.RUN_FILE))
        self.assertEqual('decay', run['run']['mode'])
        self.assertEqual(20000, run['run']['n_periods'])

        code = cli.main(['analyze', os.path.join(out, cli.CLICKS_FILE)])
        self.assertEqual(cli.EXIT_OK, code)
        for name in (cli.HISTOGRAM_FILE, cli.PEAKS_FILE, cli.FIT_FILE):
            self.assertTrue(os.path.isfile(os.path.join(out, name)))
        fit = fileio.read_json(os.path.join(out, cli.FIT_FILE))
        self.assertWithin(168.0, fit['lifetime'][0], 15.0)

    def test_analyze_matches_in_memory_pipeline(self):
        out = self.path('hbt')
        self.assertEqual(cli.EXIT_OK, self._sim(out, '--mode', 'hbt'))
        self.assertEqual(cli.EXIT_OK, cli.main(
            ['analyze', os.path.join(out, cli.CLICKS_FILE)]))

        run_config = config.resolve(config.load_config(
            base.REFERENCE_CONF,
            {config.RUN_GROUP: {'n_periods': 20000, 'mode': 'hbt'}}))
        analysis = pipeline.analyze(pipeline.simulate(run_config),
                                    run_config)
        expected = jsonutils.loads(fileio.dumps(analysis.fit_document()))
        self.assertEqual(expected,
                         fileio.read_json(os.path.join(out, cli.FIT_FILE)))

    def test_sim_is_deterministic(self):
        self.assertEqual(cli.EXIT_OK,
                         self._sim(self.path('a'), '--seed', '4'))
        self.assertEqual(cli.EXIT_OK,
                         self._sim(self.path('b'), '--seed', '4',
                                   '--threads', '1'))
        with open(self.path('a', cli.CLICKS_FILE)) as a:
            with open(self.path('b', cli.CLICKS_FILE)) as b:
                self.assertEqual(a.read(), b.read())

    def test_brightness_has_no_histogram(self):
        out = self.path('bright')
        self.assertEqual(cli.EXIT_OK,
                         self._sim(out, '--mode', 'brightness'))
        self.assertEqual(cli.EXIT_OK, cli.main(
            ['analyze', os.path.join(out, cli.CLICKS_FILE)]))
        self.assertFalse(os.path.exists(os.path.join(out,
                                                     cli.HISTOGRAM_FILE)))
        fit = fileio.read_json(os.path.join(out, cli.FIT_FILE))
        self.assertIn('eta_device', fit)

    def test_orthogonal_needs_parallel_mode(self):
        out = self.path('hbt')
        self.assertEqual(cli.EXIT_OK, self._sim(out))
        clicks = os.path.join(out, cli.CLICKS_FILE)
        self.assertEqual(cli.EXIT_CONFIG, cli.main(
            ['analyze', clicks, '--orthogonal', clicks]))

    def test_missing_clicks(self):
        code = cli.main(['analyze', self.path('absent', cli.CLICKS_FILE)])
        self.assertEqual(cli.EXIT_IO, code)

    def test_invalid_config(self):
        conf = self.write_file(self.tmp, 'bad.conf', '[run]\nperiods = 5\n')
        self.assertEqual(cli.EXIT_CONFIG, cli.main(['sim', conf]))
        self.assertIn("unknown key 'periods'", self.stderr.getvalue())


class TestPipeline(CliTestCase):

    def test_small_sample_reports_wide_errors(self):
        out = self.path('small')
        self.assertEqual(cli.EXIT_OK, cli.main(
            ['pipeline', base.REFERENCE_CONF, '--periods', '100',
             '--out', out]))
        summary = fileio.read_json(os.path.join(out, cli.SUMMARY_FILE))
        self.assertEqual(100, summary['n_periods'])
        self.assertGreater(summary['nu_raw_err'], 0.05)

    def test_summary_written(self):
        conf = self.write_file(self.tmp, 'small.conf',
                               '[bench]\ncorrelation_efficiency = 1.0\n'
                               '[run]\nn_periods = 100000\nrng_seed = 7\n'
                               'target_g2 = 0.0092\n')
        out = self.path('results')
        self.assertEqual(cli.EXIT_OK,
                         cli.main(['pipeline', conf, '--out', out]))
        summary = fileio.read_json(os.path.join(out, cli.SUMMARY_FILE))
        self.assertEqual(7, summary['rng_seed'])
        self.assertTrue(os.path.isfile(os.path.join(out, cli.RUN_FILE)))
        self.assertTrue(self.stdout.getvalue().startswith('g2(0)'))
