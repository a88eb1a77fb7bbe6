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

import os

import fixtures
import numpy as np

from qdbench import exceptions
from qdbench import fileio
from qdbench import model
from qdbench.tests import base


class TestClickFiles(base.TestCase):

    def setUp(self):
        super().setUp()
        self.tmp = self.useFixture(fixtures.TempDir()).path

    def test_round_trip(self):
        clicks = model.ClickStream([2, 1, 1], [40, 5, 40])
        path = fileio.write_clicks(os.path.join(self.tmp, 'out', 'c.csv'),
                                   clicks)
        with open(path) as fp:
            self.assertEqual('channel,time_ps\n1,5\n1,40\n2,40\n', fp.read())
        self.assertEqual(clicks, fileio.read_clicks(path))

    def test_empty_stream(self):
        path = fileio.write_clicks(os.path.join(self.tmp, 'c.csv'),
                                   model.ClickStream())
        self.assertEqual(0, len(fileio.read_clicks(path)))

    def test_malformed(self):
        for name, text in (('header.csv', 'ch,t\n1,5\n'),
                           ('float.csv', 'channel,time_ps\n1,5.5\n'),
                           ('channel.csv', 'channel,time_ps\n3,5\n'),
                           ('columns.csv', 'channel,time_ps\n1,5,6\n'),
                           ('text.csv', 'channel,time_ps\n1,soon\n')):
            path = self.write_file(self.tmp, name, text)
            self.assertRaises(exceptions.DataFileError, fileio.read_clicks,
                              path)

    def test_missing(self):
        exc = self.assertRaises(exceptions.DataFileError, fileio.read_clicks,
                                os.path.join(self.tmp, 'absent.csv'))
        self.assertIn('absent.csv', str(exc))


class TestHistogramFiles(base.TestCase):

    def setUp(self):
        super().setUp()
        self.tmp = self.useFixture(fixtures.TempDir()).path

    def test_round_trip(self):
        hist = model.Histogram(64, -224.0, [0, 3, 9, 3, 1, 0, 0])
        path = fileio.write_histogram(os.path.join(self.tmp, 'h.csv'), hist)
        with open(path) as fp:
            lines = fp.read().splitlines()
        self.assertEqual('# bin_width_ps=64 origin_ps=-224', lines[0])
        self.assertEqual('-192,0', lines[2])
        self.assertEqual(hist, fileio.read_histogram(path))

    def test_inconsistent_centers(self):
        path = self.write_file(self.tmp, 'h.csv',
                               '# bin_width_ps=64 origin_ps=-100\n'
                               'bin_center_ps,counts\n-64,1\n0,2\n64,1\n')
        self.assertRaises(exceptions.DataFileError, fileio.read_histogram,
                          path)

    def test_missing_geometry(self):
        path = self.write_file(self.tmp, 'h.csv',
                               'bin_center_ps,counts\n0,1\n')
        self.assertRaises(exceptions.DataFileError, fileio.read_histogram,
                          path)

    def test_peaks_table(self):
        hist = model.Histogram(64, -96.0, [1, 5, 2])
        path = fileio.write_peaks(os.path.join(self.tmp, 'p.csv'), hist,
                                  np.array([1.5, 4.25, 2.0]))
        with open(path) as fp:
            self.assertEqual('bin_center_ps,counts,fit\n'
                             '-64,1,1.500000\n0,5,4.250000\n'
                             '64,2,2.000000\n', fp.read())


class TestJson(base.TestCase):

    def test_sorted_and_readable(self):
        tmp = self.useFixture(fixtures.TempDir()).path
        path = fileio.write_json(os.path.join(tmp, 'fit.json'),
                                 {'b': 1, 'a': [0.5, None]})
        with open(path) as fp:
            self.assertTrue(fp.read().startswith('{\n  "a"'))
        self.assertEqual({'a': [0.5, None], 'b': 1}, fileio.read_json(path))

    def test_invalid_json(self):
        tmp = self.useFixture(fixtures.TempDir()).path
        path = self.write_file(tmp, 'fit.json', '{"a": ')
        self.assertRaises(exceptions.DataFileError, fileio.read_json, path)
