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

import dataclasses
import math

import numpy as np
from testtools import matchers

from qdbench import exceptions
from qdbench import model
from qdbench.tests import base


class TestValidate(base.TestCase):

    def test_defaults_are_valid(self):
        report = model.validate(model.EmitterDevice(), model.CavityParams(),
                                model.BenchConfig())
        self.assertTrue(report.valid)
        self.assertEqual((), report.warnings)

    def test_none_skips_parts(self):
        self.assertTrue(model.validate())

    def test_lifetimes_ordered(self):
        device = model.EmitterDevice(lifetime_on_resonance=1200.0)
        report = model.validate(device=device)
        self.assertFalse(report.valid)
        self.assertThat(report.errors[0], matchers.Contains('T_on'))

    def test_reflectance_bounds(self):
        for r in (0.0, 1.0, 1.5):
            report = model.validate(bench=model.BenchConfig(bs_reflectance=r))
            self.assertFalse(report.valid, r)

    def test_pair_delay_below_half_period(self):
        bench = model.BenchConfig(pulse_pair_delay=6.2)
        self.assertFalse(model.validate(bench=bench).valid)
        bench = model.BenchConfig(pulse_pair_delay=6.0)
        self.assertTrue(model.validate(bench=bench).valid)

    def test_several_errors_reported(self):
        device = model.EmitterDevice(extraction_efficiency=1.5,
                                     multi_photon_prob=-0.1)
        self.assertEqual(2, len(model.validate(device=device).errors))

    def test_sublinear_surplus_order(self):
        device = model.EmitterDevice(multi_photon_order=0.5)
        report = model.validate(device=device)
        self.assertIn('multi_photon_order must be at least 1',
                      report.errors)

    def test_q_inconsistency_warns(self):
        cavity = model.CavityParams(mode_linewidth=400.0)
        report = model.validate(cavity=cavity)
        self.assertTrue(report.valid)
        self.assertEqual(1, len(report.warnings))

    def test_validate_does_not_mutate(self):
        bench = model.BenchConfig(bs_reflectance=2.0)
        before = bench.to_dict()
        model.validate(bench=bench)
        self.assertEqual(before, bench.to_dict())

    def test_ensure_valid_raises(self):
        self.assertRaises(exceptions.InvalidParameter, model.ensure_valid,
                          bench=model.BenchConfig(one_minus_eps=0.0))


class TestBenchConfig(base.TestCase):

    def test_derived_quantities(self):
        bench = model.BenchConfig()
        self.assertClose(12195.121951219513, bench.rep_period)
        self.assertEqual(2000.0, bench.pair_delay_ps)
        self.assertClose(520.0 / math.sqrt(2.0), bench.jitter_sigma)
        self.assertEqual(0.021, bench.collection_efficiency)

    def test_resolved_materializes_defaults(self):
        bench = model.BenchConfig(correlation_efficiency=0.4).resolved()
        self.assertClose(520.0 / math.sqrt(2.0), bench.detector_jitter)
        self.assertEqual(0.4, bench.correlation_efficiency)

    def test_reflectance_from_ratio(self):
        self.assertClose(1.1 / 2.1, model.reflectance_from_ratio(1.1))
        self.assertEqual(0.5, model.reflectance_from_ratio(1.0))
        self.assertRaises(exceptions.InvalidParameter,
                          model.reflectance_from_ratio, 0.0)

    def test_dict_round_trip_rejects_unknown_keys(self):
        data = model.BenchConfig().to_dict()
        self.assertEqual(model.BenchConfig(),
                         model.BenchConfig.from_dict(data))
        data['bs_reflectivity'] = 0.5
        self.assertRaises(exceptions.InvalidParameter,
                          model.BenchConfig.from_dict, data)


class TestCavityParams(base.TestCase):

    def test_mode_volume_units(self):
        cavity = model.CavityParams(mode_volume=2.0)
        self.assertClose(2.0 * (0.9 / 3.6) ** 3, cavity.mode_volume_um3)
        cavity = dataclasses.replace(cavity,
                                     mode_volume_unit=model.CUBIC_MICRON)
        self.assertEqual(2.0, cavity.mode_volume_um3)

    def test_reference_dephasing(self):
        nu = (model.DEFAULT_INDISTINGUISHABILITY -
              model.DEFAULT_DEPHASING * np.array([math.pi / 4, math.pi]) ** 2)
        self.assertClose(0.88, nu[0])
        self.assertClose(0.73, nu[1])


class TestStreams(base.TestCase):

    def test_click_stream_sorted_by_time_then_channel(self):
        clicks = model.ClickStream([2, 1, 2, 1], [30, 10, 10, 20])
        self.assertEqual([1, 2, 1, 2], clicks.channel.tolist())
        self.assertEqual([10, 10, 20, 30], clicks.absolute_time.tolist())
        self.assertEqual([10, 20], clicks.times(1).tolist())

    def test_click_stream_rejects_bad_channel(self):
        self.assertRaises(exceptions.InvalidParameter, model.ClickStream,
                          [1, 3], [0, 1])

    def test_click_stream_records(self):
        clicks = model.ClickStream([1, 2], [5, 7])
        records = list(clicks.records())
        self.assertEqual(model.ClickRecord(2, 7), records[1])
        self.assertEqual(clicks, model.ClickStream.from_records(records))

    def test_concatenate(self):
        a = model.ClickStream([1], [20])
        b = model.ClickStream([2], [10])
        merged = model.ClickStream.concatenate([a, b])
        self.assertEqual([10, 20], merged.absolute_time.tolist())
        self.assertEqual(0, len(model.ClickStream.concatenate([])))

    def test_photon_stream_columns(self):
        photons = model.PhotonStream([0, 0, 1], [1, 2, 0], [5.0, 6.0, 7.0],
                                     [0, 0, 1], [0.9, 0.9, 0.0],
                                     [False, False, True])
        self.assertEqual(3, len(photons))
        extra = photons.take(photons.is_extra)
        self.assertEqual([1], extra.period_index.tolist())
        first = next(photons.records())
        self.assertEqual(model.SLOT_EARLY, first.slot)
        self.assertRaises(exceptions.InvalidParameter, model.PhotonStream,
                          [0], [0, 1])


class TestHistogram(base.TestCase):

    def test_bin_centers(self):
        hist = model.Histogram(64, -96.0, [1, 2, 3])
        self.assertEqual([-64.0, 0.0, 64.0], hist.bin_centers.tolist())
        self.assertEqual(6, hist.total_coincidences)

    def test_add_requires_same_geometry(self):
        a = model.Histogram(64, -96.0, [1, 2, 3])
        self.assertEqual([2, 4, 6], (a + a).counts.tolist())
        b = model.Histogram(32, -96.0, [1, 2, 3])
        self.assertRaises(exceptions.InvalidParameter, a.__add__, b)

    def test_dict_checks_total(self):
        data = model.Histogram(64, -32.0, [4]).to_dict()
        self.assertEqual(4, model.Histogram.from_dict(data).counts[0])
        data['total_coincidences'] = 5
        self.assertRaises(exceptions.InvalidParameter,
                          model.Histogram.from_dict, data)

    def test_negative_counts_rejected(self):
        self.assertRaises(exceptions.InvalidParameter, model.Histogram,
                          64, 0.0, [1, -1])


class TestFitReport(base.TestCase):

    def _report(self):
        peaks = tuple(model.PeakParams(center=c, area=a, decay_time=168.0,
                                       sigma=520.0, area_err=e)
                      for c, a, e in ((-10.0, 5.0, 1.0), (0.0, 1.0, 0.5),
                                      (10.0, 6.0, 1.5)))
        return model.FitReport(peaks=peaks, chi_square=3.0, dof=10,
                               iteration_count=7, converged=True)

    def test_covariance_defaults_to_diagonal(self):
        report = self._report()
        np.testing.assert_allclose(np.diag([1.0, 0.25, 2.25]),
                                   report.covariance())
        self.assertEqual(1, report.peak_nearest(1.0))

    def test_dict_round_trip(self):
        report = self._report().with_derived(g2_zero=0.1).with_assumptions(
            'a', 'a', 'b')
        self.assertEqual(('a', 'b'), report.assumptions)
        self.assertEqual(report, model.FitReport.from_dict(report.to_dict()))
