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

from qdbench import dynamics
from qdbench import exceptions
from qdbench import model
from qdbench import oracle
from qdbench import sharding
from qdbench.tests import base


class TestExcitation(base.TestCase):

    def test_rabi_inversion(self):
        self.assertClose(1.0, dynamics.excitation_probability(math.pi))
        self.assertClose(0.5, dynamics.excitation_probability(math.pi / 2))
        self.assertEqual(0.0, dynamics.excitation_probability(0.0))
        values = dynamics.excitation_probability(np.array([0.0, math.pi]))
        np.testing.assert_allclose([0.0, 1.0], values, atol=1e-15)

    def test_negative_area_rejected(self):
        self.assertRaises(exceptions.InvalidParameter,
                          dynamics.excitation_probability, -0.1)

    def test_indistinguishability_reference_points(self):
        device = model.EmitterDevice()
        self.assertClose(0.88, dynamics.indistinguishability(device,
                                                             math.pi / 4))
        self.assertClose(0.73, dynamics.indistinguishability(device,
                                                             math.pi))
        self.assertEqual(0.0, dynamics.indistinguishability(device, 100.0))

    def test_calibrate_dephasing(self):
        nu_0, beta = dynamics.calibrate_dephasing(math.pi / 4, 0.88,
                                                  math.pi, 0.73)
        self.assertWithin(0.8900, nu_0, 1e-4)
        self.assertWithin(0.016211, beta, 1e-6)
        self.assertRaises(exceptions.InvalidParameter,
                          dynamics.calibrate_dephasing, 1.0, 0.8, 1.0, 0.7)


class TestLifetimes(base.TestCase):

    def setUp(self):
        super().setUp()
        self.device = model.EmitterDevice()
        self.cavity = model.CavityParams()

    def test_lorentzian_weight(self):
        self.assertEqual(1.0, dynamics.lorentzian_weight(0.0, 0.232))
        self.assertClose(0.5, dynamics.lorentzian_weight(0.116, 0.232))
        self.assertRaises(exceptions.InvalidParameter,
                          dynamics.lorentzian_weight, 0.1, 0.0)

    def test_effective_lifetime_limits(self):
        self.assertClose(168.0, dynamics.effective_lifetime(
            self.device, self.cavity, 0.0))
        far = dynamics.effective_lifetime(self.device, self.cavity, 1e3)
        self.assertWithin(1140.0, far, 1e-3)

    def test_effective_lifetime_off_resonance(self):
        lifetime = dynamics.effective_lifetime(self.device, self.cavity,
                                               -2.7)
        self.assertWithin(1128.0, lifetime, 1.0)
        self.assertWithin(5.71, lifetime / 168.0 - 1.0, 0.01)

    def test_emission_lifetimes(self):
        device = dataclasses.replace(self.device, detuning=-0.116,
                                     slow_component_fraction=0.2)
        lifetime, slow = dynamics.emission_lifetimes(device, self.cavity)
        self.assertClose(0.1, slow)
        self.assertGreater(lifetime, 168.0)
        self.assertRaises(exceptions.InvalidParameter,
                          dynamics.emission_lifetimes, device, None)


class TestEmit(base.TestCase):

    def setUp(self):
        super().setUp()
        self.device = model.EmitterDevice()
        self.bench = model.BenchConfig()

    def test_brightness_and_lifetime(self):
        train = dynamics.PulseTrain(math.pi, 20000)
        photons = dynamics.emit(self.device, self.bench, train, rng_seed=3)
        self.assertWithin(0.74, len(photons) / 20000.0, 0.02)
        self.assertWithin(168.0, photons.emission_time.mean(), 7.0)
        self.assertTrue((photons.slot == model.SLOT_ONLY).all())
        self.assertTrue((np.diff(photons.period_index) >= 0).all())
        np.testing.assert_allclose(0.73, photons.pair_coherence)

    def test_pair_mode_slots(self):
        train = dynamics.PulseTrain(math.pi / 4, 20000, pair_mode=True)
        photons = dynamics.emit(self.device, self.bench, train, rng_seed=4)
        expected = 2 * 20000 * math.sin(math.pi / 8) ** 2 * 0.74
        self.assertWithin(expected, len(photons), 5 * math.sqrt(expected))
        early = (photons.slot == model.SLOT_EARLY).sum()
        late = (photons.slot == model.SLOT_LATE).sum()
        self.assertEqual(len(photons), early + late)

    def test_surplus_photons_are_distinguishable(self):
        device = dataclasses.replace(self.device, multi_photon_prob=0.1)
        train = dynamics.PulseTrain(math.pi, 20000)
        photons = dynamics.emit(device, self.bench, train, rng_seed=5)
        extra = photons.take(photons.is_extra)
        self.assertWithin(2000, len(extra), 5 * math.sqrt(2000))
        self.assertTrue((extra.pair_coherence == 0).all())
        self.assertTrue((photons.polarization == model.POL_H).all())

    def test_surplus_follows_emission_order(self):
        device = dataclasses.replace(self.device, multi_photon_prob=0.1)
        self.assertClose(0.1, dynamics.surplus_probability(device, math.pi))
        self.assertClose(0.025,
                         dynamics.surplus_probability(device, math.pi / 2))
        linear = dataclasses.replace(device, multi_photon_order=1.0)
        self.assertClose(0.05,
                         dynamics.surplus_probability(linear, math.pi / 2))
        photons = dynamics.emit(device, self.bench,
                                dynamics.PulseTrain(math.pi / 2, 40000),
                                rng_seed=6)
        extra = int(photons.is_extra.sum())
        self.assertWithin(1000, extra, 5 * math.sqrt(1000))

    def test_independent_of_threads(self):
        n = 2 * sharding.SHARD_PERIODS + 100
        train = dynamics.PulseTrain(math.pi / 8, n)
        one = dynamics.emit(self.device, self.bench, train, 11, threads=1)
        many = dynamics.emit(self.device, self.bench, train, 11, threads=3)
        for name, _dtype in model.PhotonStream.COLUMNS:
            np.testing.assert_array_equal(getattr(one, name),
                                          getattr(many, name))

    def test_seed_changes_stream(self):
        train = dynamics.PulseTrain(math.pi, 1000)
        a = dynamics.emit(self.device, self.bench, train, 1)
        b = dynamics.emit(self.device, self.bench, train, 2)
        self.assertFalse(np.array_equal(a.emission_time[:10],
                                        b.emission_time[:10]))

    def test_invalid_inputs(self):
        self.assertRaises(exceptions.InvalidParameter, dynamics.emit,
                          self.device, self.bench,
                          dynamics.PulseTrain(math.pi, 0), 1)
        detuned = dataclasses.replace(self.device, detuning=-2.7)
        self.assertRaises(exceptions.InvalidParameter, dynamics.emit,
                          detuned, self.bench,
                          dynamics.PulseTrain(math.pi, 10), 1)
        bad = dataclasses.replace(self.bench, bs_reflectance=1.0)
        self.assertRaises(exceptions.InvalidParameter, dynamics.emit,
                          self.device, bad,
                          dynamics.PulseTrain(math.pi, 10), 1)


class TestCalibration(base.TestCase):

    def test_expected_detected_rate(self):
        device = model.EmitterDevice()
        bench = model.BenchConfig()
        rate = dynamics.expected_detected_rate(device, bench, math.pi)
        self.assertWithin(1.274e6, rate, 1e3)
        half = dynamics.expected_detected_rate(device, bench, math.pi / 2)
        self.assertClose(rate / 2.0, half)

    def test_calibrate_multi_photon(self):
        device = model.EmitterDevice()
        p_mp = dynamics.calibrate_multi_photon(device, 0.0092)
        self.assertWithin(0.003436, p_mp, 1e-5)
        self.assertWithin(0.0092, oracle.hbt_g2(0.74, p_mp), 1e-9)
        self.assertEqual(0.0, dynamics.calibrate_multi_photon(device, 0.0))

    def test_calibrate_multi_photon_unreachable(self):
        device = model.EmitterDevice(extraction_efficiency=0.1)
        self.assertRaises(exceptions.InvalidParameter,
                          dynamics.calibrate_multi_photon, device, 0.5)
