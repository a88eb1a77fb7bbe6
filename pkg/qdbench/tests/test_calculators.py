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

import logging

import fixtures

from qdbench import exceptions
from qdbench.fitkit import calculators
from qdbench import model
from qdbench.tests import base


class TestPurcell(base.TestCase):

    def test_from_lifetimes(self):
        f_p = calculators.purcell_from_lifetimes(168.0, 1140.0, 5.0, 19.0)
        self.assertWithin(5.786, f_p.value, 1e-3)
        self.assertWithin(0.23, f_p.error, 0.005)
        self.assertEqual((), f_p.flags)

    def test_swapped_lifetimes_warn(self):
        logger = self.useFixture(fixtures.FakeLogger(level=logging.WARNING))
        f_p = calculators.purcell_from_lifetimes(1140.0, 168.0)
        self.assertLess(f_p.value, 0.0)
        self.assertIn('may be swapped', logger.output)
        self.assertEqual((calculators.LIFETIMES_SWAPPED,), f_p.flags)

    def test_invalid_lifetimes(self):
        self.assertRaises(exceptions.InvalidParameter,
                          calculators.purcell_from_lifetimes, 0.0, 1140.0)

    def test_theoretical_maximum(self):
        cavity = model.CavityParams()
        self.assertClose(5.9, calculators.purcell_theoretical_max(cavity))
        microns = model.CavityParams(
            mode_volume=cavity.mode_volume_um3,
            mode_volume_unit=model.CUBIC_MICRON)
        self.assertClose(5.9, calculators.purcell_theoretical_max(microns))

    def test_maximum_scales_with_quality_factor(self):
        cavity = model.CavityParams(quality_factor=2965.0,
                                    mode_linewidth=464.0)
        self.assertClose(2.95, calculators.purcell_theoretical_max(cavity))


class TestDeviceEfficiency(base.TestCase):

    def test_efficiency(self):
        eta = calculators.device_efficiency(1.3e6, 82e6, 0.021, 0.001)
        self.assertWithin(0.755, eta.value, 1e-3)
        self.assertWithin(0.036, eta.error, 1e-3)

    def test_above_unity_warns(self):
        logger = self.useFixture(fixtures.FakeLogger(level=logging.WARNING))
        eta = calculators.device_efficiency(3e6, 82e6, 0.021)
        self.assertGreater(eta.value, 1.0)
        self.assertIn('exceeds unity', logger.output)

    def test_invalid(self):
        self.assertRaises(exceptions.InvalidParameter,
                          calculators.device_efficiency, 1e6, 0.0, 0.021)
        self.assertRaises(exceptions.InvalidParameter,
                          calculators.device_efficiency, -1.0, 82e6, 0.021)
