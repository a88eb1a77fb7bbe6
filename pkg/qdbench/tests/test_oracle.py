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

import math

import numpy as np

from qdbench import exceptions
from qdbench import oracle
from qdbench.tests import base


class TestHbtOracle(base.TestCase):

    def test_closed_form(self):
        p, q = 0.37, 0.0017
        self.assertClose(2 * p * q / (p + q) ** 2, oracle.hbt_g2(p, q))

    def test_single_photons_do_not_coincide(self):
        central, side = oracle.hbt_peak_areas(0.5, 0.0)
        self.assertEqual(0.0, central)
        self.assertClose(0.0625, side)

    def test_efficiency_cancels(self):
        full = oracle.hbt_peak_areas(0.4, 0.01)
        lossy = oracle.hbt_peak_areas(0.4, 0.01, efficiency=0.1)
        self.assertClose(full[0] / full[1], lossy[0] / lossy[1])
        self.assertClose(full[1] * 1e-2, lossy[1])

    def test_extra_ratio_inverts_g2(self):
        for g2 in (0.0, 0.0092, 0.1, 0.5):
            ratio = oracle.extra_ratio_from_g2(g2)
            self.assertWithin(g2, oracle.hbt_g2(0.5, 0.5 * ratio), 1e-12)

    def test_out_of_range(self):
        self.assertRaises(exceptions.InvalidParameter,
                          oracle.extra_ratio_from_g2, 0.6)
        self.assertRaises(exceptions.InvalidParameter,
                          oracle.hbt_peak_areas, 1.2, 0.0)
        self.assertRaises(exceptions.ExtractionError, oracle.hbt_g2, 0, 0)


class TestHomOracle(base.TestCase):

    def test_low_brightness_visibility_is_pair_coherence(self):
        self.assertWithin(0.89, oracle.hom_visibility(1e-4, 0.0, 0.89),
                          1e-3)

    def test_imbalance_and_contrast_reduce_visibility(self):
        r, ome = 1.1 / 2.1, 0.98
        t = 1.0 - r
        expected = 2 * r * t * ome ** 2 / (r ** 2 + t ** 2)
        self.assertWithin(expected,
                          oracle.hom_visibility(1e-4, 0.0, 1.0, r, ome),
                          1e-3)

    def test_balanced_cluster_is_symmetric(self):
        areas = oracle.hom_cluster_areas(0.05, 0.001, 0.8, orthogonal=True)
        self.assertClose(areas[0], areas[4])
        self.assertClose(areas[1], areas[3])

    def test_orthogonal_cluster_ratio(self):
        areas = oracle.hom_cluster_areas(1e-3, 0.0, 1.0, orthogonal=True)
        np.testing.assert_allclose([1.0, 2.0, 2.0, 2.0, 1.0],
                                   areas / areas[0], rtol=1e-6)

    def test_parallel_central_peak_vanishes(self):
        areas = oracle.hom_cluster_areas(1e-3, 0.0, 1.0)
        orth = oracle.hom_cluster_areas(1e-3, 0.0, 1.0, orthogonal=True)
        self.assertLess(areas[2], 1e-2 * orth[2])

    def test_kappa_low_brightness_limit(self):
        self.assertWithin(1.5, oracle.multi_photon_kappa(0.0), 0.01)
        self.assertWithin(1.5, oracle.multi_photon_kappa(0.0092), 0.05)

    def test_kappa_rejects_large_g(self):
        self.assertRaises(exceptions.InvalidParameter,
                          oracle.multi_photon_kappa, 0.5)

    def test_kappa_scales_with_pair_coherence(self):
        full = oracle.multi_photon_kappa(0.0092, 1.1 / 2.1, 0.98)
        half = oracle.multi_photon_kappa(0.0092, 1.1 / 2.1, 0.98,
                                         nu_pair=0.5)
        self.assertClose(0.5 * full, half, rel=1e-6)

    def test_kappa_follows_surplus_order(self):
        theta = math.pi / 4
        linear = oracle.multi_photon_kappa(1e-4, pulse_area=theta)
        self.assertEqual(oracle.multi_photon_kappa(1e-4), linear)
        quadratic = oracle.multi_photon_kappa(1e-4, pulse_area=theta,
                                              order=2.0)
        self.assertClose(math.sin(theta / 2) ** 2 * linear, quadratic,
                         rel=1e-3)

    def test_kappa_rejects_sublinear_order(self):
        self.assertRaises(exceptions.InvalidParameter,
                          oracle.multi_photon_kappa, 0.001, order=0.5)
