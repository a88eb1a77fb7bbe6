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
from scipy import integrate

from qdbench import exceptions
from qdbench.fitkit import peaks
from qdbench.tests import base


def _finite_difference(func, t, params, index, rel=1e-6):
    step = rel * max(abs(params[index]), 1.0)
    up = list(params)
    down = list(params)
    up[index] += step
    down[index] -= step
    return (func(t, *up) - func(t, *down)) / (2.0 * step)


def _two_sided_convolution(u, tau, sigma):
    """exp(-|s|/tau)/(2 tau) convolved with N(0, sigma) by quadrature."""
    def integrand(s):
        return (math.exp(-abs(s) / tau) / (2.0 * tau) *
                math.exp(-0.5 * ((u - s) / sigma) ** 2) /
                (sigma * math.sqrt(2.0 * math.pi)))

    span = abs(u) + 40.0 * tau + 12.0 * sigma
    total = 0.0
    for lo, hi in ((-span, 0.0), (0.0, span)):
        points = [u] if lo < u < hi else None
        value, _err = integrate.quad(integrand, lo, hi, points=points,
                                     epsabs=0.0, epsrel=1e-10, limit=200)
        total += value
    return total


class TestEmgPeak(base.TestCase):

    def test_unit_area(self):
        t = np.arange(-20000.0, 20000.0, 1.0)
        total = peaks.emg_peak(t, 25.0, 1000.0, 168.0, 520.0).sum()
        self.assertWithin(1000.0, total, 1e-3)

    def test_matches_quadrature(self):
        tau, sigma, t0 = 168.0, 520.0, 25.0
        span = 10.0 * (tau + sigma)
        t = np.linspace(t0 - span, t0 + span, 41)
        expected = [_two_sided_convolution(x - t0, tau, sigma) for x in t]
        np.testing.assert_allclose(expected,
                                   peaks.emg_peak(t, t0, 1.0, tau, sigma),
                                   rtol=1e-6, atol=0.0)

    def test_area_by_quadrature(self):
        def density(x):
            return float(peaks.emg_peak(x, 25.0, 1000.0, 168.0, 520.0))

        area = sum(integrate.quad(density, lo, hi, epsabs=0.0,
                                  epsrel=1e-10, limit=200)[0]
                   for lo, hi in ((-50000.0, 25.0), (25.0, 50000.0)))
        self.assertWithin(1000.0, area, 1e-6)

    def test_symmetric(self):
        t = np.linspace(0.0, 5000.0, 51)
        np.testing.assert_allclose(peaks.emg_peak(100.0 + t, 100.0, 1.0,
                                                  300.0, 200.0),
                                   peaks.emg_peak(100.0 - t, 100.0, 1.0,
                                                  300.0, 200.0),
                                   rtol=1e-12)

    def test_narrow_gaussian_limit(self):
        value = peaks.emg_peak(1000.0, 0.0, 1.0, 500.0, 1.0)
        self.assertWithin(math.exp(-2.0) / 1000.0, value, 1e-6)

    def test_short_decay_limit(self):
        value = peaks.emg_peak(300.0, 0.0, 1.0, 0.01, 200.0)
        expected = math.exp(-0.5 * 1.5 ** 2) / (200.0 * math.sqrt(2 * math.pi))
        self.assertWithin(expected, value, 1e-3 * expected)

    def test_far_tails_are_finite(self):
        t = np.array([-1e7, -5000.0, 0.0, 5000.0, 1e7])
        values = peaks.emg_peak(t, 0.0, 1.0, 100.0, 10.0)
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.all(values >= 0))

    def test_jacobian_matches_finite_differences(self):
        t = np.arange(-3000.0, 3000.0, 50.0)
        params = [10.0, 1000.0, 168.0, 300.0]
        jac = peaks.emg_peak_jacobian(t, *params)
        self.assertEqual((len(t), 4), jac.shape)
        for k in range(4):
            numeric = _finite_difference(peaks.emg_peak, t, params, k)
            scale = np.abs(jac[:, k]).max()
            np.testing.assert_allclose(numeric, jac[:, k], rtol=0,
                                       atol=1e-5 * scale,
                                       err_msg=peaks.PARAMETERS[k])

    def test_invalid_shape(self):
        self.assertRaises(exceptions.InvalidParameter, peaks.emg_peak,
                          0.0, 0.0, 1.0, 0.0, 10.0)
        self.assertRaises(exceptions.InvalidParameter, peaks.emg_peak,
                          0.0, 0.0, 1.0, 10.0, -1.0)


class TestDecayKernel(base.TestCase):

    def test_unit_area(self):
        t = np.arange(-2000.0, 20000.0, 1.0)
        total = peaks.decay_kernel(t, 0.0, 1.0, 168.0, 50.0).sum()
        self.assertWithin(1.0, total, 1e-6)

    def test_jacobian_matches_finite_differences(self):
        t = np.arange(-500.0, 3000.0, 20.0)
        params = [5.0, 1e4, 168.0, 50.0]
        jac = peaks.decay_kernel_jacobian(t, *params)
        for k in range(4):
            numeric = _finite_difference(peaks.decay_kernel, t, params, k)
            scale = np.abs(jac[:, k]).max()
            np.testing.assert_allclose(numeric, jac[:, k], rtol=0,
                                       atol=1e-5 * scale,
                                       err_msg=peaks.PARAMETERS[k])
