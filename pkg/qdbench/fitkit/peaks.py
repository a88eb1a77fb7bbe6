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

"""Exponentials convolved with a Gaussian, with analytic derivatives.

The one-sided kernel ``h(u)`` is the unit-area convolution of
``exp(-u/tau)/tau`` (``u >= 0``) with a Gaussian of width ``sigma``::

    h(u) = exp(sigma**2/(2*tau**2) - u/tau) * erfc(z) / (2*tau)
    z = (sigma**2/tau - u) / (sigma*sqrt(2))

For ``z >= 0`` the product is evaluated as
``exp(-u**2/(2*sigma**2)) * erfcx(z)`` which never overflows.  A
two-sided peak is ``A/2 * (h(u) + h(-u))``.
"""

import math

import numpy as np
from scipy import special

from qdbench._i18n import _
from qdbench import exceptions

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

# Jacobian column order of both kernels.
PARAMETERS = ('center', 'area', 'decay_time', 'sigma')


def _check_shape(tau, sigma):
    if tau <= 0 or sigma <= 0:
        raise exceptions.InvalidParameter(
            _('decay time and sigma must be positive, got %(tau)s and '
              '%(sigma)s') % {'tau': tau, 'sigma': sigma})


def gaussian(u, sigma):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * (u / sigma) ** 2) / (sigma * SQRT2PI)


def one_sided(u, tau, sigma):
    """Unit-area exponential decay convolved with a Gaussian."""
    u = np.asarray(u, dtype=float)
    z = (sigma ** 2 / tau - u) / (sigma * SQRT2)
    scaled = np.exp(-0.5 * (u / sigma) ** 2) * special.erfcx(
        np.maximum(z, 0.0))
    with np.errstate(over='ignore', invalid='ignore'):
        direct = np.exp(sigma ** 2 / (2.0 * tau ** 2) - u / tau) * \
            special.erfc(np.minimum(z, 0.0))
    return np.where(z >= 0, scaled, direct) / (2.0 * tau)


def decay_kernel(t, t0, area, tau, sigma):
    """Single exponential decay starting at ``t0`` seen through an IRF."""
    _check_shape(tau, sigma)
    return area * one_sided(np.asarray(t, dtype=float) - t0, tau, sigma)


def decay_kernel_jacobian(t, t0, area, tau, sigma):
    """Columns d/d(t0, area, tau, sigma) of :func:`decay_kernel`."""
    _check_shape(tau, sigma)
    u = np.asarray(t, dtype=float) - t0
    h = one_sided(u, tau, sigma)
    phi = gaussian(u, sigma)
    d_t0 = area * (h - phi) / tau
    d_tau = area * (h * (u / tau ** 2 - 1.0 / tau - sigma ** 2 / tau ** 3) +
                    sigma ** 2 * phi / tau ** 3)
    d_sigma = area * sigma / tau * (-u * phi / sigma ** 2 -
                                    (phi - h) / tau)
    return np.stack([d_t0, h, d_tau, d_sigma], axis=-1)


def emg_peak(t, t0, area, tau, sigma):
    """Two-sided exponential of ``area`` convolved with a Gaussian.

    Integrates to ``area``, is symmetric about ``t0``, tends to
    ``area/(2*tau)*exp(-|t-t0|/tau)`` for small ``sigma`` and to a Gaussian
    of area ``area`` for small ``tau``.
    """
    _check_shape(tau, sigma)
    u = np.asarray(t, dtype=float) - t0
    return 0.5 * area * (one_sided(u, tau, sigma) + one_sided(-u, tau, sigma))


def emg_peak_jacobian(t, t0, area, tau, sigma):
    """Columns d/d(t0, area, tau, sigma) of :func:`emg_peak`."""
    _check_shape(tau, sigma)
    u = np.asarray(t, dtype=float) - t0
    h_plus = one_sided(u, tau, sigma)
    h_minus = one_sided(-u, tau, sigma)
    total = h_plus + h_minus
    diff = h_plus - h_minus
    phi = gaussian(u, sigma)
    d_t0 = area / (2.0 * tau) * diff
    d_area = 0.5 * total
    d_tau = 0.5 * area * (-total / tau - sigma ** 2 * total / tau ** 3 +
                          u * diff / tau ** 2 +
                          2.0 * sigma ** 2 * phi / tau ** 3)
    d_sigma = area * sigma / tau ** 2 * (0.5 * total - phi)
    return np.stack([d_t0, d_area, d_tau, d_sigma], axis=-1)
