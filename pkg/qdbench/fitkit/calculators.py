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

"""Closed-form device figures of merit."""

import logging
import math
import typing

from qdbench._i18n import _
from qdbench import exceptions
from qdbench import model

LOG = logging.getLogger(__name__)

LIFETIMES_SWAPPED = 'T_on longer than T_off; lifetimes may be swapped'


class PurcellFactor(typing.NamedTuple):
    value: float
    error: float
    flags: tuple = ()


def purcell_from_lifetimes(t_on, t_off, t_on_err=0.0, t_off_err=0.0):
    """F_P = T_off/T_on - 1 with first-order error propagation.

    :returns: a :class:`PurcellFactor`; ``flags`` carries
        ``LIFETIMES_SWAPPED`` when ``t_on > t_off``
    """
    if t_on <= 0 or t_off <= 0:
        raise exceptions.InvalidParameter(
            _('Lifetimes must be positive, got %(on)s and %(off)s') %
            {'on': t_on, 'off': t_off})
    flags = ()
    if t_on > t_off:
        flags = (LIFETIMES_SWAPPED,)
        LOG.warning('T_on=%s ps is longer than T_off=%s ps; the lifetimes '
                    'may be swapped', t_on, t_off)
    ratio = t_off / t_on
    err = ratio * math.hypot(t_on_err / t_on, t_off_err / t_off)
    return PurcellFactor(ratio - 1.0, err, flags)


def purcell_theoretical_max(cavity):
    """3 Q (lambda/n)^3 / (4 pi^2 V_M), V_M converted to cubic microns."""
    model.ensure_valid(cavity=cavity)
    cubic = (cavity.wavelength / cavity.refractive_index) ** 3
    return (3.0 * cavity.quality_factor * cubic /
            (4.0 * math.pi ** 2 * cavity.mode_volume_um3))


def device_efficiency(count_rate, rep_rate, setup_efficiency,
                      setup_efficiency_err=0.0, count_rate_err=0.0):
    """eta = count_rate / (rep_rate * eta_setup); rates in Hz."""
    if count_rate < 0 or rep_rate <= 0 or setup_efficiency <= 0:
        raise exceptions.InvalidParameter(
            _('Rates and setup efficiency must be positive'))
    eta = count_rate / (rep_rate * setup_efficiency)
    rel = math.hypot(setup_efficiency_err / setup_efficiency,
                     count_rate_err / count_rate if count_rate else 0.0)
    if eta > 1:
        LOG.warning('Device efficiency %.3g exceeds unity; check the setup '
                    'efficiency calibration', eta)
    return model.Measurement(eta, eta * rel)
