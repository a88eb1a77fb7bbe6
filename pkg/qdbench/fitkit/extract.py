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

"""Ratio observables formed from fitted peak areas."""

import logging
import math

import numpy as np

from qdbench._i18n import _
from qdbench import exceptions
from qdbench import model
from qdbench import oracle

LOG = logging.getLogger(__name__)

CORRECTION_FORMULA = ('nu_corr = (nu_raw + 2*g_star*kappa) * '
                      '(R^2 + T^2) / (2*R*T*(1-eps)^2)')

# The surplus photon model only reproduces g2(0) below this bound.
MAX_CORRECTABLE_G2 = 0.5


def _side_indices(report, n_side_peaks):
    central = report.peak_nearest(0.0)
    others = [i for i in range(len(report.peaks)) if i != central]
    others.sort(key=lambda i: abs(report.peaks[i].center))
    if n_side_peaks is None:
        return central, others
    wanted = 2 * n_side_peaks
    if len(others) < wanted:
        raise exceptions.InvalidParameter(
            _('Report has %(have)d side peak(s), %(want)d requested') %
            {'have': len(others), 'want': wanted})
    return central, others[:wanted]


def extract_g2(report, n_side_peaks=None):
    """g2(0) = A_central / mean(A_side) with covariance propagation.

    ``n_side_peaks`` counts peaks per side (``k = 1..n``); by default every
    non-central peak of the report is averaged.
    """
    if len(report.peaks) < 3:
        raise exceptions.InvalidParameter(
            _('g2(0) needs a central peak and at least two side peaks'))
    central, sides = _side_indices(report, n_side_peaks)
    areas = report.areas
    mean_side = float(np.mean(areas[sides]))
    if mean_side <= 0:
        raise exceptions.ExtractionError(
            _('Side peaks carry no area; g2(0) is undefined'))
    g2 = float(areas[central]) / mean_side
    gradient = np.zeros(len(areas))
    gradient[central] = 1.0 / mean_side
    gradient[sides] = -g2 / (mean_side * len(sides))
    variance = float(gradient @ report.covariance() @ gradient)
    return model.Measurement(g2, float(np.sqrt(max(variance, 0.0))))


def central_area(report):
    peak = report.peaks[report.peak_nearest(0.0)]
    return peak.area, peak.area_err


def extract_visibility(parallel, orthogonal):
    """nu_raw = 1 - A_par(0) / A_orth(0) with propagated error."""
    par, par_err = central_area(parallel)
    orth, orth_err = central_area(orthogonal)
    if orth <= 0:
        raise exceptions.ExtractionError(
            _('Orthogonal central area is zero; visibility is undefined'))
    ratio = par / orth
    err = np.hypot(par_err / orth, ratio * orth_err / orth)
    return model.Measurement(1.0 - ratio, float(err))


def _imbalance(reflectance, one_minus_eps):
    transmittance = 1.0 - reflectance
    if reflectance * transmittance <= 0:
        raise exceptions.InvalidParameter(
            _('R*T must be positive, got R=%s') % reflectance)
    if not 0 < one_minus_eps <= 1:
        raise exceptions.InvalidParameter(
            _('one_minus_eps must lie in (0, 1], got %s') % one_minus_eps)
    return ((reflectance ** 2 + transmittance ** 2) /
            (2.0 * reflectance * transmittance * one_minus_eps ** 2))


def correction_kappa(nu_raw, reflectance, one_minus_eps=1.0, g_star=0.0,
                     pulse_area=model.REFERENCE_HOM_PULSE_AREA,
                     multi_photon_order=model.DEFAULT_MULTI_PHOTON_ORDER):
    """kappa of the multi-photon term for one raw visibility.

    The enumeration runs at the pair coherence implied by ``nu_raw``
    after the splitter and contrast correction, clamped to [0, 1].
    """
    nu_pair = min(1.0, max(0.0, nu_raw * _imbalance(reflectance,
                                                    one_minus_eps)))
    return multi_photon_kappa(g_star, reflectance, one_minus_eps,
                              nu_pair=nu_pair, pulse_area=pulse_area,
                              order=multi_photon_order)


def correct_visibility(nu_raw, reflectance, one_minus_eps=1.0, g_star=0.0,
                       kappa=None, nu_raw_err=0.0, g_star_err=0.0,
                       pulse_area=model.REFERENCE_HOM_PULSE_AREA,
                       multi_photon_order=model.DEFAULT_MULTI_PHOTON_ORDER):
    """Correct a raw visibility for splitter imbalance, contrast and g2.

    ``g_star`` is the pi-pulse HBT g2(0).  ``kappa`` defaults to
    :func:`correction_kappa` for the HOM ``pulse_area`` and the surplus
    emission order of the device.

    :returns: a :class:`qdbench.model.Measurement`
    """
    imbalance = _imbalance(reflectance, one_minus_eps)
    if not 0 <= g_star < 1:
        raise exceptions.InvalidParameter(
            _('g_star must lie in [0, 1), got %s') % g_star)
    if kappa is None:
        kappa = correction_kappa(nu_raw, reflectance, one_minus_eps, g_star,
                                 pulse_area, multi_photon_order)
    value = (nu_raw + 2.0 * g_star * kappa) * imbalance
    err = imbalance * np.hypot(nu_raw_err, 2.0 * kappa * g_star_err)
    return model.Measurement(value, float(err))


def multi_photon_kappa(g_star, reflectance=0.5, one_minus_eps=1.0,
                       nu_pair=1.0, pulse_area=math.pi, order=1.0):
    if g_star >= MAX_CORRECTABLE_G2:
        raise exceptions.InvalidParameter(
            _('g_star must be below %(max)s for the multi-photon term, '
              'got %(g)s') % {'max': MAX_CORRECTABLE_G2, 'g': g_star})
    return oracle.multi_photon_kappa(g_star, reflectance, one_minus_eps,
                                     nu_pair=nu_pair, pulse_area=pulse_area,
                                     order=order)


def correction_assumption(kappa):
    return '%s with kappa=%.6g' % (CORRECTION_FORMULA, kappa)
