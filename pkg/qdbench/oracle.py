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

"""Exhaustive enumeration of per-period photon configurations.

These are the combinatorial references for the Monte-Carlo benches: every
photon occupancy, interferometer arm choice and detector assignment of a
single period is enumerated with its exact probability, and the expected
D1/D2 coincidence areas are accumulated.  Areas are per period and in
units of coincidences.
"""

import itertools
import logging
import math

import numpy as np

from qdbench._i18n import _
from qdbench import exceptions

LOG = logging.getLogger(__name__)

D1 = 1
D2 = 2

# Ports of the second HOM splitter.
PORT_SHORT = 0
PORT_LONG = 1

HOM_DELAYS = (-2, -1, 0, 1, 2)

LOW_BRIGHTNESS = 1e-3


def _occupancies(probabilities):
    """Yield ``(present_flags, weight)`` over independent photon sources."""
    for flags in itertools.product((False, True), repeat=len(probabilities)):
        weight = 1.0
        for present, prob in zip(flags, probabilities):
            weight *= prob if present else 1.0 - prob
        if weight > 0:
            yield flags, weight


def hbt_peak_areas(p_primary, p_extra, efficiency=1.0):
    """Expected ``(central, side)`` HBT coincidence areas per period.

    A period carries a primary photon with probability ``p_primary`` and
    an independent surplus photon with probability ``p_extra``.  Each
    photon survives collection with ``efficiency`` and picks D1 or D2 with
    probability 1/2.
    """
    for value in (p_primary, p_extra, efficiency):
        if not 0 <= value <= 1:
            raise exceptions.InvalidParameter(
                _('Probabilities must lie in [0, 1], got %s') % value)
    central = 0.0
    mean_d1 = 0.0
    mean_d2 = 0.0
    for flags, weight in _occupancies((p_primary * efficiency,
                                       p_extra * efficiency)):
        n_photons = sum(flags)
        for detectors in itertools.product((D1, D2), repeat=n_photons):
            prob = weight * 0.5 ** n_photons
            n1 = detectors.count(D1)
            n2 = detectors.count(D2)
            central += prob * n1 * n2
            mean_d1 += prob * n1
            mean_d2 += prob * n2
    return central, mean_d1 * mean_d2


def hbt_g2(p_primary, p_extra):
    """Central-to-side area ratio of the HBT comb.

    Equals ``2*p*q / (p+q)**2``; collection efficiency cancels.
    """
    central, side = hbt_peak_areas(p_primary, p_extra)
    if side == 0:
        raise exceptions.ExtractionError(
            _('No side-peak coincidences without emission'))
    return central / side


def extra_ratio_from_g2(g2):
    """Surplus-to-primary emission ratio ``q/p`` giving ``g2``.

    Smaller root of ``g2*(1+x)**2 = 2*x``; defined for ``0 <= g2 <= 1/2``.
    """
    if not 0 <= g2 <= 0.5:
        raise exceptions.InvalidParameter(
            _('g2(0) must lie in [0, 0.5], got %s') % g2)
    return g2 / ((1.0 - g2) + math.sqrt(1.0 - 2.0 * g2))


def _pair_outcomes(short, long_, reflectance, one_minus_eps):
    """Detector outcomes of two photons at opposite splitter ports."""
    transmittance = 1.0 - reflectance
    if (short['extra'] or long_['extra'] or
            short['pol'] != long_['pol']):
        nu_eff = 0.0
    else:
        nu_eff = min(short['nu'], long_['nu'])
    overlap = reflectance ** 2 + transmittance ** 2
    coincidence = overlap - (2.0 * reflectance * transmittance *
                             one_minus_eps ** 2 * nu_eff)
    bunched = 1.0 - coincidence
    return [((D1, D2), coincidence * transmittance ** 2 / overlap),
            ((D2, D1), coincidence * reflectance ** 2 / overlap),
            ((D1, D1), bunched / 2.0),
            ((D2, D2), bunched / 2.0)]


def _independent_outcomes(photons, reflectance):
    transmittance = 1.0 - reflectance
    outcomes = []
    for detectors in itertools.product((D1, D2), repeat=len(photons)):
        prob = 1.0
        for photon, detector in zip(photons, detectors):
            to_d1 = transmittance if photon['port'] == PORT_SHORT \
                else reflectance
            prob *= to_d1 if detector == D1 else 1.0 - to_d1
        outcomes.append((detectors, prob))
    return outcomes


def _cluster_outcomes(cluster, reflectance, one_minus_eps):
    if len(cluster) == 2 and cluster[0]['port'] != cluster[1]['port']:
        short, long_ = sorted(cluster, key=lambda ph: ph['port'])
        outcomes = _pair_outcomes(short, long_, reflectance, one_minus_eps)
        if short is cluster[0]:
            return outcomes
        return [((b, a), prob) for (a, b), prob in outcomes]
    return _independent_outcomes(cluster, reflectance)


def hom_cluster_areas(p_primary, p_extra, nu_pair, reflectance=0.5,
                      one_minus_eps=1.0, orthogonal=False, efficiency=1.0):
    """Expected intra-period HOM coincidence areas.

    Each of the two pulse slots carries a primary photon with probability
    ``p_primary`` and a surplus photon with probability ``p_extra``.  A
    surviving photon takes the short arm (port a) or the long arm (port b,
    delayed by one pulse spacing) with probability 1/2; in orthogonal mode
    long-arm photons have their polarization flipped.  Photons with equal
    arrival form a cluster; a two-photon cluster at opposite ports follows
    the pair rule, anything else routes independently.

    :returns: array of areas at delays ``-2..+2`` pulse spacings, where
        delay is the D2 arrival minus the D1 arrival.
    """
    sources = []
    for slot in (0, 1):
        sources.append({'slot': slot, 'extra': False,
                        'nu': 0.0 if p_primary == 0 else nu_pair})
        sources.append({'slot': slot, 'extra': True, 'nu': 0.0})
    probabilities = [(p_extra if src['extra'] else p_primary) * efficiency
                     for src in sources]

    areas = np.zeros(len(HOM_DELAYS))
    for flags, weight in _occupancies(probabilities):
        present = [src for src, flag in zip(sources, flags) if flag]
        for arms in itertools.product((PORT_SHORT, PORT_LONG),
                                      repeat=len(present)):
            photons = []
            for src, arm in zip(present, arms):
                flipped = orthogonal and arm == PORT_LONG
                photons.append(dict(src, port=arm,
                                    arrival=src['slot'] + arm,
                                    pol=1 if flipped else 0))
            prob_arms = weight * 0.5 ** len(photons)
            clusters = {}
            for photon in photons:
                clusters.setdefault(photon['arrival'], []).append(photon)
            per_cluster = [(members, _cluster_outcomes(
                members, reflectance, one_minus_eps))
                for members in clusters.values()]
            for combo in itertools.product(
                    *[outcomes for _m, outcomes in per_cluster]):
                prob = prob_arms
                d1_times = []
                d2_times = []
                for (members, _o), (detectors, p_out) in zip(per_cluster,
                                                             combo):
                    prob *= p_out
                    for photon, detector in zip(members, detectors):
                        target = d1_times if detector == D1 else d2_times
                        target.append(photon['arrival'])
                if prob == 0:
                    continue
                for t1 in d1_times:
                    for t2 in d2_times:
                        areas[HOM_DELAYS.index(t2 - t1)] += prob
    return areas


def hom_visibility(p_primary, p_extra, nu_pair, reflectance=0.5,
                   one_minus_eps=1.0, efficiency=1.0):
    """Raw visibility ``1 - A_par(0)/A_orth(0)`` predicted by enumeration."""
    kwargs = dict(reflectance=reflectance, one_minus_eps=one_minus_eps,
                  efficiency=efficiency)
    parallel = hom_cluster_areas(p_primary, p_extra, nu_pair, **kwargs)
    orthogonal = hom_cluster_areas(p_primary, p_extra, nu_pair,
                                   orthogonal=True, **kwargs)
    zero = HOM_DELAYS.index(0)
    if orthogonal[zero] == 0:
        raise exceptions.ExtractionError(
            _('Orthogonal central area is zero'))
    return 1.0 - parallel[zero] / orthogonal[zero]


def multi_photon_kappa(g_star, reflectance=0.5, one_minus_eps=1.0,
                       nu_pair=1.0, pulse_area=math.pi, order=1.0,
                       brightness=LOW_BRIGHTNESS):
    """Combinatorial factor of the additive multi-photon correction.

    ``g_star`` is the HBT g2(0) at a pi-pulse.  The surplus-to-primary
    ratio it implies is carried to ``pulse_area`` as
    ``P_exc(pulse_area)**(order - 1)``, and the raw visibility of pairs
    with coherence ``nu_pair`` is enumerated with and without surplus
    photons in the low-brightness limit:
    ``kappa = (nu_raw(clean) - nu_raw(g*)) / (2*g*)``.  For ``g* = 0`` the
    limit is approached with a vanishing ``g*``.
    """
    if not 0 <= g_star < 0.5:
        raise exceptions.InvalidParameter(
            _('g_star must lie in [0, 0.5), got %s') % g_star)
    if order < 1:
        raise exceptions.InvalidParameter(
            _('Multi-photon order must be at least 1, got %s') % order)
    g_eval = g_star if g_star > 0 else 1e-6
    scale = math.sin(pulse_area / 2.0) ** (2.0 * (order - 1.0))
    ratio = extra_ratio_from_g2(g_eval) * scale
    clean = hom_visibility(brightness, 0.0, nu_pair, reflectance,
                           one_minus_eps)
    diluted = hom_visibility(brightness, ratio * brightness, nu_pair,
                             reflectance, one_minus_eps)
    kappa = (clean - diluted) / (2.0 * g_eval)
    LOG.debug('Multi-photon kappa %.6g at g*=%.6g, R=%.4g, nu=%.4g, '
              'theta=%.4g', kappa, g_star, reflectance, nu_pair, pulse_area)
    return kappa
