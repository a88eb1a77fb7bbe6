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

"""Unbalanced Mach-Zehnder interferometer with a HOM output splitter.

The first splitter is a fixed 50/50 splitter; its short arm feeds port a
and its long arm feeds port b of the second splitter (R/T).  Interference
is applied as a pairwise event rule on two-photon clusters.
"""

import dataclasses
import logging

import numpy as np

from qdbench._i18n import _
from qdbench import dynamics
from qdbench import exceptions
from qdbench import model
from qdbench.optics import detection
from qdbench.optics import pluginbase
from qdbench import sharding

LOG = logging.getLogger(__name__)

WINDOW_LIFETIMES = 4.0


def coincidence_probability(reflectance, one_minus_eps, nu_eff):
    """Probability that a two-photon cluster leaves by opposite ports."""
    transmittance = 1.0 - reflectance
    return (reflectance ** 2 + transmittance ** 2 -
            2.0 * reflectance * transmittance * one_minus_eps ** 2 * nu_eff)


def coalescence_window(bench, lifetime=None):
    """Arrival-time window (ps) inside which photons form one cluster."""
    if bench.coalescence_window is not None:
        window = bench.coalescence_window
        if window >= bench.pair_delay_ps:
            raise exceptions.InvalidParameter(
                _('coalescence_window must be shorter than the pulse-pair '
                  'delay'))
        return window
    if lifetime is None:
        return bench.pair_delay_ps / 2.0
    return min(WINDOW_LIFETIMES * lifetime, bench.pair_delay_ps / 2.0)


def _hom_shard(photons, bench, rng_seed, shard, window):
    rng = sharding.shard_generator(rng_seed, sharding.STREAM_HOM, shard)
    n = len(photons)
    kept = rng.random(n) < bench.collection_efficiency
    long_arm = rng.random(n) < 0.5
    u_pair = rng.random(n)
    u_split = rng.random(n)
    u_route = rng.random(n)
    jitter = rng.normal(0.0, bench.jitter_sigma, n)

    photons = photons.take(kept)
    long_arm = long_arm[kept]
    u_pair, u_split, u_route, jitter = (
        u_pair[kept], u_split[kept], u_route[kept], jitter[kept])
    if not len(photons):
        return model.ClickStream()

    polarization = photons.polarization.copy()
    if bench.polarization_mode == model.ORTHOGONAL:
        polarization[long_arm] ^= 1
    arm_delay = np.where(long_arm, bench.pair_delay_ps + bench.arm_mismatch,
                         0.0)
    nominal = detection.pulse_times(photons, bench) + arm_delay

    order = np.argsort(nominal, kind='stable')
    nominal_s = nominal[order]
    period_s = photons.period_index[order]
    new_cluster = np.ones(len(order), dtype=bool)
    new_cluster[1:] = ((np.diff(nominal_s) > window) |
                       (np.diff(period_s) != 0))
    cluster_id = np.cumsum(new_cluster) - 1
    sizes = np.bincount(cluster_id)

    reflectance = bench.bs_reflectance
    transmittance = bench.bs_transmittance
    to_d1 = u_route < np.where(long_arm, reflectance, transmittance)

    firsts = np.flatnonzero(new_cluster)
    firsts = firsts[sizes[cluster_id[firsts]] == 2]
    i = order[firsts]
    j = order[firsts + 1]
    opposite = long_arm[i] != long_arm[j]
    i, j = i[opposite], j[opposite]
    short = np.where(long_arm[i], j, i)
    long_ = np.where(long_arm[i], i, j)

    distinguishable = (photons.is_extra[short] | photons.is_extra[long_] |
                       (polarization[short] != polarization[long_]))
    nu_eff = np.where(distinguishable, 0.0,
                      np.minimum(photons.pair_coherence[short],
                                 photons.pair_coherence[long_]))
    p_coinc = coincidence_probability(reflectance, bench.one_minus_eps,
                                      nu_eff)
    coincident = u_pair[short] < p_coinc
    overlap = reflectance ** 2 + transmittance ** 2
    split = u_split[short]
    short_d1 = np.where(coincident, split < transmittance ** 2 / overlap,
                        split < 0.5)
    to_d1[short] = short_d1
    to_d1[long_] = np.where(coincident, ~short_d1, short_d1)
    LOG.debug('HOM shard %d: %d pair cluster(s), %d coincident',
              shard, len(short), int(coincident.sum()))

    channel = np.where(to_d1, model.CHANNEL_D1, model.CHANNEL_D2)
    return model.ClickStream(
        channel, detection.timestamps(nominal + photons.emission_time,
                                      jitter))


def hom_bench(photons, bench, rng_seed, lifetime=None, n_periods=None,
              threads=1):
    """Send early/late photon pairs through the HOM interferometer.

    :param lifetime: emitter lifetime (ps) setting the default coalescence
        window when ``bench.coalescence_window`` is unset.
    """
    if bench.pulse_pair_delay <= 0:
        raise exceptions.InvalidParameter(
            _('HOM mode needs a non-zero pulse_pair_delay'))
    window = coalescence_window(bench, lifetime)
    n_periods = detection.total_periods(photons, n_periods)

    def _shard(shard, _start, sub):
        return _hom_shard(sub, bench, rng_seed, shard, window)

    clicks = detection.finish(
        sharding.run_sharded(_shard, detection.split_shards(photons,
                                                            n_periods),
                             threads),
        bench, n_periods, rng_seed)
    LOG.info('HOM bench (%s, window %.0f ps): %d photon(s) -> %d click(s)',
             bench.polarization_mode, window, len(photons), len(clicks))
    return clicks


class _HomBench(pluginbase.BenchBaseExtension):
    pair_mode = True
    polarization_mode = None

    def __init__(self, device, cavity, bench):
        super().__init__(device, cavity, dataclasses.replace(
            bench, polarization_mode=self.polarization_mode))

    def pulse_area(self, run):
        return run.hom_pulse_area

    def propagate(self, photons, rng_seed, n_periods, threads=1):
        lifetime, _slow = dynamics.emission_lifetimes(self.device,
                                                      self.cavity)
        return hom_bench(photons, self.bench, rng_seed, lifetime=lifetime,
                         n_periods=n_periods, threads=threads)


class HomParallelBench(_HomBench):
    """HOM interference with co-polarized arms (``mode = hom-parallel``)."""

    polarization_mode = model.PARALLEL


class HomOrthogonalBench(_HomBench):
    """HOM reference with a 90 degree rotated long arm."""

    polarization_mode = model.ORTHOGONAL
