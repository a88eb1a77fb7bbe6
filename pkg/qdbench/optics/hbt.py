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

import numpy as np

from qdbench import model
from qdbench.optics import detection
from qdbench.optics import pluginbase
from qdbench import sharding

LOG = logging.getLogger(__name__)


def _hbt_shard(photons, bench, rng_seed, shard):
    rng = sharding.shard_generator(rng_seed, sharding.STREAM_HBT, shard)
    n = len(photons)
    kept = rng.random(n) < bench.collection_efficiency
    to_d1 = rng.random(n) < 0.5
    jitter = rng.normal(0.0, bench.jitter_sigma, n)

    nominal = detection.pulse_times(photons, bench) + photons.emission_time
    channel = np.where(to_d1, model.CHANNEL_D1, model.CHANNEL_D2)
    return model.ClickStream(channel[kept],
                             detection.timestamps(nominal, jitter)[kept])


def hbt_bench(photons, bench, rng_seed, n_periods=None, threads=1):
    """Send a photon stream through a 50/50 splitter onto D1 and D2.

    Every photon survives collection with the correlation efficiency of
    ``bench`` and then clicks exactly once, on either detector with equal
    probability.  The pulse-pair delay only shifts late-slot photons.
    """
    n_periods = detection.total_periods(photons, n_periods)

    def _shard(shard, _start, sub):
        return _hbt_shard(sub, bench, rng_seed, shard)

    clicks = detection.finish(
        sharding.run_sharded(_shard, detection.split_shards(photons,
                                                            n_periods),
                             threads),
        bench, n_periods, rng_seed)
    LOG.info('HBT bench: %d photon(s) -> %d click(s)',
             len(photons), len(clicks))
    return clicks


class HbtBench(pluginbase.BenchBaseExtension):
    """Autocorrelation of single pulses (``mode = hbt``)."""

    def propagate(self, photons, rng_seed, n_periods, threads=1):
        return hbt_bench(photons, self.bench, rng_seed,
                         n_periods=n_periods, threads=threads)
