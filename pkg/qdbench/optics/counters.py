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

"""Single-detector benches: lifetime (TCSPC) and count-rate (CCD)."""

import logging
import math

import numpy as np

from qdbench import model
from qdbench.optics import detection
from qdbench.optics import pluginbase
from qdbench import sharding

LOG = logging.getLogger(__name__)


def _counter_shard(photons, bench, rng_seed, shard, efficiency, sigma):
    rng = sharding.shard_generator(rng_seed, sharding.STREAM_COUNTER, shard)
    n = len(photons)
    kept = rng.random(n) < efficiency
    jitter = rng.normal(0.0, sigma, n) if sigma > 0 else np.zeros(n)
    nominal = detection.pulse_times(photons, bench) + photons.emission_time
    times = detection.timestamps(nominal, jitter)[kept]
    return model.ClickStream(np.full(len(times), model.CHANNEL_D1), times)


def _count(photons, bench, rng_seed, n_periods, threads, efficiency, sigma):
    n_periods = detection.total_periods(photons, n_periods)

    def _shard(shard, _start, sub):
        return _counter_shard(sub, bench, rng_seed, shard, efficiency, sigma)

    return detection.finish(
        sharding.run_sharded(_shard, detection.split_shards(photons,
                                                            n_periods),
                             threads),
        bench, n_periods, rng_seed, channels=(model.CHANNEL_D1,))


def decay_bench(photons, bench, rng_seed, n_periods=None, threads=1):
    """Time-tag every collected photon on D1 with a Gaussian IRF.

    Photons are thinned by the correlation efficiency; the IRF width is
    ``bench.decay_irf_sigma``.
    """
    clicks = _count(photons, bench, rng_seed, n_periods, threads,
                    bench.collection_efficiency, bench.decay_irf_sigma)
    LOG.info('Decay bench: %d photon(s) -> %d click(s)',
             len(photons), len(clicks))
    return clicks


def brightness_bench(photons, bench, rng_seed, n_periods=None, threads=1):
    """Count photons reaching the spectrometer camera.

    Photons are thinned by the setup efficiency; click times carry no
    jitter since only their number is used.
    """
    clicks = _count(photons, bench, rng_seed, n_periods, threads,
                    bench.setup_efficiency, 0.0)
    LOG.info('Brightness bench: %d photon(s) -> %d count(s)',
             len(photons), len(clicks))
    return clicks


def count_rate(clicks, bench, n_periods):
    """Mean count rate (cps) with its Poisson standard error."""
    duration = n_periods * bench.rep_period * 1e-12
    rate = len(clicks) / duration
    return model.Measurement(rate, math.sqrt(len(clicks)) / duration)


class DecayBench(pluginbase.BenchBaseExtension):
    """Time-resolved decay under single pulses (``mode = decay``)."""

    def propagate(self, photons, rng_seed, n_periods, threads=1):
        return decay_bench(photons, self.bench, rng_seed,
                           n_periods=n_periods, threads=threads)


class BrightnessBench(pluginbase.BenchBaseExtension):
    """Detected count rate on the camera (``mode = brightness``)."""

    def propagate(self, photons, rng_seed, n_periods, threads=1):
        return brightness_bench(photons, self.bench, rng_seed,
                                n_periods=n_periods, threads=threads)
