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

"""Detector side of the benches: timing, dead time and dark counts."""

import logging

import numpy as np

from qdbench import model
from qdbench import sharding

LOG = logging.getLogger(__name__)


def total_periods(photons, n_periods=None):
    if n_periods is not None:
        return n_periods
    if not len(photons):
        return 0
    return int(photons.period_index[-1]) + 1


def split_shards(photons, n_periods):
    """Yield ``(shard_index, first_period, sub_stream)`` per period shard."""
    for index, start, stop in sharding.shard_ranges(n_periods):
        lo, hi = np.searchsorted(photons.period_index, [start, stop])
        yield index, start, photons.take(slice(lo, hi))


def pulse_times(photons, bench):
    """Pulse clock of each photon: period start plus the late-slot offset."""
    late = photons.slot == model.SLOT_LATE
    return (photons.period_index * bench.rep_period +
            np.where(late, bench.pair_delay_ps, 0.0))


def timestamps(nominal, jitter):
    """Round jittered arrival times to integer picoseconds."""
    return np.rint(nominal + jitter).astype(np.int64)


def dark_clicks(bench, n_periods, rng_seed, channels=model.CHANNELS):
    """Uniform dark counts of every channel over the run duration."""
    if bench.dark_count_rate <= 0 or n_periods <= 0:
        return model.ClickStream()
    chans = []
    times = []
    for index, start, stop in sharding.shard_ranges(n_periods):
        rng = sharding.shard_generator(rng_seed, sharding.STREAM_DARK, index)
        t_start = start * bench.rep_period
        t_stop = stop * bench.rep_period
        mean = bench.dark_count_rate * (t_stop - t_start) * 1e-12
        for channel in channels:
            count = rng.poisson(mean)
            chans.append(np.full(count, channel, dtype=np.int8))
            times.append(np.rint(rng.uniform(t_start, t_stop, count)))
    clicks = model.ClickStream(np.concatenate(chans), np.concatenate(times))
    LOG.debug('Added %d dark count(s)', len(clicks))
    return clicks


def apply_dead_time(clicks, dead_time):
    """Drop clicks closer than ``dead_time`` to the last accepted click."""
    if dead_time <= 0 or not len(clicks):
        return clicks
    keep = np.ones(len(clicks), dtype=bool)
    for channel in model.CHANNELS:
        index = np.flatnonzero(clicks.channel == channel)
        last = None
        for i, t in zip(index, clicks.absolute_time[index]):
            if last is not None and t - last < dead_time:
                keep[i] = False
            else:
                last = t
    LOG.debug('Dead time removed %d click(s)', int((~keep).sum()))
    return model.ClickStream(clicks.channel[keep], clicks.absolute_time[keep],
                             presorted=True)


def finish(shard_clicks, bench, n_periods, rng_seed, channels=model.CHANNELS):
    """Merge shard outputs, add dark counts and apply detector dead time."""
    clicks = model.ClickStream.concatenate(
        list(shard_clicks) + [dark_clicks(bench, n_periods, rng_seed,
                                          channels)])
    return apply_dead_time(clicks, bench.dead_time)
