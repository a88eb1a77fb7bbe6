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

"""Period-range shards with counter-based random streams.

A run of ``n_periods`` is cut into fixed shards of :data:`SHARD_PERIODS`
periods.  Shard ``k`` of a consumer draws from a Philox generator keyed by
``(rng_seed, stream_tag, k)``, so results never depend on how many shards
run concurrently.
"""

import logging

import joblib
import numpy as np

LOG = logging.getLogger(__name__)

SHARD_PERIODS = 1 << 17

STREAM_EMIT = 1
STREAM_HBT = 2
STREAM_HOM = 3
STREAM_COUNTER = 4
STREAM_DARK = 5


def shard_generator(rng_seed, stream_tag, shard_index):
    seq = np.random.SeedSequence(int(rng_seed) & 0xFFFFFFFFFFFFFFFF,
                                 spawn_key=(stream_tag, shard_index))
    return np.random.Generator(np.random.Philox(seq))


def shard_ranges(n_periods, shard_periods=SHARD_PERIODS):
    """Yield ``(shard_index, first_period, stop_period)`` tuples."""
    for index, start in enumerate(range(0, n_periods, shard_periods)):
        yield index, start, min(start + shard_periods, n_periods)


def run_sharded(func, tasks, threads=1):
    """Run ``func(*task)`` for every task, results in task order."""
    tasks = list(tasks)
    LOG.debug('Running %d shard(s) of %s on %d thread(s)',
              len(tasks), getattr(func, '__name__', func), threads)
    if threads <= 1 or len(tasks) <= 1:
        return [func(*task) for task in tasks]
    return joblib.Parallel(n_jobs=threads, prefer='threads')(
        joblib.delayed(func)(*task) for task in tasks)


def derive_seed(rng_seed, stage):
    """64-bit seed of an independent pipeline stage."""
    state = np.random.SeedSequence(int(rng_seed) & 0xFFFFFFFFFFFFFFFF,
                                   spawn_key=(0, stage)).generate_state(
                                       2, np.uint32)
    return (int(state[0]) << 32) | int(state[1])
