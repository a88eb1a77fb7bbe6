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

"""Coincidence and decay histograms built from click streams.

Coincidence delays are ``tau = t2 - t1`` for a D1 click at ``t1`` and a D2
click at ``t2``.  Bins are centered on integer multiples of the bin width.
"""

import logging

import numpy as np

from qdbench._i18n import _
from qdbench import exceptions
from qdbench import model
from qdbench import sharding

LOG = logging.getLogger(__name__)

FULL = 'full'
START_STOP = 'start_stop'
METHODS = (FULL, START_STOP)

DEFAULT_BIN_WIDTH = 64
DEFAULT_MAX_PERIODS = 6

CHUNK_CLICKS = 1 << 16


def _geometry(bin_width, max_delay):
    if bin_width <= 0:
        raise exceptions.InvalidParameter(
            _('bin_width must be positive, got %s') % bin_width)
    if max_delay < 0:
        raise exceptions.InvalidParameter(
            _('max_delay must be non-negative, got %s') % max_delay)
    half_bins = max_delay / bin_width
    if abs(half_bins - round(half_bins)) > 1e-9:
        raise exceptions.InvalidParameter(
            _('max_delay %(max)s is not a multiple of bin_width %(bw)s') %
            {'max': max_delay, 'bw': bin_width})
    half_bins = int(round(half_bins))
    return -max_delay - bin_width / 2.0, 2 * half_bins + 1


def default_max_delay(rep_period, bin_width=DEFAULT_BIN_WIDTH):
    """Smallest multiple of ``bin_width`` covering six repetition periods."""
    return bin_width * int(np.ceil(DEFAULT_MAX_PERIODS * rep_period /
                                   bin_width))


def _full_chunk(t1, t2, max_delay, origin, bin_width, n_bins):
    lo = np.searchsorted(t2, t1 - max_delay, side='left')
    hi = np.searchsorted(t2, t1 + max_delay, side='right')
    counts = hi - lo
    total = int(counts.sum())
    if not total:
        return np.zeros(n_bins, dtype=np.int64)
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(counts)[:-1])),
                       counts)
    partner = np.arange(total) + starts
    tau = t2[partner] - np.repeat(t1, counts)
    index = np.floor((tau - origin) / bin_width).astype(np.int64)
    return np.bincount(index, minlength=n_bins)


def _start_stop(t1, t2, max_delay, origin, bin_width, n_bins):
    stop = np.searchsorted(t2, t1, side='left')
    valid = stop < len(t2)
    tau = t2[stop[valid]] - t1[valid]
    tau = tau[tau <= max_delay]
    index = np.floor((tau - origin) / bin_width).astype(np.int64)
    return np.bincount(index, minlength=n_bins)


def correlate(clicks, bin_width, max_delay, method=FULL, threads=1):
    """Histogram the signed delays between D1 and D2 clicks.

    With ``method='full'`` every (D1, D2) pair with ``|tau| <= max_delay``
    is counted.  With ``method='start_stop'`` each D1 click only pairs with
    the next D2 click, so only ``tau >= 0`` is populated.

    :returns: a :class:`qdbench.model.Histogram` with ``2*M+1`` bins where
        ``M = max_delay / bin_width``
    """
    if method not in METHODS:
        raise exceptions.InvalidParameter(
            _('Unknown correlation method %s') % method)
    origin, n_bins = _geometry(bin_width, max_delay)
    t1 = np.sort(clicks.times(model.CHANNEL_D1))
    t2 = np.sort(clicks.times(model.CHANNEL_D2))
    if not len(t1) or not len(t2):
        return model.Histogram(bin_width, origin,
                               np.zeros(n_bins, dtype=np.int64))

    if method == START_STOP:
        counts = _start_stop(t1, t2, max_delay, origin, bin_width, n_bins)
    else:
        def _chunk(first):
            return _full_chunk(t1[first:first + CHUNK_CLICKS], t2,
                               max_delay, origin, bin_width, n_bins)

        partial = sharding.run_sharded(
            _chunk, [(first,) for first in range(0, len(t1),
                                                 CHUNK_CLICKS)],
            threads)
        counts = np.sum(partial, axis=0)
    hist = model.Histogram(bin_width, origin, counts)
    LOG.info('Correlated %d/%d click(s) into %d coincidence(s)',
             len(t1), len(t2), hist.total_coincidences)
    return hist


def peak_areas(hist, centers, half_window):
    """Sum the counts of every bin centered within ``center +- half_window``.

    :returns: list of ``(center, area)`` with integer areas
    """
    if half_window <= 0:
        raise exceptions.InvalidParameter(
            _('half_window must be positive, got %s') % half_window)
    bin_centers = hist.bin_centers
    claimed = np.zeros(len(hist), dtype=bool)
    result = []
    ordered = sorted(centers)
    for left, right in zip(ordered, ordered[1:]):
        if right - left < 2 * half_window:
            raise exceptions.InvalidParameter(
                _('Integration windows around %(a)s and %(b)s overlap') %
                {'a': left, 'b': right})
    for center in centers:
        mask = np.abs(bin_centers - center) <= half_window
        if (mask & claimed).any():
            raise exceptions.InvalidParameter(
                _('Integration window around %s shares a bin with another '
                  'window') % center)
        claimed |= mask
        result.append((center, int(hist.counts[mask].sum())))
    return result


def decay_histogram(clicks, rep_period, bin_width, lead=1000.0,
                    max_time=None, channel=model.CHANNEL_D1):
    """Fold click times modulo the repetition period.

    Bin 0 starts ``lead`` ps before the pulse so the rising edge of the
    instrument response stays inside the histogram.
    """
    if bin_width <= 0:
        raise exceptions.InvalidParameter(
            _('bin_width must be positive, got %s') % bin_width)
    if max_time is None:
        max_time = rep_period - lead
    n_bins = int((max_time + lead) // bin_width)
    if n_bins < 1:
        raise exceptions.InvalidParameter(
            _('Decay histogram window is empty'))
    times = clicks.times(channel).astype(np.float64)
    phase = np.mod(times + lead, rep_period)
    index = np.floor(phase / bin_width).astype(np.int64)
    index = index[index < n_bins]
    counts = np.bincount(index, minlength=n_bins)[:n_bins]
    LOG.info('Folded %d click(s) into a %d-bin decay histogram',
             len(times), n_bins)
    return model.Histogram(bin_width, -lead, counts)
