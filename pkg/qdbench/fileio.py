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

"""Readers and writers of the run artifacts.

``clicks.csv``
    header ``channel,time_ps`` then one integer row per click, time-sorted.
``histogram.csv``
    ``# bin_width_ps=<w> origin_ps=<o>`` then ``bin_center_ps,counts``.
``peaks.csv``
    ``bin_center_ps,counts,fit`` with the fitted curve sampled per bin.
``*.json``
    sorted keys, two-space indent.
"""

import io
import logging
import os
import re
import warnings

import numpy as np
from oslo_serialization import jsonutils
from oslo_utils import fileutils

from qdbench._i18n import _
from qdbench import exceptions
from qdbench import model

LOG = logging.getLogger(__name__)

CLICKS_HEADER = 'channel,time_ps'
HISTOGRAM_HEADER = 'bin_center_ps,counts'
PEAKS_HEADER = 'bin_center_ps,counts,fit'

_GEOMETRY_RE = re.compile(
    r'^#\s*bin_width_ps=(?P<width>\S+)\s+origin_ps=(?P<origin>\S+)\s*$')


def _number(value):
    """Shortest text that reads back to the same value."""
    value = float(value)
    if value.is_integer():
        return '%d' % value
    return repr(value)


def _write_text(path, text):
    fileutils.ensure_tree(os.path.dirname(os.path.abspath(path)))
    with fileutils.remove_path_on_error(path):
        with open(path, 'w', newline='\n') as fp:
            fp.write(text)
    LOG.debug('Wrote %s', path)
    return path


def _read_lines(path):
    try:
        with open(path) as fp:
            return fp.read().splitlines()
    except FileNotFoundError:
        raise exceptions.DataFileError(path, _('file not found'))


def write_clicks(path, clicks):
    buf = io.StringIO()
    buf.write(CLICKS_HEADER + '\n')
    if len(clicks):
        np.savetxt(buf, np.column_stack([clicks.channel.astype(np.int64),
                                         clicks.absolute_time]),
                   fmt='%d', delimiter=',')
    return _write_text(path, buf.getvalue())


def _table(path, lines, header, n_columns):
    if not lines or lines[0].strip() != header:
        raise exceptions.DataFileError(
            path, _("expected header '%s'") % header)
    rows = [line for line in lines[1:] if line.strip()]
    if not rows:
        return np.zeros((0, n_columns), dtype=np.int64)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            table = np.loadtxt(rows, delimiter=',', dtype=np.float64,
                               ndmin=2)
    except ValueError as exc:
        raise exceptions.DataFileError(path, str(exc))
    if table.shape[1] != n_columns:
        raise exceptions.DataFileError(
            path, _('expected %d columns') % n_columns)
    return table


def read_clicks(path):
    table = _table(path, _read_lines(path), CLICKS_HEADER, 2)
    if len(table) and not np.array_equal(table, np.rint(table)):
        raise exceptions.DataFileError(path, _('values must be integers'))
    table = table.astype(np.int64)
    try:
        return model.ClickStream(table[:, 0], table[:, 1])
    except exceptions.InvalidParameter as exc:
        raise exceptions.DataFileError(path, str(exc))


def write_histogram(path, hist):
    lines = ['# bin_width_ps=%s origin_ps=%s' % (_number(hist.bin_width),
                                                 _number(hist.origin)),
             HISTOGRAM_HEADER]
    lines.extend('%s,%d' % (_number(center), count)
                 for center, count in zip(hist.bin_centers, hist.counts))
    return _write_text(path, '\n'.join(lines) + '\n')


def read_histogram(path):
    lines = _read_lines(path)
    match = _GEOMETRY_RE.match(lines[0]) if lines else None
    if not match:
        raise exceptions.DataFileError(
            path, _('missing "# bin_width_ps=... origin_ps=..." line'))
    try:
        width = float(match.group('width'))
        origin = float(match.group('origin'))
    except ValueError as exc:
        raise exceptions.DataFileError(path, str(exc))
    table = _table(path, lines[1:], HISTOGRAM_HEADER, 2)
    try:
        hist = model.Histogram(width, origin, table[:, 1].astype(np.int64))
    except exceptions.InvalidParameter as exc:
        raise exceptions.DataFileError(path, str(exc))
    if not np.allclose(hist.bin_centers, table[:, 0], rtol=0, atol=1e-6):
        raise exceptions.DataFileError(
            path, _('bin centers do not match the bin geometry'))
    return hist


def write_peaks(path, hist, curve):
    lines = [PEAKS_HEADER]
    lines.extend('%s,%d,%.6f' % (_number(center), count, fit)
                 for center, count, fit in zip(hist.bin_centers, hist.counts,
                                               curve))
    return _write_text(path, '\n'.join(lines) + '\n')


def dumps(data):
    return jsonutils.dumps(data, sort_keys=True, indent=2) + '\n'


def write_json(path, data):
    return _write_text(path, dumps(data))


def read_json(path):
    text = '\n'.join(_read_lines(path))
    try:
        return jsonutils.loads(text)
    except ValueError as exc:
        raise exceptions.DataFileError(path, str(exc))
