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

"""Domain types shared by every qdbench module.

All types are immutable value objects.  Photon and click streams are kept
as numpy columns (:class:`PhotonStream`, :class:`ClickStream`); the
record types describe a single row of those columns.

Units: times in picoseconds unless a field name says otherwise,
energies in meV (detuning) or micro-eV (cavity linewidth), lengths in
micrometers.
"""

import dataclasses
import logging
import math
import typing

import numpy as np

from qdbench._i18n import _
from qdbench import exceptions

LOG = logging.getLogger(__name__)

# hc in eV * um
PLANCK_EV_UM = 1.23984198

CUBIC_WAVELENGTH = 'cubic_wavelength'
CUBIC_MICRON = 'cubic_micron'
MODE_VOLUME_UNITS = (CUBIC_WAVELENGTH, CUBIC_MICRON)

PARALLEL = 'parallel'
ORTHOGONAL = 'orthogonal'
POLARIZATION_MODES = (PARALLEL, ORTHOGONAL)

SLOT_ONLY = 0
SLOT_EARLY = 1
SLOT_LATE = 2
SLOT_NAMES = {SLOT_ONLY: 'only', SLOT_EARLY: 'early', SLOT_LATE: 'late'}

POL_H = 0
POL_V = 1
POL_NAMES = {POL_H: 'H', POL_V: 'V'}

CHANNEL_D1 = 1
CHANNEL_D2 = 2
CHANNELS = (CHANNEL_D1, CHANNEL_D2)

# Q consistency tolerance against E_photon / gamma_C.
Q_CONSISTENCY_TOLERANCE = 0.05

# Mode volume giving a theoretical Purcell maximum of 5.9 for Q=5930.
REFERENCE_MODE_VOLUME = 3.0 * 5930.0 / (4.0 * math.pi ** 2 * 5.9)

# Linear power dephasing through nu(pi/4)=0.88 and nu(pi)=0.73.
DEFAULT_DEPHASING = (0.88 - 0.73) / (math.pi ** 2 - math.pi ** 2 / 16.0)
DEFAULT_INDISTINGUISHABILITY = 0.88 + DEFAULT_DEPHASING * math.pi ** 2 / 16.0
# Surplus emission grows as P_exc(theta)**order; order 1 is linear.
DEFAULT_MULTI_PHOTON_ORDER = 2.0
# Pulse area of the headline two-photon interference run.
REFERENCE_HOM_PULSE_AREA = math.pi / 4.0


def _check_keys(cls, data):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise exceptions.InvalidParameter(
            _('Unknown field(s) %(unknown)s for %(type)s') %
            {'unknown': sorted(unknown), 'type': cls.__name__})


class ValueObject:
    """Mixin giving dict round-trip to flat dataclasses."""

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        _check_keys(cls, data)
        return cls(**data)


@dataclasses.dataclass(frozen=True)
class CavityParams(ValueObject):
    quality_factor: float = 5930.0
    mode_linewidth: float = 232.0
    wavelength: float = 0.9
    refractive_index: float = 3.6
    mode_volume: float = REFERENCE_MODE_VOLUME
    mode_volume_unit: str = CUBIC_WAVELENGTH

    @property
    def photon_energy(self):
        """Photon energy hc/lambda in eV."""
        return PLANCK_EV_UM / self.wavelength

    @property
    def linewidth_mev(self):
        return self.mode_linewidth * 1e-3

    @property
    def mode_volume_um3(self):
        if self.mode_volume_unit == CUBIC_WAVELENGTH:
            return self.mode_volume * (self.wavelength /
                                       self.refractive_index) ** 3
        return self.mode_volume


@dataclasses.dataclass(frozen=True)
class EmitterDevice(ValueObject):
    lifetime_on_resonance: float = 168.0
    lifetime_detuned: float = 1140.0
    detuning: float = 0.0
    slow_component_fraction: float = 0.0
    slow_lifetime: float = 1000.0
    multi_photon_prob: float = 0.0
    multi_photon_order: float = DEFAULT_MULTI_PHOTON_ORDER
    dephasing_coefficient: float = DEFAULT_DEPHASING
    base_indistinguishability: float = DEFAULT_INDISTINGUISHABILITY
    extraction_efficiency: float = 0.74


@dataclasses.dataclass(frozen=True)
class BenchConfig(ValueObject):
    rep_rate: float = 82.0
    pulse_length: float = 1.3
    pulse_pair_delay: float = 2.0
    bs_reflectance: float = 0.5
    one_minus_eps: float = 1.0
    detector_jitter: typing.Optional[float] = None
    pair_resolution: float = 520.0
    setup_efficiency: float = 0.021
    polarization_mode: str = PARALLEL
    correlation_efficiency: typing.Optional[float] = None
    coalescence_window: typing.Optional[float] = None
    arm_mismatch: float = 0.0
    dead_time: float = 0.0
    dark_count_rate: float = 0.0
    decay_irf_sigma: float = 50.0

    @property
    def rep_period(self):
        """Repetition period T_rep in ps."""
        return 1e6 / self.rep_rate

    @property
    def pair_delay_ps(self):
        return self.pulse_pair_delay * 1e3

    @property
    def bs_transmittance(self):
        return 1.0 - self.bs_reflectance

    @property
    def jitter_sigma(self):
        """Per-detector Gaussian jitter; t_Res is the pair-difference sigma."""
        if self.detector_jitter is not None:
            return self.detector_jitter
        return self.pair_resolution / math.sqrt(2.0)

    @property
    def collection_efficiency(self):
        if self.correlation_efficiency is not None:
            return self.correlation_efficiency
        return self.setup_efficiency

    def resolved(self):
        """Copy with every optional field materialized."""
        return dataclasses.replace(
            self, detector_jitter=self.jitter_sigma,
            correlation_efficiency=self.collection_efficiency)


def reflectance_from_ratio(ratio):
    """Convert an R/T ratio to the normalized reflectance R."""
    if ratio <= 0:
        raise exceptions.InvalidParameter(
            _('R/T ratio must be positive, got %s') % ratio)
    return ratio / (1.0 + ratio)


@dataclasses.dataclass(frozen=True)
class PhotonRecord(ValueObject):
    period_index: int
    slot: int
    emission_time: float
    polarization: int
    pair_coherence: float
    is_extra: bool


@dataclasses.dataclass(frozen=True)
class ClickRecord(ValueObject):
    channel: int
    absolute_time: int


class PhotonStream:
    """Column store of emitted photons, ordered by period then slot."""

    COLUMNS = (('period_index', np.int64),
               ('slot', np.int8),
               ('emission_time', np.float64),
               ('polarization', np.int8),
               ('pair_coherence', np.float64),
               ('is_extra', np.bool_))

    def __init__(self, period_index=(), slot=(), emission_time=(),
                 polarization=(), pair_coherence=(), is_extra=()):
        values = (period_index, slot, emission_time, polarization,
                  pair_coherence, is_extra)
        for (name, dtype), value in zip(self.COLUMNS, values):
            setattr(self, name, np.asarray(value, dtype=dtype))
        sizes = {len(getattr(self, name)) for name, _dtype in self.COLUMNS}
        if len(sizes) > 1:
            raise exceptions.InvalidParameter(
                _('Photon stream columns differ in length: %s') %
                sorted(sizes))

    def __len__(self):
        return len(self.period_index)

    @classmethod
    def concatenate(cls, streams):
        streams = list(streams)
        if not streams:
            return cls()
        return cls(*[np.concatenate([getattr(s, name) for s in streams])
                     for name, _dtype in cls.COLUMNS])

    def take(self, mask_or_index):
        return PhotonStream(*[getattr(self, name)[mask_or_index]
                              for name, _dtype in self.COLUMNS])

    def records(self):
        for row in zip(*[getattr(self, name).tolist()
                         for name, _dtype in self.COLUMNS]):
            yield PhotonRecord(*row)

    @classmethod
    def from_records(cls, records):
        records = list(records)
        return cls(*[[getattr(r, name) for r in records]
                     for name, _dtype in cls.COLUMNS])


class ClickStream:
    """Detected clicks sorted by absolute time (ties by channel)."""

    def __init__(self, channel=(), absolute_time=(), presorted=False):
        channel = np.asarray(channel, dtype=np.int8)
        absolute_time = np.asarray(absolute_time, dtype=np.int64)
        if len(channel) != len(absolute_time):
            raise exceptions.InvalidParameter(
                _('Click stream columns differ in length'))
        bad = ~np.isin(channel, CHANNELS)
        if bad.any():
            raise exceptions.InvalidParameter(
                _('Click channel must be 1 or 2, got %s') %
                channel[bad][0])
        if not presorted:
            order = np.lexsort((channel, absolute_time))
            channel = channel[order]
            absolute_time = absolute_time[order]
        self.channel = channel
        self.absolute_time = absolute_time

    def __len__(self):
        return len(self.channel)

    def __eq__(self, other):
        if not isinstance(other, ClickStream):
            return NotImplemented
        return (np.array_equal(self.channel, other.channel) and
                np.array_equal(self.absolute_time, other.absolute_time))

    def times(self, channel):
        return self.absolute_time[self.channel == channel]

    def records(self):
        for ch, t in zip(self.channel.tolist(), self.absolute_time.tolist()):
            yield ClickRecord(ch, t)

    @classmethod
    def from_records(cls, records):
        records = list(records)
        return cls([r.channel for r in records],
                   [r.absolute_time for r in records])

    @classmethod
    def concatenate(cls, streams):
        streams = list(streams)
        if not streams:
            return cls()
        return cls(np.concatenate([s.channel for s in streams]),
                   np.concatenate([s.absolute_time for s in streams]))


class Histogram:
    """Binned coincidence counts.

    Bin ``i`` covers ``[origin + i*bin_width, origin + (i+1)*bin_width)``.
    """

    def __init__(self, bin_width, origin, counts):
        if bin_width <= 0:
            raise exceptions.InvalidParameter(
                _('bin_width must be positive, got %s') % bin_width)
        counts = np.asarray(counts, dtype=np.int64)
        if (counts < 0).any():
            raise exceptions.InvalidParameter(
                _('Histogram counts must be non-negative'))
        self.bin_width = bin_width
        self.origin = origin
        self.counts = counts

    @property
    def total_coincidences(self):
        return int(self.counts.sum())

    @property
    def bin_centers(self):
        return (self.origin + self.bin_width * 0.5 +
                self.bin_width * np.arange(len(self.counts)))

    def __len__(self):
        return len(self.counts)

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return (self.bin_width == other.bin_width and
                self.origin == other.origin and
                np.array_equal(self.counts, other.counts))

    def __add__(self, other):
        if (self.bin_width, self.origin, len(self)) != (
                other.bin_width, other.origin, len(other)):
            raise exceptions.InvalidParameter(
                _('Cannot add histograms with different bin geometry'))
        return Histogram(self.bin_width, self.origin,
                         self.counts + other.counts)

    def scaled(self, factor):
        return Histogram(self.bin_width, self.origin,
                         np.rint(self.counts * factor).astype(np.int64))

    def to_dict(self):
        return {'bin_width': self.bin_width, 'origin': self.origin,
                'counts': self.counts.tolist(),
                'total_coincidences': self.total_coincidences}

    @classmethod
    def from_dict(cls, data):
        hist = cls(data['bin_width'], data['origin'], data['counts'])
        total = data.get('total_coincidences')
        if total is not None and total != hist.total_coincidences:
            raise exceptions.InvalidParameter(
                _('total_coincidences %(total)s does not match the sum of '
                  'counts %(sum)s') %
                {'total': total, 'sum': hist.total_coincidences})
        return hist


class Measurement(typing.NamedTuple):
    value: float
    error: float


@dataclasses.dataclass(frozen=True)
class PeakParams(ValueObject):
    center: float
    area: float
    decay_time: float
    sigma: float
    center_err: float = 0.0
    area_err: float = 0.0
    decay_time_err: float = 0.0
    sigma_err: float = 0.0


@dataclasses.dataclass(frozen=True)
class FitReport:
    peaks: tuple
    chi_square: float
    dof: int
    iteration_count: int
    converged: bool
    area_covariance: tuple = ()
    g2_zero: typing.Optional[float] = None
    g2_zero_err: typing.Optional[float] = None
    nu_raw: typing.Optional[float] = None
    nu_raw_err: typing.Optional[float] = None
    nu_corr: typing.Optional[float] = None
    nu_corr_err: typing.Optional[float] = None
    f_purcell: typing.Optional[float] = None
    f_purcell_err: typing.Optional[float] = None
    eta_device: typing.Optional[float] = None
    eta_device_err: typing.Optional[float] = None
    assumptions: tuple = ()

    @property
    def areas(self):
        return np.array([p.area for p in self.peaks])

    @property
    def centers(self):
        return np.array([p.center for p in self.peaks])

    def covariance(self):
        if self.area_covariance:
            return np.array(self.area_covariance, dtype=float)
        return np.diag([p.area_err ** 2 for p in self.peaks])

    def peak_nearest(self, center):
        """Index of the peak whose center is closest to ``center``."""
        return int(np.argmin(np.abs(self.centers - center)))

    def with_derived(self, **values):
        return dataclasses.replace(self, **values)

    def with_assumptions(self, *notes):
        merged = list(self.assumptions)
        merged.extend(n for n in notes if n not in merged)
        return dataclasses.replace(self, assumptions=tuple(merged))

    def to_dict(self):
        data = dataclasses.asdict(self)
        data['peaks'] = [p.to_dict() for p in self.peaks]
        data['area_covariance'] = [list(row) for row in self.area_covariance]
        data['assumptions'] = list(self.assumptions)
        return data

    @classmethod
    def from_dict(cls, data):
        _check_keys(cls, data)
        data = dict(data)
        data['peaks'] = tuple(PeakParams.from_dict(p) for p in data['peaks'])
        data['area_covariance'] = tuple(
            tuple(row) for row in data.get('area_covariance', ()))
        data['assumptions'] = tuple(data.get('assumptions', ()))
        return cls(**data)


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    errors: tuple = ()
    warnings: tuple = ()

    @property
    def valid(self):
        return not self.errors

    def __bool__(self):
        return self.valid


def _validate_cavity(cavity, errors, warnings):
    if cavity.quality_factor <= 0:
        errors.append(_('Q must be positive'))
    if cavity.mode_linewidth <= 0:
        errors.append(_('gamma_C must be positive'))
    if cavity.wavelength <= 0:
        errors.append(_('wavelength must be positive'))
    if cavity.refractive_index < 1:
        errors.append(_('refractive index must be at least 1'))
    if cavity.mode_volume <= 0:
        errors.append(_('mode volume must be positive'))
    if cavity.mode_volume_unit not in MODE_VOLUME_UNITS:
        errors.append(_('mode volume unit must be one of %s') %
                      ', '.join(MODE_VOLUME_UNITS))
    if (cavity.quality_factor > 0 and cavity.mode_linewidth > 0 and
            cavity.wavelength > 0):
        q_from_linewidth = cavity.photon_energy / (
            cavity.mode_linewidth * 1e-6)
        mismatch = abs(cavity.quality_factor - q_from_linewidth)
        if mismatch / cavity.quality_factor > Q_CONSISTENCY_TOLERANCE:
            warnings.append(
                _('Q=%(q).6g is inconsistent with E/gamma_C=%(e).6g') %
                {'q': cavity.quality_factor, 'e': q_from_linewidth})


def _validate_device(device, errors):
    t_on = device.lifetime_on_resonance
    t_off = device.lifetime_detuned
    if t_on <= 0:
        errors.append(_('T_on must be positive'))
    if t_off <= 0:
        errors.append(_('T_off must be positive'))
    if 0 < t_off <= t_on:
        errors.append(_('T_on must be shorter than T_off'))
    if not 0 <= device.slow_component_fraction < 1:
        errors.append(_('f_slow must lie in [0, 1)'))
    if device.slow_component_fraction > 0 and device.slow_lifetime <= 0:
        errors.append(_('T_slow must be positive'))
    for name, label in (('multi_photon_prob', 'p_mp'),
                        ('base_indistinguishability', 'nu_0'),
                        ('extraction_efficiency', 'eta')):
        if not 0 <= getattr(device, name) <= 1:
            errors.append(_('%s must lie in [0, 1]') % label)
    if device.dephasing_coefficient < 0:
        errors.append(_('beta must be non-negative'))
    if device.multi_photon_order < 1:
        errors.append(_('multi_photon_order must be at least 1'))


def _validate_bench(bench, errors):
    if bench.rep_rate <= 0:
        errors.append(_('rep_rate must be positive'))
    if not 0 < bench.bs_reflectance < 1:
        errors.append(_('R and T must both lie strictly between 0 and 1'))
    if not 0 < bench.one_minus_eps <= 1:
        errors.append(_('one_minus_eps must lie in (0, 1]'))
    if bench.pulse_pair_delay < 0:
        errors.append(_('pulse_pair_delay must be non-negative'))
    elif (bench.rep_rate > 0 and bench.pulse_pair_delay > 0 and
          bench.pair_delay_ps >= bench.rep_period / 2.0):
        errors.append(_('pulse_pair_delay must be less than half the '
                        'repetition period'))
    if bench.pulse_length < 0:
        errors.append(_('pulse_length must be non-negative'))
    if bench.pair_resolution <= 0:
        errors.append(_('pair_resolution must be positive'))
    if bench.detector_jitter is not None and bench.detector_jitter < 0:
        errors.append(_('detector_jitter must be non-negative'))
    if not 0 < bench.setup_efficiency <= 1:
        errors.append(_('setup_efficiency must lie in (0, 1]'))
    if (bench.correlation_efficiency is not None and
            not 0 < bench.correlation_efficiency <= 1):
        errors.append(_('correlation_efficiency must lie in (0, 1]'))
    if bench.polarization_mode not in POLARIZATION_MODES:
        errors.append(_('polarization_mode must be parallel or orthogonal'))
    if (bench.coalescence_window is not None and
            bench.coalescence_window <= 0):
        errors.append(_('coalescence_window must be positive'))
    for name in ('dead_time', 'dark_count_rate', 'decay_irf_sigma'):
        if getattr(bench, name) < 0:
            errors.append(_('%s must be non-negative') % name)


def validate(device=None, cavity=None, bench=None):
    """Check every invariant of the given value objects.

    Never raises and never mutates its inputs; ``None`` skips a part.

    :returns: a :class:`ValidationReport`
    """
    errors = []
    warnings = []
    if device is not None:
        _validate_device(device, errors)
    if cavity is not None:
        _validate_cavity(cavity, errors, warnings)
    if bench is not None:
        _validate_bench(bench, errors)
    return ValidationReport(tuple(errors), tuple(warnings))


def ensure_valid(device=None, cavity=None, bench=None):
    """Raise :class:`InvalidParameter` when :func:`validate` reports errors."""
    report = validate(device, cavity, bench)
    for warning in report.warnings:
        LOG.warning(warning)
    if not report.valid:
        raise exceptions.InvalidParameter('; '.join(report.errors))
    return report
