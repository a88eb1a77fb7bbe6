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

"""Run configuration files.

A run is described by an INI file with the sections ``[device]``,
``[cavity]``, ``[bench]`` and ``[run]``.  Every key mirrors a field of the
corresponding model type; unknown sections and keys are errors.
"""

import dataclasses
import logging
import math
import os
import typing

from oslo_config import cfg
from oslo_config import types

from qdbench._i18n import _
from qdbench import correlate
from qdbench import dynamics
from qdbench import exceptions
from qdbench.fitkit import decay
from qdbench import model

LOG = logging.getLogger(__name__)

DEVICE_GROUP = 'device'
CAVITY_GROUP = 'cavity'
BENCH_GROUP = 'bench'
RUN_GROUP = 'run'

BENCH_MODES = ('hbt', 'hom-parallel', 'hom-orthogonal', 'decay',
               'brightness')

MAX_SEED = (1 << 64) - 1

DEVICE_OPTS = [
    cfg.FloatOpt('lifetime_on_resonance',
                 default=168.0,
                 help='Radiative lifetime T_on on cavity resonance, in ps.'),
    cfg.FloatOpt('lifetime_detuned',
                 default=1140.0,
                 help='Radiative lifetime T_off far from the cavity mode, '
                      'in ps.'),
    cfg.FloatOpt('detuning',
                 default=0.0,
                 help='Exciton-cavity detuning E_X - E_C, in meV.'),
    cfg.FloatOpt('slow_component_fraction',
                 default=0.0, min=0.0, max=1.0,
                 help='Fraction of emission following the slow decay '
                      'component on resonance.'),
    cfg.FloatOpt('slow_lifetime',
                 default=1000.0,
                 help='Lifetime of the slow decay component, in ps.'),
    cfg.FloatOpt('multi_photon_prob',
                 default=0.0, min=0.0, max=1.0,
                 help='Probability of a surplus photon per pi-pulse. '
                      'Overridden by [run] target_g2 when that is set.'),
    cfg.FloatOpt('multi_photon_order',
                 default=model.DEFAULT_MULTI_PHOTON_ORDER, min=1.0,
                 help='Power of the excitation probability the surplus '
                      'emission follows, p_mp * P_exc(theta)**order. '
                      '1 makes it linear in P_exc.'),
    cfg.FloatOpt('dephasing_coefficient',
                 default=model.DEFAULT_DEPHASING, min=0.0,
                 help='Visibility loss per squared pulse area, in rad^-2.'),
    cfg.FloatOpt('base_indistinguishability',
                 default=model.DEFAULT_INDISTINGUISHABILITY,
                 min=0.0, max=1.0,
                 help='Indistinguishability extrapolated to zero pulse '
                      'area.'),
    cfg.FloatOpt('extraction_efficiency',
                 default=0.74, min=0.0, max=1.0,
                 help='Probability that an excitation yields a photon in '
                      'the first lens.'),
]

CAVITY_OPTS = [
    cfg.FloatOpt('quality_factor',
                 default=5930.0,
                 help='Quality factor Q of the cavity mode.'),
    cfg.FloatOpt('mode_linewidth',
                 default=232.0,
                 help='Cavity mode linewidth gamma_C, in micro-eV.'),
    cfg.FloatOpt('wavelength',
                 default=0.9,
                 help='Emission wavelength, in micrometers.'),
    cfg.FloatOpt('refractive_index',
                 default=3.6,
                 help='Refractive index of the cavity material.'),
    cfg.FloatOpt('mode_volume',
                 default=model.REFERENCE_MODE_VOLUME,
                 help='Effective mode volume, in units of mode_volume_unit.'),
    cfg.StrOpt('mode_volume_unit',
               default=model.CUBIC_WAVELENGTH,
               choices=model.MODE_VOLUME_UNITS,
               help='Unit of mode_volume: (lambda/n)^3 or cubic microns.'),
]

BENCH_OPTS = [
    cfg.FloatOpt('rep_rate',
                 default=82.0,
                 help='Laser repetition rate, in MHz.'),
    cfg.FloatOpt('pulse_length',
                 default=1.3,
                 help='Laser pulse length, in ps.'),
    cfg.FloatOpt('pulse_pair_delay',
                 default=2.0,
                 help='Delay between the two pulses of a pair and the arm '
                      'difference of the interferometer, in ns.'),
    cfg.FloatOpt('bs_reflectance',
                 help='Reflectance R of the second interferometer '
                      'splitter; T = 1 - R. Defaults to 0.5.'),
    cfg.FloatOpt('bs_ratio',
                 help='R/T ratio of the second interferometer splitter, '
                      'an alternative to bs_reflectance.'),
    cfg.FloatOpt('one_minus_eps',
                 default=1.0,
                 help='Classical interferometer contrast (1 - epsilon).'),
    cfg.FloatOpt('detector_jitter',
                 help='Gaussian timing jitter of a single detector, in ps. '
                      'Defaults to pair_resolution / sqrt(2).'),
    cfg.FloatOpt('pair_resolution',
                 default=520.0,
                 help='Gaussian sigma of the two-detector delay '
                      'distribution t_Res, in ps.'),
    cfg.FloatOpt('setup_efficiency',
                 default=0.021,
                 help='Efficiency from the first lens to the count-rate '
                      'detector.'),
    cfg.StrOpt('polarization_mode',
               default=model.PARALLEL,
               choices=model.POLARIZATION_MODES,
               help='Relative polarization of the interferometer arms.'),
    cfg.FloatOpt('correlation_efficiency',
                 help='Efficiency from the first lens to the correlation '
                      'detectors. Defaults to setup_efficiency.'),
    cfg.FloatOpt('coalescence_window',
                 help='Arrival window for two-photon interference, in ps. '
                      'Defaults to four radiative lifetimes.'),
    cfg.FloatOpt('arm_mismatch',
                 default=0.0,
                 help='Long-arm excess delay over the pulse-pair delay, '
                      'in ps.'),
    cfg.FloatOpt('dead_time',
                 default=0.0, min=0.0,
                 help='Detector dead time, in ps.'),
    cfg.FloatOpt('dark_count_rate',
                 default=0.0, min=0.0,
                 help='Dark count rate of each detector, in counts/s.'),
    cfg.FloatOpt('decay_irf_sigma',
                 default=50.0, min=0.0,
                 help='Gaussian sigma of the lifetime setup response, '
                      'in ps.'),
]

RUN_OPTS = [
    cfg.StrOpt('mode',
               default='hbt',
               choices=BENCH_MODES,
               help='Bench simulated by "qdbench sim".'),
    cfg.IntOpt('n_periods',
               default=100000, min=0,
               help='Number of laser periods to simulate.'),
    cfg.IntOpt('rng_seed',
               default=0, min=0, max=MAX_SEED,
               help='Seed of every random stream of the run.'),
    cfg.FloatOpt('pulse_area',
                 default=math.pi, min=0.0,
                 help='Pulse area of the HBT, decay and brightness runs, '
                      'in rad.'),
    cfg.FloatOpt('hom_pulse_area',
                 default=model.REFERENCE_HOM_PULSE_AREA, min=0.0,
                 help='Pulse area of the HOM runs, in rad.'),
    cfg.FloatOpt('target_g2',
                 min=0.0, max=0.5,
                 help='Calibrate multi_photon_prob so that the HBT g2(0) '
                      'at pulse_area pi equals this value.'),
    cfg.FloatOpt('bin_width',
                 default=float(correlate.DEFAULT_BIN_WIDTH),
                 help='Coincidence histogram bin width, in ps.'),
    cfg.FloatOpt('max_delay',
                 help='Largest coincidence delay, in ps; a multiple of '
                      'bin_width. Defaults to six repetition periods.'),
    cfg.StrOpt('correlation_method',
               default=correlate.FULL,
               choices=correlate.METHODS,
               help='Full cross-correlation or start-stop pairing.'),
    cfg.IntOpt('n_side_peaks',
               default=5, min=1,
               help='Side peaks per side averaged for g2(0).'),
    cfg.FloatOpt('decay_bin_width',
                 default=16.0,
                 help='Bin width of decay histograms, in ps.'),
    cfg.StrOpt('decay_model',
               default=decay.SINGLE_EXP,
               choices=decay.DECAY_MODELS,
               help='Decay model fitted to the on-resonance decay.'),
    cfg.FloatOpt('off_resonance_detuning',
                 default=-2.7,
                 help='Detuning of the off-resonance lifetime run, in meV.'),
    cfg.FloatOpt('fixed_decay_time',
                 help='Decay time held fixed in peak fits, in ps. The '
                      'pipeline uses the fitted on-resonance lifetime.'),
    cfg.FloatOpt('g_star',
                 min=0.0, max=0.5,
                 help='g2(0) used in the visibility correction. The '
                      'pipeline uses the measured value.'),
    cfg.ListOpt('visibility_scan',
                item_type=types.Float(min=0.0),
                default=[],
                help='Extra HOM pulse areas at which the pipeline reports '
                     'the visibility, in rad.'),
]

GROUPS = ((DEVICE_GROUP, DEVICE_OPTS),
          (CAVITY_GROUP, CAVITY_OPTS),
          (BENCH_GROUP, BENCH_OPTS),
          (RUN_GROUP, RUN_OPTS))


@dataclasses.dataclass(frozen=True)
class RunParams(model.ValueObject):
    mode: str = 'hbt'
    n_periods: int = 100000
    rng_seed: int = 0
    pulse_area: float = math.pi
    hom_pulse_area: float = model.REFERENCE_HOM_PULSE_AREA
    target_g2: typing.Optional[float] = None
    bin_width: float = float(correlate.DEFAULT_BIN_WIDTH)
    max_delay: typing.Optional[float] = None
    correlation_method: str = correlate.FULL
    n_side_peaks: int = 5
    decay_bin_width: float = 16.0
    decay_model: str = decay.SINGLE_EXP
    off_resonance_detuning: float = -2.7
    fixed_decay_time: typing.Optional[float] = None
    g_star: typing.Optional[float] = None
    visibility_scan: tuple = ()

    def to_dict(self):
        data = dataclasses.asdict(self)
        data['visibility_scan'] = list(self.visibility_scan)
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['visibility_scan'] = tuple(data.get('visibility_scan', ()))
        return super().from_dict(data)


@dataclasses.dataclass(frozen=True)
class RunConfig:
    device: model.EmitterDevice = model.EmitterDevice()
    cavity: model.CavityParams = model.CavityParams()
    bench: model.BenchConfig = model.BenchConfig()
    run: RunParams = RunParams()

    def replace(self, **sections):
        return dataclasses.replace(self, **sections)

    def with_run(self, **values):
        return self.replace(run=dataclasses.replace(self.run, **values))

    def with_device(self, **values):
        return self.replace(device=dataclasses.replace(self.device,
                                                       **values))

    def with_bench(self, **values):
        return self.replace(bench=dataclasses.replace(self.bench, **values))

    @property
    def max_delay(self):
        if self.run.max_delay is not None:
            return self.run.max_delay
        return correlate.default_max_delay(self.bench.rep_period,
                                           self.run.bin_width)


class _LocatingParser(cfg.ConfigParser):
    """Records the line each section and key first appears on."""

    def __init__(self, filename, sections):
        super().__init__(filename, sections)
        self.locations = {}
        self._key_line = None

    def new_section(self, section):
        super().new_section(section)
        self.locations.setdefault((section, None), self.lineno)

    def _split_key_value(self, line):
        # Assignments are flushed a line late; the key line is seen here.
        self._key_line = self.lineno
        return super()._split_key_value(line)

    def assignment(self, key, value):
        super().assignment(key, value)
        self.locations.setdefault((self.section, key), self._key_line)


def _check_names(path):
    """Reject unknown sections and keys.

    :returns: ``{(section, key): line}``, ``key`` None for the section
    """
    sections = {}
    parser = _LocatingParser(path, sections)
    try:
        parser.parse()
    except cfg.ParseError as exc:
        raise exceptions.ConfigInvalid(str(exc), [str(exc)])
    known = {group: {opt.dest for opt in opts} for group, opts in GROUPS}
    locations = parser.locations
    diagnostics = []
    for section, values in sorted(sections.items()):
        if section == 'DEFAULT' and not values:
            continue
        if section not in known:
            diagnostics.append(
                _("%(path)s:%(line)s: unknown section [%(section)s]") %
                {'path': path, 'section': section,
                 'line': locations.get((section, None), '?')})
            continue
        for key in sorted(values):
            if key not in known[section]:
                diagnostics.append(
                    _("%(path)s:%(line)s: unknown key '%(key)s' in "
                      "section [%(section)s]") %
                    {'path': path, 'key': key, 'section': section,
                     'line': locations.get((section, key), '?')})
    if diagnostics:
        raise exceptions.ConfigInvalid('; '.join(diagnostics), diagnostics)
    return locations


def register_opts(conf):
    for group, opts in GROUPS:
        conf.register_opts(opts, group=group)


def _read_group(conf, group, opts, path, locations):
    values = {}
    for opt in opts:
        try:
            values[opt.dest] = getattr(getattr(conf, group), opt.dest)
        except (cfg.ConfigFileValueError, ValueError) as exc:
            line = locations.get((group, opt.dest), '?')
            msg = (_('%(path)s:%(line)s: [%(group)s] %(key)s: %(error)s') %
                   {'path': path, 'line': line, 'group': group,
                    'key': opt.dest, 'error': exc})
            raise exceptions.ConfigInvalid(msg, [msg])
    return values


def _bench_from_values(values):
    ratio = values.pop('bs_ratio')
    reflectance = values.pop('bs_reflectance')
    if ratio is not None and reflectance is not None:
        raise exceptions.ConfigInvalid(
            _('[bench] bs_ratio and bs_reflectance are mutually exclusive'))
    if ratio is not None:
        try:
            reflectance = model.reflectance_from_ratio(ratio)
        except exceptions.InvalidParameter as exc:
            raise exceptions.ConfigInvalid(str(exc))
    values['bs_reflectance'] = 0.5 if reflectance is None else reflectance
    return model.BenchConfig(**values)


def load_config(path, overrides=None):
    """Parse a run configuration file.

    :param overrides: optional ``{group: {key: value}}`` applied on top of
        the file, as the command line does
    :returns: a validated :class:`RunConfig`
    :raises: ConfigInvalid, DataFileError
    """
    if not os.path.isfile(path):
        raise exceptions.DataFileError(path, _('configuration file not found'))
    locations = _check_names(path)

    conf = cfg.ConfigOpts()
    register_opts(conf)
    try:
        conf(args=[], project='qdbench', default_config_files=[path],
             default_config_dirs=[], use_env=False,
             validate_default_values=True)
    except cfg.Error as exc:
        raise exceptions.ConfigInvalid(str(exc), [str(exc)])
    for group, values in (overrides or {}).items():
        for key, value in values.items():
            try:
                conf.set_override(key, value, group=group)
            except (cfg.NoSuchOptError, ValueError) as exc:
                msg = (_('Invalid override [%(group)s] %(key)s=%(value)s: '
                         '%(error)s') %
                       {'group': group, 'key': key, 'value': value,
                        'error': exc})
                raise exceptions.ConfigInvalid(msg, [msg])

    sections = {group: _read_group(conf, group, opts, path, locations)
                for group, opts in GROUPS}
    run_values = sections[RUN_GROUP]
    run_values['visibility_scan'] = tuple(run_values['visibility_scan'])
    run_config = RunConfig(
        device=model.EmitterDevice(**sections[DEVICE_GROUP]),
        cavity=model.CavityParams(**sections[CAVITY_GROUP]),
        bench=_bench_from_values(sections[BENCH_GROUP]),
        run=RunParams(**run_values))
    validate_run_config(run_config)
    LOG.info('Loaded configuration %s (mode %s, %d periods)',
             path, run_config.run.mode, run_config.run.n_periods)
    return run_config


def validate_run_config(run_config):
    """Raise ConfigInvalid listing every violated invariant."""
    report = model.validate(run_config.device, run_config.cavity,
                            run_config.bench)
    errors = list(report.errors)
    run = run_config.run
    if run.n_periods < 1:
        errors.append(_('n_periods must be at least 1'))
    if run.bin_width <= 0:
        errors.append(_('bin_width must be positive'))
    elif run.max_delay is not None:
        ratio = run.max_delay / run.bin_width
        if run.max_delay < 0 or abs(ratio - round(ratio)) > 1e-9:
            errors.append(_('max_delay must be a non-negative multiple of '
                            'bin_width'))
    if run.decay_bin_width <= 0:
        errors.append(_('decay_bin_width must be positive'))
    if run.mode.startswith('hom') and run_config.bench.pulse_pair_delay == 0:
        errors.append(_('HOM modes need a non-zero pulse_pair_delay'))
    for warning in report.warnings:
        LOG.warning(warning)
    if errors:
        raise exceptions.ConfigInvalid('; '.join(errors), errors)
    return report


def resolve(run_config):
    """Materialize every default that depends on other values.

    The multi-photon probability is calibrated from ``target_g2``, the
    bench jitter and correlation efficiency are filled in and
    ``max_delay`` is set.
    """
    device = run_config.device
    if run_config.run.target_g2 is not None:
        p_mp = dynamics.calibrate_multi_photon(device,
                                               run_config.run.target_g2)
        device = dataclasses.replace(device, multi_photon_prob=p_mp)
    return RunConfig(
        device=device, cavity=run_config.cavity,
        bench=run_config.bench.resolved(),
        run=dataclasses.replace(run_config.run,
                                max_delay=run_config.max_delay))


def resolved_config(run_config):
    """Nested dict of the fully materialized configuration."""
    resolved = resolve(run_config)
    return {DEVICE_GROUP: resolved.device.to_dict(),
            CAVITY_GROUP: resolved.cavity.to_dict(),
            BENCH_GROUP: resolved.bench.to_dict(),
            RUN_GROUP: resolved.run.to_dict()}


def from_resolved(data):
    """Rebuild a :class:`RunConfig` from :func:`resolved_config` output."""
    try:
        return RunConfig(
            device=model.EmitterDevice.from_dict(data[DEVICE_GROUP]),
            cavity=model.CavityParams.from_dict(data[CAVITY_GROUP]),
            bench=model.BenchConfig.from_dict(data[BENCH_GROUP]),
            run=RunParams.from_dict(data[RUN_GROUP]))
    except (KeyError, TypeError, exceptions.InvalidParameter) as exc:
        raise exceptions.ConfigInvalid(
            _('Malformed resolved configuration: %s') % exc)
