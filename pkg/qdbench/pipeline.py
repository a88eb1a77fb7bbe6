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

"""Simulation and analysis stages shared by the command line tools.

Every stage works on in-memory objects; reading and writing the artifacts
is left to :mod:`qdbench.cli`.
"""

import dataclasses
import logging
import typing

from oslo_utils import timeutils

from qdbench._i18n import _
from qdbench import config
from qdbench import correlate
from qdbench import exceptions
from qdbench.fitkit import calculators
from qdbench.fitkit import decay
from qdbench.fitkit import extract
from qdbench.fitkit import train
from qdbench import model
from qdbench import optics
from qdbench import sharding

LOG = logging.getLogger(__name__)

HBT = 'hbt'
HOM_PARALLEL = 'hom-parallel'
HOM_ORTHOGONAL = 'hom-orthogonal'
DECAY = 'decay'
BRIGHTNESS = 'brightness'
HOM_MODES = (HOM_PARALLEL, HOM_ORTHOGONAL)

# Seed offsets of the pipeline stages.
STAGE_DECAY_ON = 1
STAGE_DECAY_OFF = 2
STAGE_BRIGHTNESS = 3
STAGE_HBT = 4
STAGE_HOM = 5
STAGE_SCAN = 16


@dataclasses.dataclass(frozen=True)
class Analysis:
    """Result of analysing one click stream.

    ``report`` is a :class:`qdbench.model.FitReport` for the correlation
    modes, a :class:`qdbench.fitkit.decay.DecayFit` for ``decay`` and
    ``None`` for ``brightness``, whose result lives in ``values``.
    """

    mode: str
    histogram: typing.Optional[model.Histogram] = None
    curve: typing.Any = None
    report: typing.Any = None
    values: dict = dataclasses.field(default_factory=dict)

    @property
    def converged(self):
        return self.report is None or self.report.converged

    def fit_document(self):
        """The content of ``fit.json``."""
        if self.report is None:
            return dict(self.values)
        data = self.report.to_dict()
        data.update(self.values)
        return data


def _timed(label, func, *args, **kwargs):
    with timeutils.StopWatch() as watch:
        result = func(*args, **kwargs)
    LOG.info('%s took %.2f s', label, watch.elapsed())
    return result


def simulate(run_config, mode=None, threads=1):
    """Simulate the clicks of one bench.

    :param run_config: a resolved :class:`qdbench.config.RunConfig`
    :param mode: bench to load, ``run_config.run.mode`` by default
    :returns: a :class:`qdbench.model.ClickStream`
    """
    mode = mode or run_config.run.mode
    bench = optics.load_bench(mode, run_config.device, run_config.cavity,
                              run_config.bench)
    return _timed(_('Simulation of %s') % mode, bench.simulate,
                  run_config.run, threads=threads)


def _peak_decay_time(run_config, lifetime):
    """Decay time of the peak shape and whether it is held fixed."""
    if lifetime is not None:
        return lifetime, True
    if run_config.run.fixed_decay_time is not None:
        return run_config.run.fixed_decay_time, True
    return run_config.device.lifetime_on_resonance, False


def _analyze_hbt(clicks, run_config, lifetime, threads):
    run = run_config.run
    hist = correlate.correlate(clicks, run.bin_width, run_config.max_delay,
                               method=run.correlation_method,
                               threads=threads)
    tau, fixed = _peak_decay_time(run_config, lifetime)
    model0 = train.comb_model(hist, run_config.bench.rep_period, tau,
                              run_config.bench.pair_resolution,
                              fix_decay_time=fixed)
    report = train.fit_peak_train(hist, model0)
    g2 = extract.extract_g2(report, run.n_side_peaks)
    report = report.with_derived(g2_zero=g2.value, g2_zero_err=g2.error)
    LOG.info('g2(0) = %.4f +- %.4f', g2.value, g2.error)
    return Analysis(HBT, hist, train.fitted_curve(hist, report), report)


def _analyze_hom(clicks, run_config, mode, lifetime, threads):
    run = run_config.run
    hist = correlate.correlate(clicks, run.bin_width, run_config.max_delay,
                               method=run.correlation_method,
                               threads=threads)
    tau, fixed = _peak_decay_time(run_config, lifetime)
    model0 = train.cluster_model(hist, run_config.bench.pair_delay_ps, tau,
                                 run_config.bench.pair_resolution,
                                 fix_decay_time=fixed)
    report = train.fit_peak_train(hist, model0)
    return Analysis(mode, hist, train.fitted_curve(hist, report), report)


def _analyze_decay(clicks, run_config):
    run = run_config.run
    hist = correlate.decay_histogram(clicks, run_config.bench.rep_period,
                                     run.decay_bin_width)
    irf_sigma = run_config.bench.decay_irf_sigma
    fit = decay.fit_decay(hist, run.decay_model, irf_sigma=irf_sigma)
    return Analysis(DECAY, hist, decay.fitted_curve(hist, fit, irf_sigma),
                    fit)


def _analyze_brightness(clicks, run_config):
    bench = run_config.bench
    rate = optics.count_rate(clicks, bench, run_config.run.n_periods)
    eta = calculators.device_efficiency(rate.value, bench.rep_rate * 1e6,
                                        bench.setup_efficiency,
                                        count_rate_err=rate.error)
    LOG.info('Count rate %.4g cps, eta_device %.4f', rate.value, eta.value)
    return Analysis(BRIGHTNESS, values={
        'count_rate': rate.value, 'count_rate_err': rate.error,
        'eta_device': eta.value, 'eta_device_err': eta.error})


def analyze(clicks, run_config, mode=None, lifetime=None, threads=1):
    """Histogram, fit and extract the observable of one click stream.

    :param lifetime: decay time (ps) held fixed in the peak fits; defaults
        to ``[run] fixed_decay_time`` or, when unset, a free decay time
        seeded from the device lifetime
    :returns: an :class:`Analysis`
    """
    mode = mode or run_config.run.mode
    with timeutils.StopWatch() as watch:
        if mode == HBT:
            result = _analyze_hbt(clicks, run_config, lifetime, threads)
        elif mode in HOM_MODES:
            result = _analyze_hom(clicks, run_config, mode, lifetime,
                                  threads)
        elif mode == DECAY:
            result = _analyze_decay(clicks, run_config)
        elif mode == BRIGHTNESS:
            result = _analyze_brightness(clicks, run_config)
        else:
            raise exceptions.InvalidParameter(
                _('Unknown analysis mode %s') % mode)
    LOG.info('Analysis of %s took %.2f s', mode, watch.elapsed())
    return result


def visibility(parallel, orthogonal, run_config, g_star=None):
    """Raw and corrected visibility from the two HOM analyses.

    :param g_star: ``Measurement`` or float; defaults to ``[run] g_star``
        and to zero when that is unset as well
    :returns: the parallel :class:`Analysis` with ``nu_raw`` and
        ``nu_corr`` filled in
    """
    if g_star is None:
        g_star = run_config.run.g_star or 0.0
    if not isinstance(g_star, model.Measurement):
        g_star = model.Measurement(float(g_star), 0.0)
    dropped = None
    if not 0 <= g_star.value < extract.MAX_CORRECTABLE_G2:
        dropped = _('g_star=%.4g is outside [0, %s); multi-photon term '
                    'dropped') % (g_star.value, extract.MAX_CORRECTABLE_G2)
        LOG.warning(dropped)
        g_star = model.Measurement(0.0, 0.0)
    bench = run_config.bench
    nu_raw = extract.extract_visibility(parallel.report, orthogonal.report)
    kappa = extract.correction_kappa(
        nu_raw.value, bench.bs_reflectance, bench.one_minus_eps,
        g_star=g_star.value, pulse_area=run_config.run.hom_pulse_area,
        multi_photon_order=run_config.device.multi_photon_order)
    nu_corr = extract.correct_visibility(
        nu_raw.value, bench.bs_reflectance, bench.one_minus_eps,
        g_star=g_star.value, kappa=kappa, nu_raw_err=nu_raw.error,
        g_star_err=g_star.error)
    LOG.info('Visibility: raw %.4f +- %.4f, corrected %.4f +- %.4f',
             nu_raw.value, nu_raw.error, nu_corr.value, nu_corr.error)
    report = parallel.report.with_derived(
        nu_raw=nu_raw.value, nu_raw_err=nu_raw.error,
        nu_corr=nu_corr.value, nu_corr_err=nu_corr.error)
    report = report.with_assumptions(extract.correction_assumption(kappa))
    if dropped:
        report = report.with_assumptions(dropped)
    return dataclasses.replace(parallel, report=report)


def _stage(run_config, stage, **run_values):
    seed = sharding.derive_seed(run_config.run.rng_seed, stage)
    return run_config.with_run(rng_seed=seed, **run_values)


def _checked(analysis):
    if not analysis.converged:
        raise exceptions.FitNotConverged(analysis.report)
    return analysis


def _hom_pair(run_config, stage, theta, lifetime, g_star, threads):
    stage_config = _stage(run_config, stage, hom_pulse_area=theta)
    analyses = {}
    for mode in HOM_MODES:
        clicks = simulate(stage_config, mode, threads)
        analyses[mode] = _checked(analyze(clicks, stage_config, mode,
                                          lifetime=lifetime,
                                          threads=threads))
    return visibility(analyses[HOM_PARALLEL], analyses[HOM_ORTHOGONAL],
                      stage_config, g_star)


def _measurement_pair(name, measurement):
    return {name: measurement.value, name + '_err': measurement.error}


def run_pipeline(run_config, threads=1):
    """Simulate and analyse every bench of a full device characterization.

    The stages run on independent seeds derived from ``[run] rng_seed``:
    on- and off-resonance decays give the Purcell factor, the brightness
    run the device efficiency, the HBT run g2(0) and the HOM pair at
    ``hom_pulse_area`` the raw and corrected visibility.  Each pulse area
    of ``visibility_scan`` adds another HOM pair.

    :returns: the summary dict written to ``summary.json``
    """
    resolved = config.resolve(run_config)
    run = resolved.run
    summary = {'rng_seed': run.rng_seed, 'n_periods': run.n_periods,
               'multi_photon_prob': resolved.device.multi_photon_prob}
    with timeutils.StopWatch() as watch:
        on_config = _stage(resolved, STAGE_DECAY_ON).with_device(
            detuning=0.0)
        on_fit = _checked(analyze(simulate(on_config, DECAY, threads),
                                  on_config, DECAY)).report
        off_config = _stage(resolved, STAGE_DECAY_OFF,
                            decay_model=decay.SINGLE_EXP).with_device(
            detuning=run.off_resonance_detuning)
        off_fit = _checked(analyze(simulate(off_config, DECAY, threads),
                                   off_config, DECAY)).report
        purcell = calculators.purcell_from_lifetimes(
            on_fit.lifetime.value, off_fit.lifetime.value,
            on_fit.lifetime.error, off_fit.lifetime.error)
        summary.update(_measurement_pair('lifetime_on', on_fit.lifetime))
        summary.update(_measurement_pair('lifetime_off', off_fit.lifetime))
        summary.update(_measurement_pair('f_purcell', purcell))
        summary['f_purcell_max'] = calculators.purcell_theoretical_max(
            resolved.cavity)

        bright_config = _stage(resolved, STAGE_BRIGHTNESS)
        bright = analyze(simulate(bright_config, BRIGHTNESS, threads),
                         bright_config, BRIGHTNESS)
        summary.update(bright.values)

        lifetime = on_fit.lifetime.value
        hbt_config = _stage(resolved, STAGE_HBT)
        hbt = _checked(analyze(simulate(hbt_config, HBT, threads),
                               hbt_config, HBT, lifetime=lifetime,
                               threads=threads)).report
        g_star = model.Measurement(hbt.g2_zero, hbt.g2_zero_err)
        summary.update(_measurement_pair('g2_zero', g_star))

        hom = _hom_pair(resolved, STAGE_HOM, run.hom_pulse_area, lifetime,
                        g_star, threads).report
        summary.update({'hom_pulse_area': run.hom_pulse_area,
                        'nu_raw': hom.nu_raw, 'nu_raw_err': hom.nu_raw_err,
                        'nu_corr': hom.nu_corr,
                        'nu_corr_err': hom.nu_corr_err})
        assumptions = list(purcell.flags) + list(hom.assumptions)

        scan = []
        for index, theta in enumerate(run.visibility_scan):
            report = _hom_pair(resolved, STAGE_SCAN + index, theta,
                               lifetime, g_star, threads).report
            scan.append({'pulse_area': theta,
                         'nu_raw': report.nu_raw,
                         'nu_raw_err': report.nu_raw_err,
                         'nu_corr': report.nu_corr,
                         'nu_corr_err': report.nu_corr_err})
        summary['visibility_scan'] = scan
        summary['assumptions'] = assumptions
    LOG.info('Pipeline took %.2f s', watch.elapsed())
    return summary
