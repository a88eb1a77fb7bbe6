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

"""The ``qdbench`` command.

Subcommands::

    qdbench sim CONFIG [--seed N] [--periods N] [--mode M] [--out DIR]
    qdbench analyze CLICKS [--mode M] [--config FILE] [--orthogonal CLICKS]
    qdbench calc {purcell,purcell-max,efficiency} ...
    qdbench pipeline CONFIG [--seed N] [--periods N] [--out DIR]

Exit codes: 0 success, 2 invalid configuration or parameter, 3 fit or
extraction failure, 4 I/O error, 1 anything else.
"""

import argparse
import logging
import os
import sys

import jinja2

from qdbench._i18n import _
from qdbench import config
from qdbench import exceptions
from qdbench import fileio
from qdbench.fitkit import calculators
from qdbench import model
from qdbench import pipeline
from qdbench import version

LOG = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_FIT = 3
EXIT_IO = 4

CLICKS_FILE = 'clicks.csv'
RUN_FILE = 'run.json'
HISTOGRAM_FILE = 'histogram.csv'
FIT_FILE = 'fit.json'
PEAKS_FILE = 'peaks.csv'
SUMMARY_FILE = 'summary.json'

CALC_TEMPLATE = "{{ name }} = {{ '%.6g'|format(value) }} ± " \
                "{{ '%.2g'|format(error) }}"

SUMMARY_TEMPLATE = """\
{% macro pm(value, error, fmt) -%}
{{ fmt|format(value) }} ± {{ fmt|format(error) }}
{%- endmacro -%}
g2(0)      = {{ pm(g2_zero, g2_zero_err, '%.4f') }}
nu_raw     = {{ pm(nu_raw, nu_raw_err, '%.3f') }}
nu_corr    = {{ pm(nu_corr, nu_corr_err, '%.3f') }}
F_P        = {{ pm(f_purcell, f_purcell_err, '%.2f') }}
eta_device = {{ pm(eta_device, eta_device_err, '%.3f') }}
{% for row in visibility_scan -%}
theta={{ '%.4f'|format(row.pulse_area) }}:
{#- #} nu_raw={{ '%.3f'|format(row.nu_raw) }}
{#- #} nu_corr={{ '%.3f'|format(row.nu_corr) }}
{% endfor -%}
"""


def _expand_template(contents, params):
    tpl = jinja2.Template(source=contents,
                          undefined=jinja2.StrictUndefined)
    return tpl.render(**params)


def positive_int(blob):
    value = int(blob)
    if value < 0:
        msg = "%r is not a positive integer" % blob
        raise argparse.ArgumentTypeError(msg)
    return value


class _VersionAction(argparse.Action):
    def __init__(self, option_strings, dest, **kwargs):
        super().__init__(option_strings, dest, nargs=0,
                         help='Show the version and exit.')

    def __call__(self, parser, namespace, values, option_string=None):
        print(version.version_info.version_string())
        parser.exit()


def _overrides(args):
    run = {}
    if getattr(args, 'seed', None) is not None:
        run['rng_seed'] = args.seed
    if getattr(args, 'periods', None) is not None:
        run['n_periods'] = args.periods
    if getattr(args, 'mode', None) is not None:
        run['mode'] = args.mode
    return {config.RUN_GROUP: run} if run else {}


def _out_dir(args, default):
    return args.out if args.out is not None else default


def cmd_sim(args):
    run_config = config.resolve(
        config.load_config(args.config, _overrides(args)))
    clicks = pipeline.simulate(run_config, threads=args.threads)
    out = _out_dir(args, os.curdir)
    fileio.write_clicks(os.path.join(out, CLICKS_FILE), clicks)
    fileio.write_json(os.path.join(out, RUN_FILE),
                      config.resolved_config(run_config))
    LOG.info('Wrote %d click(s) to %s', len(clicks), out)
    return EXIT_OK


def _analysis_config(args):
    """Configuration of an analysis run.

    ``--config`` accepts a ``run.json`` written by ``sim`` or an INI run
    file; without it the ``run.json`` next to the clicks is used when
    present and the built-in defaults otherwise.
    """
    path = args.config
    if path is None:
        candidate = os.path.join(os.path.dirname(os.path.abspath(
            args.clicks)), RUN_FILE)
        if os.path.isfile(candidate):
            path = candidate
    if path is None:
        LOG.warning('No run configuration given; using the defaults')
        run_config = config.resolve(config.RunConfig())
    elif path.endswith('.json'):
        run_config = config.from_resolved(fileio.read_json(path))
    else:
        run_config = config.resolve(config.load_config(path))
    if args.fixed_decay_time is not None:
        run_config = run_config.with_run(
            fixed_decay_time=args.fixed_decay_time)
    if args.g_star is not None:
        run_config = run_config.with_run(g_star=args.g_star)
    return run_config


def cmd_analyze(args):
    run_config = _analysis_config(args)
    mode = args.mode or run_config.run.mode
    if args.orthogonal is not None and mode != pipeline.HOM_PARALLEL:
        raise exceptions.InvalidParameter(
            _('--orthogonal only applies to mode hom-parallel'))
    clicks = fileio.read_clicks(args.clicks)
    analysis = pipeline.analyze(clicks, run_config, mode,
                                threads=args.threads)
    if args.orthogonal is not None:
        reference = pipeline.analyze(fileio.read_clicks(args.orthogonal),
                                     run_config, pipeline.HOM_ORTHOGONAL,
                                     threads=args.threads)
        if not reference.converged:
            raise exceptions.FitNotConverged(reference.report)
        analysis = pipeline.visibility(analysis, reference, run_config)

    out = _out_dir(args, os.path.dirname(os.path.abspath(args.clicks)))
    if analysis.histogram is not None:
        fileio.write_histogram(os.path.join(out, HISTOGRAM_FILE),
                               analysis.histogram)
        fileio.write_peaks(os.path.join(out, PEAKS_FILE),
                           analysis.histogram, analysis.curve)
    fileio.write_json(os.path.join(out, FIT_FILE), analysis.fit_document())
    if not analysis.converged:
        raise exceptions.FitNotConverged(analysis.report)
    return EXIT_OK


def _print_calc(name, measurement):
    print(_expand_template(CALC_TEMPLATE, {
        'name': name, 'value': measurement.value,
        'error': measurement.error}))


def cmd_calc_purcell(args):
    _print_calc('F_P', calculators.purcell_from_lifetimes(
        args.t_on, args.t_off, args.t_on_err, args.t_off_err))
    return EXIT_OK


def cmd_calc_purcell_max(args):
    if args.quality_factor <= 0 or args.wavelength <= 0:
        raise exceptions.InvalidParameter(
            _('Q and the wavelength must be positive'))
    # Linewidth consistent with Q.
    cavity = model.CavityParams(
        quality_factor=args.quality_factor,
        mode_linewidth=(model.PLANCK_EV_UM / args.wavelength * 1e6 /
                        args.quality_factor),
        wavelength=args.wavelength,
        refractive_index=args.refractive_index,
        mode_volume=args.mode_volume,
        mode_volume_unit=args.mode_volume_unit)
    _print_calc('F_P,max', model.Measurement(
        calculators.purcell_theoretical_max(cavity), 0.0))
    return EXIT_OK


def cmd_calc_efficiency(args):
    _print_calc('eta', calculators.device_efficiency(
        args.count_rate, args.rep_rate * 1e6, args.setup_efficiency,
        setup_efficiency_err=args.setup_efficiency_err,
        count_rate_err=args.count_rate_err))
    return EXIT_OK


def cmd_pipeline(args):
    run_config = config.load_config(args.config, _overrides(args))
    summary = pipeline.run_pipeline(run_config, threads=args.threads)
    out = _out_dir(args, os.curdir)
    fileio.write_json(os.path.join(out, SUMMARY_FILE), summary)
    fileio.write_json(os.path.join(out, RUN_FILE),
                      config.resolved_config(run_config))
    sys.stdout.write(_expand_template(SUMMARY_TEMPLATE, summary))
    return EXIT_OK


def _add_run_arguments(parser):
    parser.add_argument('config', help='Run configuration file.')
    parser.add_argument('--seed', type=positive_int,
                        help='Override [run] rng_seed.')
    parser.add_argument('--periods', type=positive_int,
                        help='Override [run] n_periods.')
    parser.add_argument('--out', help='Output directory (default: .).')


def _add_threads(parser):
    parser.add_argument('--threads', type=positive_int,
                        default=os.cpu_count() or 1,
                        help='Shards processed concurrently; outputs do '
                             'not depend on it.')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='qdbench',
        description='Simulate and analyse a pulsed single-photon source.')
    parser.add_argument('--version', action=_VersionAction)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-d', '--debug', action='store_true',
                           help='Log at DEBUG level.')
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='Log at INFO level.')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    sim = sub.add_parser('sim', help='Simulate one bench into clicks.csv.')
    _add_run_arguments(sim)
    sim.add_argument('--mode', choices=config.BENCH_MODES,
                     help='Override [run] mode.')
    _add_threads(sim)
    sim.set_defaults(func=cmd_sim)

    analyze = sub.add_parser(
        'analyze', help='Histogram and fit a clicks.csv file.')
    analyze.add_argument('clicks', help='clicks.csv to analyse.')
    analyze.add_argument('--mode', choices=config.BENCH_MODES,
                         help='Analysis mode (default: [run] mode).')
    analyze.add_argument('--config',
                         help='run.json or INI run file (default: the '
                              'run.json next to the clicks).')
    analyze.add_argument('--orthogonal',
                         help='clicks.csv of the orthogonal HOM run; with '
                              'mode hom-parallel the visibility is '
                              'extracted.')
    analyze.add_argument('--fixed-decay-time', type=float,
                         help='Decay time held fixed in the peak fit, '
                              'in ps.')
    analyze.add_argument('--g-star', type=float,
                         help='g2(0) used in the visibility correction.')
    analyze.add_argument('--out',
                         help='Output directory (default: next to the '
                              'clicks).')
    _add_threads(analyze)
    analyze.set_defaults(func=cmd_analyze)

    calc = sub.add_parser('calc', help='Closed-form calculators.')
    calc_sub = calc.add_subparsers(dest='calculator', metavar='CALCULATOR')
    calc_sub.required = True

    purcell = calc_sub.add_parser(
        'purcell', help='Purcell factor from two lifetimes (ps).')
    purcell.add_argument('t_on', type=float)
    purcell.add_argument('t_off', type=float)
    purcell.add_argument('--t-on-err', type=float, default=0.0)
    purcell.add_argument('--t-off-err', type=float, default=0.0)
    purcell.set_defaults(func=cmd_calc_purcell)

    purcell_max = calc_sub.add_parser(
        'purcell-max', help='Theoretical maximum Purcell factor.')
    purcell_max.add_argument('quality_factor', type=float)
    purcell_max.add_argument('mode_volume', type=float)
    purcell_max.add_argument('--mode-volume-unit',
                             choices=model.MODE_VOLUME_UNITS,
                             default=model.CUBIC_WAVELENGTH)
    purcell_max.add_argument('--wavelength', type=float, default=0.9,
                             help='Wavelength in micrometers.')
    purcell_max.add_argument('--refractive-index', type=float, default=3.6)
    purcell_max.set_defaults(func=cmd_calc_purcell_max)

    efficiency = calc_sub.add_parser(
        'efficiency', help='Device efficiency from a detected count rate.')
    efficiency.add_argument('count_rate', type=float,
                            help='Detected counts per second.')
    efficiency.add_argument('--rep-rate', type=float, default=82.0,
                            help='Repetition rate in MHz.')
    efficiency.add_argument('--setup-efficiency', type=float, default=0.021)
    efficiency.add_argument('--setup-efficiency-err', type=float,
                            default=0.0)
    efficiency.add_argument('--count-rate-err', type=float, default=0.0)
    efficiency.set_defaults(func=cmd_calc_efficiency)

    pipe = sub.add_parser(
        'pipeline', help='Simulate and analyse every bench; write '
                         'summary.json.')
    _add_run_arguments(pipe)
    _add_threads(pipe)
    pipe.set_defaults(func=cmd_pipeline)
    return parser


def _setup_logging(args):
    level = logging.WARNING
    if args.debug:
        level = logging.DEBUG
    elif args.verbose:
        level = logging.INFO
    logging.basicConfig(
        level=level, stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s %(message)s')


def main(args=None):
    """Entry point of the ``qdbench`` console script."""
    parser = build_parser()
    args = parser.parse_args(args=args)
    _setup_logging(args)
    try:
        return args.func(args)
    except exceptions.ConfigInvalid as exc:
        for line in exc.diagnostics or [str(exc)]:
            sys.stderr.write('%s\n' % line)
        return EXIT_CONFIG
    except exceptions.InvalidParameter as exc:
        sys.stderr.write('%s\n' % exc)
        return EXIT_CONFIG
    except (exceptions.FitNotConverged, exceptions.ExtractionError) as exc:
        sys.stderr.write('%s\n' % exc)
        return EXIT_FIT
    except (OSError, exceptions.DataFileError) as exc:
        sys.stderr.write('%s\n' % exc)
        return EXIT_IO
    except Exception:
        LOG.exception('Unexpected error')
        return EXIT_UNEXPECTED


if __name__ == '__main__':
    sys.exit(main())
