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

"""Fitting a train of EMG peaks to a coincidence histogram.

Every peak shares one decay time and one Gaussian width.  Areas, decay
time and width are fitted through their logarithms so they stay positive;
centers are fitted directly.  Expected counts in a bin are the peak
density at the bin center times the bin width, with Poisson variance
``max(counts, 1)``.
"""

import dataclasses
import logging

import numpy as np

from qdbench._i18n import _
from qdbench import exceptions
from qdbench.fitkit import peaks
from qdbench.fitkit import solver
from qdbench import model

LOG = logging.getLogger(__name__)

SIGMA_ASSUMPTION = ('t_Res is the Gaussian sigma of the two-detector delay '
                    'distribution (not its FWHM)')
MIN_SEED_AREA = 1.0


@dataclasses.dataclass(frozen=True)
class PeakModel:
    centers: tuple
    areas: tuple
    decay_time: float
    sigma: float
    fix_centers: bool = True
    fix_decay_time: bool = False
    fix_sigma: bool = False
    fit_range: tuple = None

    def __post_init__(self):
        if len(self.centers) != len(self.areas) or not self.centers:
            raise exceptions.InvalidParameter(
                _('A peak model needs one area per center'))
        if self.decay_time <= 0 or self.sigma <= 0:
            raise exceptions.InvalidParameter(
                _('Decay time and sigma must be positive'))
        if any(a < 0 for a in self.areas):
            raise exceptions.InvalidParameter(
                _('Peak areas must be non-negative'))

    @property
    def n_peaks(self):
        return len(self.centers)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for center, area in zip(self.centers, self.areas):
            total += peaks.emg_peak(t, center, area, self.decay_time,
                                    self.sigma)
        return total

    def expected_counts(self, hist):
        return self.evaluate(hist.bin_centers) * hist.bin_width


def _seed_areas(hist, centers):
    """Counts of the bins nearest to each center, a starting guess."""
    centers = np.asarray(centers, dtype=float)
    nearest = np.argmin(np.abs(hist.bin_centers[:, None] - centers[None, :]),
                        axis=1)
    sums = np.bincount(nearest, weights=hist.counts, minlength=len(centers))
    return tuple(max(float(s), MIN_SEED_AREA) for s in sums)


def comb_model(hist, rep_period, decay_time, sigma, n_side=None, **flags):
    """Seed a pulsed autocorrelation comb with peaks at ``k * rep_period``.

    ``n_side`` defaults to every comb peak whose center lies inside the
    histogram.
    """
    if n_side is None:
        half_span = -hist.origin - hist.bin_width / 2.0
        n_side = int(np.floor(half_span / rep_period + 1e-9))
    centers = tuple(k * rep_period for k in range(-n_side, n_side + 1))
    return PeakModel(centers, _seed_areas(hist, centers), decay_time, sigma,
                     **flags)


def cluster_model(hist, pair_delay, decay_time, sigma, **flags):
    """Seed the five-peak HOM cluster at ``{-2, -1, 0, 1, 2} * pair_delay``.

    The fit is restricted to ``|tau| <= 3 * pair_delay`` unless
    ``fit_range`` is given.
    """
    centers = tuple(k * pair_delay for k in (-2, -1, 0, 1, 2))
    flags.setdefault('fit_range', (-3.0 * pair_delay, 3.0 * pair_delay))
    flags.setdefault('fix_decay_time', True)
    flags.setdefault('fix_sigma', True)
    return PeakModel(centers, _seed_areas(hist, centers), decay_time, sigma,
                     **flags)


class _Problem:
    """Maps the free parameters of a PeakModel to a solver vector."""

    def __init__(self, hist, model0):
        self.model0 = model0
        centers = hist.bin_centers
        mask = np.ones(len(centers), dtype=bool)
        if model0.fit_range is not None:
            lo, hi = model0.fit_range
            mask = (centers >= lo) & (centers <= hi)
        if not mask.any():
            raise exceptions.InvalidParameter(
                _('No histogram bins inside the fit range'))
        self.t = centers[mask]
        self.bin_width = hist.bin_width
        self.counts = hist.counts[mask].astype(float)
        self.weights = 1.0 / np.sqrt(np.maximum(self.counts, 1.0))
        n = model0.n_peaks
        self.n = n
        self.fit_centers = not model0.fix_centers
        self.fit_tau = not model0.fix_decay_time
        self.fit_sigma = not model0.fix_sigma

    @property
    def n_free(self):
        return (self.n * (2 if self.fit_centers else 1) + int(self.fit_tau) +
                int(self.fit_sigma))

    def pack(self, m):
        x = list(np.log(np.maximum(m.areas, 1e-300)))
        if self.fit_centers:
            x.extend(m.centers)
        if self.fit_tau:
            x.append(np.log(m.decay_time))
        if self.fit_sigma:
            x.append(np.log(m.sigma))
        return np.array(x, dtype=float)

    def unpack(self, x):
        n = self.n
        areas = np.exp(x[:n])
        pos = n
        centers = np.asarray(self.model0.centers, dtype=float)
        if self.fit_centers:
            centers = x[pos:pos + n]
            pos += n
        tau = self.model0.decay_time
        if self.fit_tau:
            tau = float(np.exp(x[pos]))
            pos += 1
        sigma = self.model0.sigma
        if self.fit_sigma:
            sigma = float(np.exp(x[pos]))
        return centers, areas, tau, sigma

    def natural_jacobian(self, centers, areas, tau, sigma):
        """d(expected counts)/d(center, area, tau, sigma), free columns."""
        n = self.n
        d_centers = np.empty((len(self.t), n))
        d_areas = np.empty((len(self.t), n))
        d_tau = np.zeros(len(self.t))
        d_sigma = np.zeros(len(self.t))
        value = np.zeros(len(self.t))
        for k in range(n):
            jac = peaks.emg_peak_jacobian(self.t, centers[k], areas[k], tau,
                                          sigma)
            value += jac[:, 1] * areas[k]
            d_centers[:, k] = jac[:, 0]
            d_areas[:, k] = jac[:, 1]
            d_tau += jac[:, 2]
            d_sigma += jac[:, 3]
        columns = [d_areas]
        if self.fit_centers:
            columns.append(d_centers)
        if self.fit_tau:
            columns.append(d_tau[:, None])
        if self.fit_sigma:
            columns.append(d_sigma[:, None])
        return value * self.bin_width, np.hstack(columns) * self.bin_width

    def chain(self, centers, areas, tau, sigma):
        """d(natural)/d(solver variable) for every free parameter."""
        factors = list(areas)
        if self.fit_centers:
            factors.extend([1.0] * self.n)
        if self.fit_tau:
            factors.append(tau)
        if self.fit_sigma:
            factors.append(sigma)
        return np.array(factors)

    def __call__(self, x):
        params = self.unpack(x)
        expected, jac = self.natural_jacobian(*params)
        residuals = (expected - self.counts) * self.weights
        jac = jac * self.chain(*params)[None, :] * self.weights[:, None]
        return residuals, jac


def fit_peak_train(hist, model0, max_iterations=solver.MAX_ITERATIONS):
    """Fit ``model0`` to ``hist`` by damped least squares.

    Standard errors come from the covariance in natural parameters at the
    optimum.  A fit that does not converge still returns its best point
    with ``converged`` set to false.

    :returns: a :class:`qdbench.model.FitReport`
    """
    problem = _Problem(hist, model0)
    result = solver.least_squares(problem, problem.pack(model0),
                                  max_iterations=max_iterations)
    centers, areas, tau, sigma = problem.unpack(result.x)
    _value, natural = problem.natural_jacobian(centers, areas, tau, sigma)
    cov = solver.covariance(natural * problem.weights[:, None])
    errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    n = problem.n
    area_err = errors[:n]
    pos = n
    center_err = np.zeros(n)
    if problem.fit_centers:
        center_err = errors[pos:pos + n]
        pos += n
    tau_err = 0.0
    if problem.fit_tau:
        tau_err = float(errors[pos])
        pos += 1
    sigma_err = float(errors[pos]) if problem.fit_sigma else 0.0

    fitted = tuple(
        model.PeakParams(center=float(centers[k]), area=float(areas[k]),
                         decay_time=tau, sigma=sigma,
                         center_err=float(center_err[k]),
                         area_err=float(area_err[k]),
                         decay_time_err=tau_err, sigma_err=sigma_err)
        for k in range(n))
    assumptions = [SIGMA_ASSUMPTION]
    if model0.fix_decay_time:
        assumptions.append('decay time fixed at %.6g ps' % tau)
    if model0.fix_sigma:
        assumptions.append('Gaussian sigma fixed at %.6g ps' % sigma)
    report = model.FitReport(
        peaks=fitted, chi_square=result.chi_square,
        dof=max(len(problem.t) - problem.n_free, 0),
        iteration_count=result.iterations, converged=result.converged,
        area_covariance=tuple(tuple(float(v) for v in row)
                              for row in cov[:n, :n]),
        assumptions=tuple(assumptions))
    if result.converged:
        LOG.info('Fitted %d peak(s): chi2=%.6g (dof %d) after %d '
                 'iteration(s)', n, report.chi_square, report.dof,
                 report.iteration_count)
    else:
        LOG.warning('Peak fit did not converge (%s): chi2=%.6g after %d '
                    'iteration(s)', result.message, report.chi_square,
                    report.iteration_count)
    return report


def fitted_curve(hist, report):
    """Expected counts per bin of a fitted report, for plotting."""
    if not report.peaks:
        return np.zeros(len(hist))
    first = report.peaks[0]
    fitted = PeakModel(tuple(report.centers), tuple(report.areas),
                       first.decay_time, first.sigma)
    return fitted.expected_counts(hist)
