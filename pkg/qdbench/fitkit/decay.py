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

import dataclasses
import logging
import typing

import numpy as np
from scipy import special

from qdbench._i18n import _
from qdbench import exceptions
from qdbench.fitkit import peaks
from qdbench.fitkit import solver
from qdbench import model

LOG = logging.getLogger(__name__)

SINGLE_EXP = 'single_exp'
BI_EXP = 'bi_exp'
DECAY_MODELS = (SINGLE_EXP, BI_EXP)

SLOW_NOT_SIGNIFICANT = 'slow component not significant'

# Starting guesses of the slow component.
SLOW_SEED_FACTOR = 5.0
SLOW_SEED_FRACTION = 0.1


@dataclasses.dataclass(frozen=True)
class DecayFit:
    lifetime: model.Measurement
    chi_square: float
    dof: int
    iteration_count: int
    converged: bool
    onset: model.Measurement
    area: model.Measurement
    slow_lifetime: typing.Optional[model.Measurement] = None
    slow_fraction: typing.Optional[model.Measurement] = None
    flags: tuple = ()

    def to_dict(self):
        return dataclasses.asdict(self)


class _DecayProblem:
    """Solver vector: t0, log A, log tau1 [, log tau2, logit f]."""

    def __init__(self, t, counts, bin_width, irf_sigma, bi_exp):
        self.t = t
        self.counts = counts
        self.bin_width = bin_width
        self.sigma = irf_sigma
        self.bi_exp = bi_exp
        self.weights = 1.0 / np.sqrt(np.maximum(counts, 1.0))

    def unpack(self, x):
        t0, area, tau1 = x[0], np.exp(x[1]), np.exp(x[2])
        if not self.bi_exp:
            return t0, area, tau1, None, 0.0
        return t0, area, tau1, np.exp(x[3]), special.expit(x[4])

    def natural(self, t0, area, tau1, tau2, frac):
        """Expected counts and d/d(t0, A, tau1[, tau2, f])."""
        fast = peaks.decay_kernel_jacobian(self.t, t0, 1.0, tau1, self.sigma)
        if not self.bi_exp:
            value = area * fast[:, 1]
            columns = [area * fast[:, 0], fast[:, 1], area * fast[:, 2]]
        else:
            slow = peaks.decay_kernel_jacobian(self.t, t0, 1.0, tau2,
                                               self.sigma)
            mixed = (1.0 - frac) * fast + frac * slow
            value = area * mixed[:, 1]
            columns = [area * mixed[:, 0], mixed[:, 1],
                       area * (1.0 - frac) * fast[:, 2],
                       area * frac * slow[:, 2],
                       area * (slow[:, 1] - fast[:, 1])]
        return (value * self.bin_width,
                np.stack(columns, axis=-1) * self.bin_width)

    def chain(self, t0, area, tau1, tau2, frac):
        factors = [1.0, area, tau1]
        if self.bi_exp:
            factors.extend([tau2, frac * (1.0 - frac)])
        return np.array(factors)

    def __call__(self, x):
        params = self.unpack(x)
        expected, jac = self.natural(*params)
        residuals = (expected - self.counts) * self.weights
        jac = jac * self.chain(*params)[None, :] * self.weights[:, None]
        return residuals, jac


def _seed(t, counts):
    total = float(counts.sum())
    after = t > 0
    weight = counts[after]
    if weight.sum() > 0:
        tau = float((t[after] * weight).sum() / weight.sum())
    else:
        tau = float(t[-1]) / 4.0
    return max(total, 1.0), max(tau, 1.0)


def fit_decay(decay_hist, decay_model=SINGLE_EXP, irf_sigma=50.0,
              fit_range=None, max_iterations=solver.MAX_ITERATIONS):
    """Fit an exponential decay convolved with a Gaussian IRF.

    ``decay_model`` is ``single_exp`` or ``bi_exp``; the bi-exponential
    returns the slow lifetime and the slow fraction as well and flags a
    slow fraction that is not significant instead of failing.

    :returns: a :class:`DecayFit`
    """
    if decay_model not in DECAY_MODELS:
        raise exceptions.InvalidParameter(
            _('Unknown decay model %s') % decay_model)
    if irf_sigma <= 0:
        raise exceptions.InvalidParameter(
            _('irf_sigma must be positive, got %s') % irf_sigma)
    t = decay_hist.bin_centers
    counts = decay_hist.counts.astype(float)
    if fit_range is not None:
        mask = (t >= fit_range[0]) & (t <= fit_range[1])
        t, counts = t[mask], counts[mask]
    if not counts.sum():
        raise exceptions.InvalidParameter(
            _('Cannot fit a decay to an empty histogram'))

    bi_exp = decay_model == BI_EXP
    problem = _DecayProblem(t, counts, decay_hist.bin_width, irf_sigma,
                            bi_exp)
    area, tau = _seed(t, counts)
    x0 = [0.0, np.log(area), np.log(tau)]
    if bi_exp:
        x0.extend([np.log(SLOW_SEED_FACTOR * tau),
                   special.logit(SLOW_SEED_FRACTION)])
    result = solver.least_squares(problem, x0, max_iterations=max_iterations)
    params = problem.unpack(result.x)
    _value, natural = problem.natural(*params)
    cov = solver.covariance(natural * problem.weights[:, None])
    errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    t0, area, tau1, tau2, frac = params
    flags = []
    slow_lifetime = slow_fraction = None
    if bi_exp:
        slow_lifetime = model.Measurement(float(tau2), float(errors[3]))
        slow_fraction = model.Measurement(float(frac), float(errors[4]))
        if frac < 2.0 * errors[4] or frac < 1e-6:
            flags.append(SLOW_NOT_SIGNIFICANT)
            LOG.warning('Slow decay fraction %.3g +- %.3g is consistent '
                        'with zero', frac, errors[4])
    fit = DecayFit(
        lifetime=model.Measurement(float(tau1), float(errors[2])),
        chi_square=result.chi_square,
        dof=max(len(t) - len(x0), 0),
        iteration_count=result.iterations,
        converged=result.converged,
        onset=model.Measurement(float(t0), float(errors[0])),
        area=model.Measurement(float(area), float(errors[1])),
        slow_lifetime=slow_lifetime, slow_fraction=slow_fraction,
        flags=tuple(flags))
    if not result.converged:
        LOG.warning('Decay fit did not converge (%s)', result.message)
    LOG.info('Decay fit (%s): T1=%.4g +- %.2g ps', decay_model,
             fit.lifetime.value, fit.lifetime.error)
    return fit


def fitted_curve(decay_hist, fit, irf_sigma):
    """Expected counts per bin of a decay fit, for plotting."""
    t = decay_hist.bin_centers
    fast = peaks.decay_kernel(t, fit.onset.value, 1.0, fit.lifetime.value,
                              irf_sigma)
    if fit.slow_fraction is None:
        shape = fast
    else:
        frac = fit.slow_fraction.value
        slow = peaks.decay_kernel(t, fit.onset.value, 1.0,
                                  fit.slow_lifetime.value, irf_sigma)
        shape = (1.0 - frac) * fast + frac * slow
    return fit.area.value * shape * decay_hist.bin_width
