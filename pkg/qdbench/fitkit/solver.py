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

"""Damped Gauss-Newton (Levenberg-Marquardt) least squares.

Each iteration solves ``(J^T J + lambda * diag(J^T J)) step = -J^T r``.
A step that lowers chi^2 is taken and the damping shrinks towards
Gauss-Newton; a step that does not, or a singular system, raises the
damping towards scaled gradient descent.
"""

import dataclasses
import logging

import numpy as np

LOG = logging.getLogger(__name__)

MAX_ITERATIONS = 200
RELATIVE_TOLERANCE = 1e-9
ABSOLUTE_TOLERANCE = 1e-12
GRADIENT_TOLERANCE = 1e-6
INITIAL_DAMPING = 1e-3
DAMPING_FACTOR = 10.0
MIN_DAMPING = 1e-12
MAX_DAMPING = 1e16
TINY = 1e-300


@dataclasses.dataclass(frozen=True)
class SolverResult:
    x: np.ndarray
    chi_square: float
    iterations: int
    converged: bool
    gradient: np.ndarray
    initial_gradient: np.ndarray
    message: str = ''


def _chi_square(residuals):
    return float(residuals @ residuals)


def least_squares(residual_jacobian, x0, max_iterations=MAX_ITERATIONS,
                  rtol=RELATIVE_TOLERANCE, damping=INITIAL_DAMPING,
                  atol=ABSOLUTE_TOLERANCE, gtol=GRADIENT_TOLERANCE):
    """Minimize ``sum(r(x)**2)``.

    An accepted step ends the iteration when chi^2 falls below ``atol``,
    changes by less than ``rtol`` relative, or the gradient norm drops
    below ``gtol`` times its norm at ``x0``.

    :param residual_jacobian: callable returning ``(r, J)`` at ``x`` with
        ``J[i, k] = d r[i] / d x[k]``
    :returns: a :class:`SolverResult` carrying the best point found, even
        when the iteration limit is reached
    """
    x = np.array(x0, dtype=float)
    residuals, jacobian = residual_jacobian(x)
    chi2 = _chi_square(residuals)
    gradient = 2.0 * jacobian.T @ residuals
    initial_gradient = gradient
    if not np.isfinite(chi2):
        return SolverResult(x, chi2, 0, False, gradient, initial_gradient,
                            'non-finite chi-square at the initial guess')

    iteration = 0
    while iteration < max_iterations:
        iteration += 1
        normal = jacobian.T @ jacobian
        scale = np.maximum(np.diag(normal), TINY)
        rhs = -jacobian.T @ residuals
        try:
            step = np.linalg.solve(normal + damping * np.diag(scale), rhs)
        except np.linalg.LinAlgError:
            step = None
        if step is None or not np.all(np.isfinite(step)):
            damping *= DAMPING_FACTOR
            LOG.debug('Singular normal matrix, damping raised to %g',
                      damping)
            if damping > MAX_DAMPING:
                return SolverResult(x, chi2, iteration, False, gradient,
                                    initial_gradient, 'singular system')
            continue

        trial = x + step
        with np.errstate(over='ignore', invalid='ignore'):
            new_residuals, new_jacobian = residual_jacobian(trial)
            new_chi2 = _chi_square(new_residuals)
        if np.isfinite(new_chi2) and new_chi2 <= chi2:
            change = (chi2 - new_chi2) / max(chi2, TINY)
            used_damping = damping
            x, residuals, jacobian, chi2 = (trial, new_residuals,
                                            new_jacobian, new_chi2)
            gradient = 2.0 * jacobian.T @ residuals
            damping = max(damping / DAMPING_FACTOR, MIN_DAMPING)
            LOG.debug('Iteration %d: chi2=%.10g damping=%g',
                      iteration, chi2, damping)
            if chi2 <= atol or (change < rtol and used_damping <= 1.0):
                return SolverResult(x, chi2, iteration, True, gradient,
                                    initial_gradient, 'chi-square converged')
            if (np.linalg.norm(gradient) <=
                    gtol * np.linalg.norm(initial_gradient)):
                return SolverResult(x, chi2, iteration, True, gradient,
                                    initial_gradient, 'gradient converged')
            if np.all(np.abs(step) <= rtol * (np.abs(x) + rtol)):
                return SolverResult(x, chi2, iteration, True, gradient,
                                    initial_gradient, 'step converged')
        else:
            damping *= DAMPING_FACTOR
            if damping > MAX_DAMPING:
                # No descent direction left at machine precision.
                return SolverResult(x, chi2, iteration, True, gradient,
                                    initial_gradient, 'damping saturated')
    return SolverResult(x, chi2, iteration, False, gradient,
                        initial_gradient, 'iteration limit reached')


def covariance(jacobian):
    """Parameter covariance ``(J^T J)^-1``, pseudo-inverse when singular."""
    normal = jacobian.T @ jacobian
    try:
        cov = np.linalg.inv(normal)
        if not np.all(np.isfinite(cov)):
            raise np.linalg.LinAlgError('non-finite inverse')
    except np.linalg.LinAlgError:
        LOG.debug('Singular covariance, using the pseudo-inverse')
        cov = np.linalg.pinv(normal)
    return cov
