#
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

from qdbench._i18n import _


class QdbenchError(Exception):
    """Base class for every error raised by qdbench."""


class ConfigInvalid(QdbenchError):
    def __init__(self, error_msg, diagnostics=None):
        self.error_msg = error_msg
        self.diagnostics = list(diagnostics or [])
        super().__init__(
            _('Invalid configuration. %(error_msg)s') %
            {'error_msg': error_msg})


class InvalidParameter(QdbenchError, ValueError):
    """A parameter handed to an operation violates its precondition."""


class ExtractionError(QdbenchError):
    """A ratio observable cannot be formed (zero denominator)."""


class FitNotConverged(QdbenchError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            _('Fit did not converge after %(iterations)d iterations '
              '(chi_square=%(chi_square).6g).') %
            {'iterations': report.iteration_count,
             'chi_square': report.chi_square})


class DataFileError(QdbenchError):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(
            _("Problem reading '%(path)s': %(reason)s") %
            {'path': path, 'reason': reason})
