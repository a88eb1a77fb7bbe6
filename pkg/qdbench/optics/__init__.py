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

"""Monte-Carlo optical benches turning photon streams into clicks."""

import stevedore
from stevedore import exception as stevedore_exc

from qdbench._i18n import _
from qdbench import exceptions
from qdbench.optics.counters import brightness_bench
from qdbench.optics.counters import count_rate
from qdbench.optics.counters import decay_bench
from qdbench.optics.hbt import hbt_bench
from qdbench.optics.hom import coincidence_probability
from qdbench.optics.hom import hom_bench

NAMESPACE = 'qdbench.benches'

__all__ = ['NAMESPACE', 'brightness_bench', 'coincidence_probability',
           'count_rate', 'decay_bench', 'hbt_bench', 'hom_bench',
           'load_bench', 'available_benches']


def available_benches():
    return sorted(stevedore.ExtensionManager(NAMESPACE).names())


def load_bench(mode, device, cavity, bench):
    """Instantiate the bench plugin registered under ``mode``."""
    try:
        manager = stevedore.DriverManager(
            NAMESPACE, mode, invoke_on_load=True,
            invoke_args=(device, cavity, bench))
    except stevedore_exc.NoMatches:
        raise exceptions.ConfigInvalid(
            _("Unknown bench mode '%(mode)s'; expected one of %(known)s") %
            {'mode': mode, 'known': ', '.join(available_benches())})
    return manager.driver
