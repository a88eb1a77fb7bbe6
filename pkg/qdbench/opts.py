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

import copy
import itertools

from qdbench import config

__all__ = [
    'list_opts',
    'list_opts_device',
    'list_opts_cavity',
    'list_opts_bench',
    'list_opts_run',
]


def list_opts():
    """Return a list of oslo.config options of a qdbench run file.

    Each element of the list is a tuple. The first element is the name of the
    group under which the list of elements in the second element will be
    registered.

    This function is also discoverable via the 'qdbench' entry point
    under the 'oslo.config.opts' namespace.

    The purpose of this is to allow tools like the Oslo sample config file
    generator to render a commented run configuration.

    :returns: a list of (group_name, opts) tuples
    """
    return list(
        itertools.chain(
            list_opts_device(),
            list_opts_cavity(),
            list_opts_bench(),
            list_opts_run(),
        )
    )


def list_opts_device():
    """Options of the emitter device, the ``[device]`` section."""
    return [(config.DEVICE_GROUP, copy.deepcopy(config.DEVICE_OPTS))]


def list_opts_cavity():
    return [(config.CAVITY_GROUP, copy.deepcopy(config.CAVITY_OPTS))]


def list_opts_bench():
    """Options of the optical bench, the ``[bench]`` section."""
    return [(config.BENCH_GROUP, copy.deepcopy(config.BENCH_OPTS))]


def list_opts_run():
    return [(config.RUN_GROUP, copy.deepcopy(config.RUN_OPTS))]
