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

import abc

from qdbench import dynamics


class BenchBaseExtension(metaclass=abc.ABCMeta):
    """Optical bench loaded from the ``qdbench.benches`` namespace."""

    #: Whether the laser emits an early/late pulse pair every period.
    pair_mode = False

    def __init__(self, device, cavity, bench):
        self.device = device
        self.cavity = cavity
        self.bench = bench

    @abc.abstractmethod
    def propagate(self, photons, rng_seed, n_periods, threads=1):
        """method called to turn emitted photons into clicks

        return: ClickStream object
        """

    def pulse_area(self, run):
        return run.pulse_area

    def pulse_train(self, run):
        return dynamics.PulseTrain(self.pulse_area(run), run.n_periods,
                                   self.pair_mode)

    def simulate(self, run, threads=1):
        """Emit photons for ``run`` and propagate them through the bench."""
        photons = dynamics.emit(self.device, self.bench,
                                self.pulse_train(run), run.rng_seed,
                                cavity=self.cavity, threads=threads)
        return self.propagate(photons, run.rng_seed, run.n_periods,
                              threads=threads)
