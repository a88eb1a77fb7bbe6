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

from qdbench.fitkit.calculators import device_efficiency
from qdbench.fitkit.calculators import purcell_from_lifetimes
from qdbench.fitkit.calculators import purcell_theoretical_max
from qdbench.fitkit.decay import fit_decay
from qdbench.fitkit.extract import correct_visibility
from qdbench.fitkit.extract import extract_g2
from qdbench.fitkit.extract import extract_visibility
from qdbench.fitkit.peaks import emg_peak
from qdbench.fitkit.peaks import emg_peak_jacobian
from qdbench.fitkit.train import fit_peak_train
from qdbench.fitkit.train import PeakModel

__all__ = ['PeakModel', 'correct_visibility', 'device_efficiency',
           'emg_peak', 'emg_peak_jacobian', 'extract_g2',
           'extract_visibility', 'fit_decay', 'fit_peak_train',
           'purcell_from_lifetimes', 'purcell_theoretical_max']
