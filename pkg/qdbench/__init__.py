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

"""Monte-Carlo bench and analysis toolkit for pulsed single-photon sources."""

__all__ = ['RunConfig',
           'load_config',
           'analyze',
           'run_pipeline',
           'simulate']

from qdbench.config import load_config
from qdbench.config import RunConfig
from qdbench.pipeline import analyze
from qdbench.pipeline import run_pipeline
from qdbench.pipeline import simulate
