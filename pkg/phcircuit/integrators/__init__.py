# Copyright 2018-2019 Xanadu Quantum Technologies Inc.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
This subpackage provides the reference integrator plugins. They are loaded
with :func:`phcircuit.integrator` by their short names ``"euler"`` and
``"trapezoidal"``.

.. currentmodule:: phcircuit.integrators
.. autosummary::
    :toctree: api

    implicit_euler
    trapezoidal
"""
from .implicit_euler import ImplicitEuler, step_implicit_euler
from .trapezoidal import Trapezoidal, step_trapezoidal
