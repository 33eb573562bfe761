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
r"""
This subpackage contains the windowed dynamic iteration of partitioned
circuits: Jacobi- and Gauss-Seidel-type sweeps, the iteration trace, and the
port-Hamiltonian structure of a sweep with its splitting defect.
"""
from .base import (
    GAUSS_SEIDEL,
    JACOBI,
    SCHEMES,
    ConvergenceWarning,
    DynamicIterationError,
    IterationTrace,
    JacobiIteration,
    NonConvergedWindow,
    SweepRecord,
    WindowConfig,
    extrapolate,
    initial_states,
    jacobi_sweep,
    merge_waveforms,
    run_dynamic_iteration,
)
from .gauss_seidel import GaussSeidelIteration, gauss_seidel_sweep
from .structure import IterationPhDae, assemble_iteration_phdae, splitting_defect


__all__ = [
    "ConvergenceWarning",
    "DynamicIterationError",
    "GaussSeidelIteration",
    "IterationPhDae",
    "IterationTrace",
    "JacobiIteration",
    "NonConvergedWindow",
    "WindowConfig",
    "assemble_iteration_phdae",
    "extrapolate",
    "gauss_seidel_sweep",
    "jacobi_sweep",
    "run_dynamic_iteration",
    "splitting_defect",
]
