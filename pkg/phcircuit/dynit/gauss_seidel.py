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
r"""Gauss-Seidel-type dynamic iteration.

The subsystems :math:`i < k` run concurrently from the coupling currents
:math:`\lambda^{(l)}` of the previous sweep; the last subsystem then
consumes the current sweep's outputs,

.. math:: \hat u_k^{(l+1)} = \sum_{i<k} \hat y_i^{(l+1)}.
"""
from .base import GAUSS_SEIDEL, JacobiIteration


class GaussSeidelIteration(JacobiIteration):
    r"""Gauss-Seidel-type dynamic iteration of a partitioned circuit.

    Args:
        partitioned (PartitionedSystem): the split circuit
        config (WindowConfig): the iteration options
        integrator (Integrator): the integrator of the subsystems; trapezoidal if not given
        order (list[int]): submission order of the subsystem integrations :math:`i < k`
    """

    scheme = GAUSS_SEIDEL

    def sweep(self, waveforms, grid, x0s, sweep=None):
        """Perform one sweep on a window.

        Args:
            waveforms (list[Waveform]): the subsystem waveforms of the previous sweep
            grid (TimeGrid): the window grid
            x0s (list[array]): the initial subsystem states of the window
            sweep (int): the sweep index

        Returns:
            list[Waveform]: the subsystem waveforms of the new sweep
        """
        k = self.partitioned.k
        if k == 1:
            return super().sweep(waveforms, grid, x0s, sweep)

        previous = self.coupling_outputs(waveforms)

        def task(i):
            return self.solve(i, grid, self.coupling_inputs(i, previous), x0s[i], sweep)

        first = self._run_parallel(list(range(k - 1)), task)

        current = self.coupling_outputs(first) + [previous[-1]]
        last = self.solve(k - 1, grid, self.coupling_inputs(k - 1, current), x0s[-1], sweep)
        return first + [last]


def gauss_seidel_sweep(partitioned, waveforms, grid, config, integrator=None, x0s=None):
    """One Gauss-Seidel sweep on a window.

    Args:
        partitioned (PartitionedSystem): the split circuit
        waveforms (list[Waveform]): the subsystem waveforms of the previous sweep
        grid (TimeGrid): the window grid
        config (WindowConfig): the iteration options
        integrator (Integrator): the subsystem integrator
        x0s (list[array]): initial states; the first samples of ``waveforms`` if not given

    Returns:
        list[Waveform]: the new subsystem waveforms
    """
    x0s = x0s or [w.states[0] for w in waveforms]
    return GaussSeidelIteration(partitioned, config, integrator).sweep(waveforms, grid, x0s)
