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
The :code:`euler` plugin integrates a PH-DAE with the implicit Euler method

.. math:: E\frac{x_{n+1}-x_n}{h} = Jz(x_{n+1}) - r(z(x_{n+1})) + Bu(t_{n+1}).

The method is of order one and dissipates energy numerically: on a
source-free lossless circuit the Hamiltonian decays from step to step.
"""
import numpy as np

from phcircuit._integrator import Integrator, theta_step


class ImplicitEuler(Integrator):
    """Implicit Euler integrator for PHCircuit.

    Keyword Args:
        abs_tol (float): absolute Newton tolerance
        rel_tol (float): relative Newton tolerance
        max_iter (int): maximal number of Newton iterations per step
        min_damping (float): smallest damping factor of the line search
    """

    name = "Implicit Euler PHCircuit integrator"
    short_name = "euler"
    phcircuit_requires = "0.1"
    version = "0.1.0"
    author = "Xanadu Inc."

    theta = 1.0


def step_implicit_euler(phdae, x_n, t_n, t_next, u=None, config=None):
    """Advance ``x_n`` by one implicit Euler step.

    Args:
        phdae (PhDae): the system
        x_n (array): the state at ``t_n``
        t_n (float): the current time
        t_next (float): the next time
        u (callable): the input signal ``t -> u``; the default input of ``phdae`` if not given
        config (NewtonConfig): Newton options

    Returns:
        array: the state at ``t_next``
    """
    u = u or phdae.input_vector
    u_next = np.asarray(u(t_next), dtype=float)
    return theta_step(phdae, x_n, t_n, t_next, u_next, u_next, 1.0, config)
