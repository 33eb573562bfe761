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
The :code:`trapezoidal` plugin integrates a PH-DAE with the trapezoidal
rule applied to the differential part of the equations,

.. math::

    E\frac{x_{n+1}-x_n}{h} = \tfrac12 P_1\left(F(x_{n+1}, t_{n+1}) + F(x_n, t_n)\right)
        + P_2 F(x_{n+1}, t_{n+1}),

where :math:`P_1` projects onto :math:`\operatorname{im}E` and
:math:`P_2 = I - P_1`. The algebraic equations are imposed at the new time
point only. The method is of order two and conserves the Hamiltonian of
linear lossless source-free circuits.
"""
import numpy as np

from phcircuit._integrator import Integrator, theta_step


class Trapezoidal(Integrator):
    """Trapezoidal integrator for PHCircuit.

    Keyword Args:
        abs_tol (float): absolute Newton tolerance
        rel_tol (float): relative Newton tolerance
        max_iter (int): maximal number of Newton iterations per step
        min_damping (float): smallest damping factor of the line search
    """

    name = "Trapezoidal PHCircuit integrator"
    short_name = "trapezoidal"
    phcircuit_requires = "0.1"
    version = "0.1.0"
    author = "Xanadu Inc."

    theta = 0.5


def step_trapezoidal(phdae, x_n, t_n, t_next, u=None, config=None):
    """Advance ``x_n`` by one trapezoidal step.

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
    return theta_step(
        phdae,
        x_n,
        t_n,
        t_next,
        np.asarray(u(t_n), dtype=float),
        np.asarray(u(t_next), dtype=float),
        0.5,
        config,
    )
