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
Port-Hamiltonian structure of a dynamic iteration.

One sweep of a dynamic iteration is itself a PH-DAE in the extended state
:math:`(x, \hat u, \hat y)`:

.. math::

    E^{tot} = \begin{pmatrix} E & 0 & 0\\ 0&0&0\\ 0&0&0\end{pmatrix},\quad
    J^{tot} = \begin{pmatrix} J & \hat B & 0\\ -\hat B^T & 0 & I\\ 0 & -I & -\hat C_2\end{pmatrix},

with the Jacobi scheme moving :math:`\hat C` entirely into the port matrix
(:math:`\hat C_2 = 0`, input :math:`\hat y^{(l)}`), and the Gauss-Seidel
scheme keeping it in the structure matrix (input :math:`\Delta\hat y`).

The extra power exchanged at the coupling ports is the splitting defect

.. math:: D^{(l+1)} = -\int (\Delta z^{(l+1)})^T \hat B\hat C\hat B^T z^{(l)}\,dt,

which vanishes at the fixed point of the iteration.
"""
import numpy as np
import scipy.linalg

from phcircuit.coupling import check_interconnection


class IterationPhDae:
    r"""The PH-DAE of one sweep of a dynamic iteration.

    Args:
        scheme (str): ``"jacobi"`` or ``"gauss-seidel"``
        E (array): :math:`E^{tot}`
        J (array): :math:`J^{tot}`
        B (array): :math:`B^{tot}`
        J_hat (array): structure matrix of the condensed form
        condensed_input (array): coefficient of the coupling input of the condensed form
        schur (array): the Schur complement :math:`\hat B\hat C\hat B^T`
        C_prev (array): the part :math:`\hat C_1` of :math:`\hat C` fed by the previous sweep
    """

    # pylint: disable=too-many-arguments

    def __init__(self, scheme, E, J, B, J_hat, condensed_input, schur, C_prev):
        self.scheme = scheme
        self.E = E
        self.J = J
        self.B = B
        self.J_hat = J_hat
        self.condensed_input = condensed_input
        self.schur = schur
        self.C_prev = C_prev

    def __repr__(self):
        return "<IterationPhDae {}: n={}>".format(self.scheme, self.E.shape[1])

    @property
    def dims(self):
        """tuple[int]: state, input and equation dimensions"""
        return self.E.shape[1], self.B.shape[1], self.E.shape[0]

    @property
    def skew_error(self):
        """float: :math:`\\max|J^{tot} + (J^{tot})^T|`"""
        return float(np.max(np.abs(self.J + self.J.T), initial=0.0))


def previous_sweep_part(partitioned):
    r"""The part :math:`\hat C_1` of :math:`\hat C` acting on previous-sweep outputs.

    In a Gauss-Seidel sweep, the subsystems :math:`i < k` run first and see
    :math:`\lambda^{(l)}`; their rows of :math:`\hat C` form :math:`\hat C_1`.
    """
    C1 = partitioned.C_hat.copy()
    n_lam = partitioned.n_lambda
    if n_lam:
        C1[(partitioned.k - 1) * n_lam :] = 0
    return C1


def assemble_iteration_phdae(partitioned, scheme):
    """Assemble the PH-DAE of one sweep.

    Args:
        partitioned (PartitionedSystem): the split circuit
        scheme (str): ``"jacobi"`` or ``"gauss-seidel"``

    Returns:
        IterationPhDae: the extended and the condensed forms

    Raises:
        DynamicIterationError: if :math:`\\hat B\\hat C\\hat B^T` is not skew-symmetric
    """
    # pylint: disable=import-outside-toplevel,cyclic-import,too-many-locals
    from .base import GAUSS_SEIDEL, DynamicIterationError

    phdaes = partitioned.phdaes
    E = scipy.linalg.block_diag(*[p.E for p in phdaes])
    J = scipy.linalg.block_diag(*[p.J for p in phdaes])
    B_bar = scipy.linalg.block_diag(*[p.B_bar for p in phdaes])
    B_hat = partitioned.B_hat
    C_hat = partitioned.C_hat

    if not check_interconnection(B_hat, C_hat):
        raise DynamicIterationError("The coupling Schur complement is not skew-symmetric.")

    n, m, p = E.shape[0], B_bar.shape[1], C_hat.shape[0]
    B_hat = B_hat.reshape(n, p)
    schur = B_hat @ C_hat @ B_hat.T
    C_prev = previous_sweep_part(partitioned)
    gauss_seidel = scheme == GAUSS_SEIDEL

    E_tot = np.zeros((n + 2 * p, n + 2 * p))
    E_tot[:n, :n] = E

    J_tot = np.zeros_like(E_tot)
    J_tot[:n, :n] = J
    J_tot[:n, n : n + p] = B_hat
    J_tot[n : n + p, :n] = -B_hat.T
    J_tot[n : n + p, n + p :] = np.eye(p)
    J_tot[n + p :, n : n + p] = -np.eye(p)

    B_tot = np.zeros((n + 2 * p, m + p))
    B_tot[:n, :m] = B_bar

    if gauss_seidel:
        J_tot[n + p :, n + p :] = -C_hat
        B_tot[n + p :, m:] = C_prev
        J_hat = J - schur
        condensed_input = B_hat @ C_prev
    else:
        B_tot[n + p :, m:] = -C_hat
        J_hat = J
        condensed_input = -B_hat @ C_hat

    return IterationPhDae(
        scheme, E_tot, J_tot, B_tot, J_hat, condensed_input, schur, C_prev
    )


def _trapezoid(times, samples):
    return 0.5 * np.diff(times) * (samples[1:] + samples[:-1])


def splitting_defect(partitioned, old, new, scheme="jacobi", per_interval=False):
    r"""The splitting defect of one sweep.

    For the Jacobi scheme this is :math:`-\int(\Delta z^{(l+1)})^T\hat B\hat C\hat B^T z^{(l)}\,dt`;
    for the Gauss-Seidel scheme it is
    :math:`-\int(\Delta\lambda)^T A_{\lambda,k}^T e_k^{(l+1)}\,dt`.
    In both cases it equals the power exchanged at the coupling ports in the
    new sweep.

    Args:
        partitioned (PartitionedSystem): the split circuit
        old (list[Waveform]): subsystem waveforms of sweep :math:`l`
        new (list[Waveform]): subsystem waveforms of sweep :math:`l+1`
        scheme (str): ``"jacobi"`` or ``"gauss-seidel"``
        per_interval (bool): return the defect per grid interval

    Returns:
        float or array: the defect over the window, or per interval
    """
    times = new[0].times
    n_lam = partitioned.n_lambda

    if n_lam == 0:
        p = np.zeros(len(times))
    elif scheme == "jacobi":
        z_old = np.hstack([w.efforts for w in old])
        dz = np.hstack([w.efforts for w in new]) - z_old
        B_hat = partitioned.B_hat
        schur = B_hat @ partitioned.C_hat @ B_hat.T
        p = -np.sum((dz @ schur) * z_old, axis=1)
    else:
        last = partitioned.subsystems[-1]
        d_lam = new[-1].outputs[:, :n_lam] - old[-1].outputs[:, :n_lam]
        e_k = new[-1].efforts[:, : len(last.circuit.vertices)]
        p = -np.sum(d_lam * (e_k @ last.A_lambda), axis=1)

    defect = _trapezoid(times, p)
    return defect if per_interval else float(np.sum(defect))
