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
This module contains the :class:`PhDae` class and the assembly of circuit
equations as port-Hamiltonian differential-algebraic equations

.. math::

    \frac{d}{dt} E x = J z(x) - r(z(x)) + B u, \qquad y = B^T z(x),

with :math:`J` skew-symmetric, :math:`r` accretive on a subspace
:math:`\mathcal{V}` (:math:`v^T r(v) \geq 0` for :math:`v\in\mathcal{V}`)
and a Hamiltonian :math:`H` with :math:`\nabla H(x) = E^T z(x)` whenever
:math:`z(x)\in\mathcal{V}`.

Two circuit formulations are available:

* :func:`assemble_model1`: charge/flux oriented MNA with state
  :math:`x = (q_C, \phi_L, e, j_V)` and effort
  :math:`z = (e, \phi^{-1}(\phi_L), q^{-1}(q_C), j_V)`,
* :func:`assemble_model2`: MNA with explicit capacitance currents, state
  :math:`x = (e, j_C, q_C, \phi_L, j_V)` and
  :math:`\mathcal{V} = \mathbb{R}^n`.
"""
from collections import namedtuple

import numpy as np
import scipy.linalg

from .circuit_graph import blocks_source_vector
from .topology import MODEL1, MODEL2, classify_index


class PhDae:
    r"""A port-Hamiltonian DAE with scalar constitutive laws.

    The effort map is a signed-free coordinate map: effort coordinate
    :math:`i` is the state coordinate ``effort_index[i]``, passed through the
    inverse of ``effort_laws[i]`` if that law is not ``None``. The dissipation
    is

    .. math:: r(z) = K_r z + N_R\, g(N_R^T z),

    with :math:`g` the diagonal map of the resistor laws. Equations and
    efforts share one ordering, so that :math:`J` is a square skew matrix.

    Args:
        E (array): the ``n x n`` matrix :math:`E`
        J (array): the ``n x n`` skew-symmetric structure matrix
        B (array): the ``n x m`` port matrix, coupling ports first
        effort_index (array[int]): state coordinate of every effort coordinate
        effort_laws (list[ConstitutiveLaw or None]): laws inverted by the effort map
        K_r (array): linear part of the dissipation
        N_R (array): ``n x n_R`` embedding of the resistance incidence
        resistor_laws (list[ResistorLaw]): the resistor laws
        K_V (array): constraint matrix, :math:`\mathcal{V} = \{z \mid K_V z = 0\}`
        energy_terms (list[tuple[int, ConstitutiveLaw]]): storage laws per state coordinate
        labels (dict[str, list[str]]): labels of the ``"state"``, ``"effort"``,
            ``"equation"``, ``"input"`` and ``"output"`` coordinates

    Keyword Args:
        inputs (callable): default input signal ``t -> u``; zero if not given
        coupling_ports (int): number of leading columns of ``B`` that are coupling ports
        index_report (IndexReport): index classification of the system
        name (str): a short description
    """

    # pylint: disable=too-many-instance-attributes,too-many-arguments

    def __init__(
        self,
        E,
        J,
        B,
        effort_index,
        effort_laws,
        K_r,
        N_R,
        resistor_laws,
        K_V,
        energy_terms,
        labels,
        inputs=None,
        coupling_ports=0,
        index_report=None,
        name="",
    ):
        self.E = np.asarray(E, dtype=float)
        self.J = np.asarray(J, dtype=float)
        self.B = np.asarray(B, dtype=float).reshape(self.E.shape[0], -1)
        self.effort_index = np.asarray(effort_index, dtype=int)
        self.effort_laws = list(effort_laws)
        self.K_r = np.asarray(K_r, dtype=float)
        self.N_R = np.asarray(N_R, dtype=float).reshape(self.E.shape[0], -1)
        self.resistor_laws = list(resistor_laws)
        self.K_V = np.asarray(K_V, dtype=float).reshape(-1, self.E.shape[1])
        self.energy_terms = list(energy_terms)
        self.labels = {k: list(v) for k, v in labels.items()}
        self.inputs = inputs
        self.coupling_ports = coupling_ports
        self.index_report = index_report
        self.name = name

        self._nonlinear = [i for i, law in enumerate(self.effort_laws) if law is not None]
        self._projectors = None

    def __repr__(self):
        n, m, k = self.dims
        return "<PhDae {}: n={}, m={}, k={}>".format(self.name, n, m, k)

    @property
    def dims(self):
        """tuple[int]: ``(n, m, k)``, the state, input and equation dimensions"""
        return self.E.shape[1], self.B.shape[1], self.E.shape[0]

    @property
    def B_hat(self):
        """array: the coupling-port columns of :math:`B`"""
        return self.B[:, : self.coupling_ports]

    @property
    def B_bar(self):
        """array: the external-port columns of :math:`B`"""
        return self.B[:, self.coupling_ports :]

    def index_of(self, label, kind="state"):
        """Position of a labelled coordinate."""
        return self.labels[kind].index(label)

    def effort(self, x):
        """Evaluate the effort map :math:`z(x)`."""
        x = np.asarray(x, dtype=float)
        z = x[self.effort_index]
        for i in self._nonlinear:
            z[i] = self.effort_laws[i].invert(z[i])
        return z

    def effort_jacobian(self, x, z=None):
        r"""Jacobian :math:`\partial z/\partial x` of the effort map."""
        if z is None:
            z = self.effort(x)
        n = len(self.effort_index)
        D = np.zeros((n, self.E.shape[1]))
        D[np.arange(n), self.effort_index] = 1.0
        for i in self._nonlinear:
            D[i, self.effort_index[i]] = 1.0 / self.effort_laws[i].jacobian(z[i])
        return D

    def state_from_effort(self, z):
        """Invert the effort map: the state ``x`` with ``z(x) = z``."""
        z = np.asarray(z, dtype=float)
        x = np.zeros(self.E.shape[1])
        for i, p in enumerate(self.effort_index):
            law = self.effort_laws[i]
            x[p] = z[i] if law is None else law.eval(z[i])
        return x

    def dissipation(self, z):
        """Evaluate the dissipation :math:`r(z)`."""
        z = np.asarray(z, dtype=float)
        r = self.K_r @ z
        if self.resistor_laws:
            u_R = self.N_R.T @ z
            r = r + self.N_R @ np.array([law.eval(u) for law, u in zip(self.resistor_laws, u_R)])
        return r

    def dissipation_jacobian(self, z):
        r"""Jacobian :math:`\partial r/\partial z`."""
        jac = self.K_r.copy()
        if self.resistor_laws:
            u_R = self.N_R.T @ z
            G = np.array([law.jacobian(u) for law, u in zip(self.resistor_laws, u_R)])
            jac = jac + (self.N_R * G) @ self.N_R.T
        return jac

    def input_vector(self, t):
        """The default input :math:`u(t)`."""
        if self.inputs is None:
            return np.zeros(self.B.shape[1])
        return np.asarray(self.inputs(t), dtype=float)

    def rhs(self, x, u):
        r"""Right-hand side :math:`J z(x) - r(z(x)) + B u`."""
        z = self.effort(x)
        return self.J @ z - self.dissipation(z) + self.B @ u

    def rhs_jacobian(self, x):
        r"""Jacobian of the right-hand side with respect to the state."""
        z = self.effort(x)
        return (self.J - self.dissipation_jacobian(z)) @ self.effort_jacobian(x, z)

    def residual(self, x, xdot, u):
        r"""The DAE residual :math:`E\dot x - J z(x) + r(z(x)) - B u`."""
        return self.E @ xdot - self.rhs(x, u)

    def outputs(self, x):
        """The outputs :math:`y = B^T z(x)`."""
        return self.B.T @ self.effort(x)

    def hamiltonian(self, x):
        """The Hamiltonian (stored energy) at state ``x``."""
        return float(sum(law.stored_energy(x[p]) for p, law in self.energy_terms))

    def in_subspace(self, z, tol=1e-10):
        r"""Whether ``z`` lies in :math:`\mathcal{V}`, up to :math:`tol(1+\|z\|_\infty)`."""
        z = np.asarray(z, dtype=float)
        if self.K_V.shape[0] == 0:
            return True
        return np.max(np.abs(self.K_V @ z)) <= tol * (1 + np.max(np.abs(z)))

    def _split(self):
        if self._projectors is None:
            Q1 = scipy.linalg.orth(self.E) if np.any(self.E) else np.zeros((self.E.shape[0], 0))
            Q2 = scipy.linalg.null_space(self.E.T)
            self._projectors = (Q1, Q2)
        return self._projectors

    @property
    def range_basis(self):
        r"""array: orthonormal basis of :math:`\operatorname{im} E` (differential equations)"""
        return self._split()[0]

    @property
    def cokernel_basis(self):
        r"""array: orthonormal basis of :math:`\ker E^T` (algebraic equations)"""
        return self._split()[1]

    @property
    def algebraic_states(self):
        """array[int]: state coordinates whose column of :math:`E` vanishes"""
        return np.flatnonzero(~np.any(self.E != 0, axis=0))

    def algebraic_residual(self, x, u):
        """Residual of the algebraic equations, projected onto :math:`\\ker E^T`."""
        return self.cokernel_basis.T @ self.rhs(x, u)

    def reordered(self, rows, states):
        """Return the system with permuted equations/efforts and states.

        Equations and efforts share one ordering and are permuted together.

        Args:
            rows (array[int]): new order of the equation and effort coordinates
            states (array[int]): new order of the state coordinates

        Returns:
            PhDae: the permuted system
        """
        rows = np.asarray(rows, dtype=int)
        states = np.asarray(states, dtype=int)
        new_pos = np.empty_like(states)
        new_pos[states] = np.arange(len(states))

        labels = dict(self.labels)
        labels["state"] = [self.labels["state"][i] for i in states]
        labels["effort"] = [self.labels["effort"][i] for i in rows]
        labels["equation"] = [self.labels["equation"][i] for i in rows]

        return PhDae(
            self.E[rows][:, states],
            self.J[rows][:, rows],
            self.B[rows],
            new_pos[self.effort_index[rows]],
            [self.effort_laws[i] for i in rows],
            self.K_r[rows][:, rows],
            self.N_R[rows],
            self.resistor_laws,
            self.K_V[:, rows],
            [(int(new_pos[p]), law) for p, law in self.energy_terms],
            labels,
            inputs=self.inputs,
            coupling_ports=self.coupling_ports,
            index_report=self.index_report,
            name=self.name,
        )


def _block(n_rows, n_cols):
    return np.zeros((n_rows, n_cols))


def _labels(prefix, names):
    return ["{}[{}]".format(prefix, n) for n in names]


def charge_flux_system(blocks, coupling_input=None, coupling_state=None, coupling_names=(), name=MODEL1):
    r"""Assemble the charge/flux oriented MNA equations of a set of circuit blocks.

    Without coupling this is the system of :func:`assemble_model1`. Coupling
    branches enter in one of two ways:

    * ``coupling_input``: the coupling currents are inputs,
      :math:`\hat B = [A_\lambda; 0; 0; 0]` with input :math:`\hat u = -\lambda`
      and output :math:`\hat y = A_\lambda^T e`;
    * ``coupling_state``: the coupling currents :math:`\lambda` are states,
      :math:`-A_\lambda\lambda` enters the current balance and the coupling
      equation :math:`0 = A_\lambda^T e + \hat u` is appended, with
      :math:`\hat B = [0;0;0;0;I]` and :math:`\hat y = \lambda`.

    Args:
        blocks (CircuitBlocks): incidence matrices, laws and signals
        coupling_input (array[int]): :math:`A_\lambda` of a subsystem receiving coupling currents
        coupling_state (array[int]): :math:`A_\lambda` of the subsystem carrying the coupling currents
        coupling_names (list[str]): names of the coupling branches
        name (str): a short description

    Returns:
        PhDae: the assembled system, without index classification
    """
    # pylint: disable=too-many-locals,too-many-statements
    n_v = len(blocks.vertices)
    A = {k: np.asarray(blocks.incidence[k], dtype=float).reshape(n_v, -1) for k in "CRLVI"}
    n_C, n_R, n_L, n_V, n_I = (A[k].shape[1] for k in "CRLVI")

    A_lam = None
    if coupling_state is not None:
        A_lam = np.asarray(coupling_state, dtype=float).reshape(n_v, -1)
    n_lam = 0 if A_lam is None else A_lam.shape[1]

    n = n_C + n_L + n_v + n_V + n_lam

    # state offsets: (q_C, phi_L, e, j_V, lambda)
    s_q, s_phi, s_e, s_j, s_lam = np.cumsum([0, n_C, n_L, n_v, n_V])
    # equation/effort offsets: (kcl | e, flux | j_L, cap | u_C, vsrc | j_V, coupling | lambda)
    r_e, r_l, r_c, r_v, r_lam = np.cumsum([0, n_v, n_L, n_C, n_V])

    E = _block(n, n)
    E[r_e : r_e + n_v, s_q : s_q + n_C] = A["C"]
    E[r_l : r_l + n_L, s_phi : s_phi + n_L] = np.eye(n_L)

    J = _block(n, n)
    J[r_e : r_e + n_v, r_l : r_l + n_L] = -A["L"]
    J[r_e : r_e + n_v, r_v : r_v + n_V] = -A["V"]
    J[r_l : r_l + n_L, r_e : r_e + n_v] = A["L"].T
    J[r_v : r_v + n_V, r_e : r_e + n_v] = A["V"].T
    if n_lam:
        J[r_e : r_e + n_v, r_lam:] = -A_lam
        J[r_lam:, r_e : r_e + n_v] = A_lam.T

    K_r = _block(n, n)
    K_r[r_c : r_c + n_C, r_e : r_e + n_v] = A["C"].T
    K_r[r_c : r_c + n_C, r_c : r_c + n_C] = -np.eye(n_C)

    N_R = _block(n, n_R)
    N_R[r_e : r_e + n_v] = A["R"]

    K_V = K_r[r_c : r_c + n_C].copy()

    if coupling_input is not None:
        A_in = np.asarray(coupling_input, dtype=float).reshape(n_v, -1)
        B_hat = _block(n, A_in.shape[1])
        B_hat[r_e : r_e + n_v] = A_in
    elif n_lam:
        B_hat = _block(n, n_lam)
        B_hat[r_lam:] = np.eye(n_lam)
    else:
        B_hat = _block(n, 0)

    B_bar = _block(n, n_I + n_V)
    B_bar[r_e : r_e + n_v, :n_I] = -A["I"]
    B_bar[r_v : r_v + n_V, n_I:] = -np.eye(n_V)

    effort_index = np.concatenate(
        [
            s_e + np.arange(n_v),
            s_phi + np.arange(n_L),
            s_q + np.arange(n_C),
            s_j + np.arange(n_V),
            s_lam + np.arange(n_lam),
        ]
    ).astype(int)
    effort_laws = (
        [None] * n_v + list(blocks.laws["L"]) + list(blocks.laws["C"]) + [None] * (n_V + n_lam)
    )

    energy_terms = [(s_q + i, law) for i, law in enumerate(blocks.laws["C"])]
    energy_terms += [(s_phi + i, law) for i, law in enumerate(blocks.laws["L"])]

    names = blocks.names
    coupling_names = list(coupling_names)
    labels = {
        "state": _labels("q", names["C"])
        + _labels("phi", names["L"])
        + _labels("e", blocks.vertices)
        + _labels("j", names["V"])
        + _labels("lambda", coupling_names[:n_lam]),
        "effort": _labels("e", blocks.vertices)
        + _labels("j", names["L"])
        + _labels("u", names["C"])
        + _labels("j", names["V"])
        + _labels("lambda", coupling_names[:n_lam]),
        "equation": _labels("kcl", blocks.vertices)
        + _labels("flux", names["L"])
        + _labels("cap", names["C"])
        + _labels("vsrc", names["V"])
        + _labels("coupling", coupling_names[:n_lam]),
        "input": _labels("uhat", coupling_names[: B_hat.shape[1]])
        + _labels("i", names["I"])
        + _labels("v", names["V"]),
        "output": _labels("yhat", coupling_names[: B_hat.shape[1]])
        + _labels("y", names["I"])
        + _labels("y", names["V"]),
    }

    m_hat = B_hat.shape[1]

    def inputs(t):
        return np.concatenate([np.zeros(m_hat), blocks_source_vector(blocks, t)])

    return PhDae(
        E,
        J,
        np.hstack([B_hat, B_bar]),
        effort_index,
        effort_laws,
        K_r,
        N_R,
        list(blocks.laws["R"]),
        K_V,
        energy_terms,
        labels,
        inputs=inputs,
        coupling_ports=m_hat,
        name=name,
    )


def _override_laws(blocks, laws):
    if not laws:
        return blocks
    new_laws = {
        kind: [laws.get(name, law) for name, law in zip(blocks.names[kind], blocks.laws[kind])]
        for kind in blocks.laws
    }
    return blocks._replace(laws=new_laws)


def assemble_model1(circuit, laws=None):
    r"""Assemble the charge/flux oriented MNA equations as a PH-DAE.

    The state is :math:`x = (q_C, \phi_L, e, j_V)`, the effort
    :math:`z = (e, \phi^{-1}(\phi_L), q^{-1}(q_C), j_V)`, the equations are
    ordered as (current balance, flux, capacitance voltage, voltage source)
    and

    .. math::

        E = \begin{pmatrix} A_C & 0 & 0 & 0\\ 0 & I & 0 & 0\\ 0&0&0&0\\ 0&0&0&0\end{pmatrix},\quad
        J = \begin{pmatrix} 0 & -A_L & 0 & -A_V\\ A_L^T & 0 & 0 & 0\\ 0&0&0&0\\ A_V^T & 0&0&0\end{pmatrix},\quad
        B = \begin{pmatrix} -A_I & 0\\ 0&0\\0&0\\0&-I\end{pmatrix},

    :math:`r(z) = (A_R g(A_R^T e), 0, A_C^T e - u_C, 0)`,
    :math:`\mathcal{V} = \{z \mid A_C^T e = u_C\}` and
    :math:`H = V_C(q_C) + V_L(\phi_L)`. Coupling branches are treated as
    zero-volt voltage sources.

    Args:
        circuit (CircuitGraph): a sound circuit
        laws (dict[str, ConstitutiveLaw]): optional law overrides by branch name

    Returns:
        PhDae: the assembled system

    Raises:
        SoundnessViolation: if the circuit is not sound
    """
    report = classify_index(circuit, MODEL1)
    phdae = charge_flux_system(_override_laws(circuit.blocks(), laws), name=MODEL1)
    phdae.index_report = report
    return phdae


def assemble_model2(circuit, laws=None):
    r"""Assemble the MNA equations with explicit capacitance currents as a PH-DAE.

    The state is :math:`x = (e, j_C, q_C, \phi_L, j_V)` and the effort
    :math:`z = (e, j_C, q^{-1}(q_C), \phi^{-1}(\phi_L), j_V)`, with
    :math:`E = \operatorname{diag}(0, 0, I, I, 0)`,

    .. math::

        J = \begin{pmatrix}
        0 & -A_C & 0 & -A_L & -A_V\\
        A_C^T & 0 & -I & 0 & 0\\
        0 & I & 0 & 0 & 0\\
        A_L^T & 0 & 0 & 0 & 0\\
        A_V^T & 0 & 0 & 0 & 0
        \end{pmatrix},

    :math:`r(z) = (A_R g(A_R^T e), 0, 0, 0, 0)`, the port matrix of
    :func:`assemble_model1` and :math:`\mathcal{V} = \mathbb{R}^n`. The
    dimension is :math:`n = n_v + 2n_C + n_L + n_V`.

    Args:
        circuit (CircuitGraph): a sound circuit
        laws (dict[str, ConstitutiveLaw]): optional law overrides by branch name

    Returns:
        PhDae: the assembled system

    Raises:
        SoundnessViolation: if the circuit is not sound
    """
    # pylint: disable=too-many-locals
    report = classify_index(circuit, MODEL2)
    blocks = _override_laws(circuit.blocks(), laws)

    n_v = len(blocks.vertices)
    A = {k: np.asarray(blocks.incidence[k], dtype=float).reshape(n_v, -1) for k in "CRLVI"}
    n_C, n_R, n_L, n_V, n_I = (A[k].shape[1] for k in "CRLVI")
    n = n_v + 2 * n_C + n_L + n_V

    # states, efforts and equations share the block order (e, j_C, q_C, phi_L, j_V)
    o_e, o_jc, o_q, o_phi, o_j = np.cumsum([0, n_v, n_C, n_C, n_L])

    E = _block(n, n)
    E[o_q : o_q + n_C, o_q : o_q + n_C] = np.eye(n_C)
    E[o_phi : o_phi + n_L, o_phi : o_phi + n_L] = np.eye(n_L)

    J = _block(n, n)
    J[o_e : o_e + n_v, o_jc : o_jc + n_C] = -A["C"]
    J[o_e : o_e + n_v, o_phi : o_phi + n_L] = -A["L"]
    J[o_e : o_e + n_v, o_j : o_j + n_V] = -A["V"]
    J[o_jc : o_jc + n_C, o_e : o_e + n_v] = A["C"].T
    J[o_jc : o_jc + n_C, o_q : o_q + n_C] = -np.eye(n_C)
    J[o_q : o_q + n_C, o_jc : o_jc + n_C] = np.eye(n_C)
    J[o_phi : o_phi + n_L, o_e : o_e + n_v] = A["L"].T
    J[o_j : o_j + n_V, o_e : o_e + n_v] = A["V"].T

    N_R = _block(n, n_R)
    N_R[o_e : o_e + n_v] = A["R"]

    B = _block(n, n_I + n_V)
    B[o_e : o_e + n_v, :n_I] = -A["I"]
    B[o_j : o_j + n_V, n_I:] = -np.eye(n_V)

    effort_laws = [None] * (n_v + n_C) + list(blocks.laws["C"]) + list(blocks.laws["L"]) + [None] * n_V
    energy_terms = [(o_q + i, law) for i, law in enumerate(blocks.laws["C"])]
    energy_terms += [(o_phi + i, law) for i, law in enumerate(blocks.laws["L"])]

    names = blocks.names
    labels = {
        "state": _labels("e", blocks.vertices)
        + _labels("jC", names["C"])
        + _labels("q", names["C"])
        + _labels("phi", names["L"])
        + _labels("j", names["V"]),
        "effort": _labels("e", blocks.vertices)
        + _labels("jC", names["C"])
        + _labels("u", names["C"])
        + _labels("j", names["L"])
        + _labels("j", names["V"]),
        "equation": _labels("kcl", blocks.vertices)
        + _labels("cap", names["C"])
        + _labels("charge", names["C"])
        + _labels("flux", names["L"])
        + _labels("vsrc", names["V"]),
        "input": _labels("i", names["I"]) + _labels("v", names["V"]),
        "output": _labels("y", names["I"]) + _labels("y", names["V"]),
    }

    return PhDae(
        E,
        J,
        B,
        np.arange(n),
        effort_laws,
        _block(n, n),
        N_R,
        list(blocks.laws["R"]),
        _block(0, n),
        energy_terms,
        labels,
        inputs=lambda t: blocks_source_vector(blocks, t),
        index_report=report,
        name=MODEL2,
    )


def hamiltonian(phdae, x):
    """Evaluate the Hamiltonian of ``phdae`` at the state ``x``."""
    return phdae.hamiltonian(np.asarray(x, dtype=float))


def hamiltonian_gradient_check(phdae, x, h=1e-4):
    r"""Compare central differences of :math:`H` with :math:`E^T z(x)`.

    Args:
        phdae (PhDae): the system
        x (array): a state with :math:`z(x)\in\mathcal{V}`
        h (float): the difference step

    Returns:
        float: the maximum absolute deviation

    Raises:
        ValueError: if :math:`z(x)\notin\mathcal{V}`
    """
    x = np.asarray(x, dtype=float)
    z = phdae.effort(x)

    if not phdae.in_subspace(z, tol=1e-8):
        raise ValueError("The gradient identity only holds for states with z(x) in V.")

    grad = np.zeros_like(x)
    for p in {p for p, _ in phdae.energy_terms}:
        step = np.zeros_like(x)
        step[p] = h
        grad[p] = (phdae.hamiltonian(x + step) - phdae.hamiltonian(x - step)) / (2 * h)

    return float(np.max(np.abs(grad - phdae.E.T @ z))) if len(x) else 0.0


def random_effort(phdae, rng, scale=1.0):
    r"""Draw a random effort vector in :math:`\mathcal{V}`.

    Args:
        phdae (PhDae): the system
        rng (numpy.random.RandomState): random number generator
        scale (float): standard deviation of the coefficients

    Returns:
        array: an effort vector :math:`z\in\mathcal{V}`
    """
    n = phdae.J.shape[1]
    if phdae.K_V.shape[0] == 0:
        return scale * rng.standard_normal(n)
    basis = scipy.linalg.null_space(phdae.K_V)
    return scale * basis @ rng.standard_normal(basis.shape[1])


def random_state(phdae, rng, scale=1.0):
    r"""Draw a random state ``x`` with :math:`z(x)\in\mathcal{V}`."""
    return phdae.state_from_effort(random_effort(phdae, rng, scale))


StructureReport = namedtuple("StructureReport", ["skew_error", "min_accretivity", "gradient_error"])
r"""Result of :func:`check_structure`.

Args:
    skew_error (float): :math:`\max|J + J^T|`
    min_accretivity (float): smallest sampled :math:`z^T r(z)` over :math:`z\in\mathcal{V}`
    gradient_error (float): largest sampled deviation of :math:`\nabla H` from :math:`E^T z`
"""


def check_structure(phdae, samples=100, seed=0, h=1e-4, scale=1.0):
    """Sample the defining properties of a PH-DAE.

    Args:
        phdae (PhDae): the system
        samples (int): number of random efforts in :math:`\\mathcal{V}`
        seed (int): random seed
        h (float): difference step of the gradient check
        scale (float): scale of the random efforts

    Returns:
        StructureReport: the sampled defects
    """
    rng = np.random.RandomState(seed)

    skew = float(np.max(np.abs(phdae.J + phdae.J.T))) if phdae.J.size else 0.0

    accretivity = np.inf
    gradient = 0.0
    for _ in range(samples):
        z = random_effort(phdae, rng, scale)
        accretivity = min(accretivity, float(z @ phdae.dissipation(z)))
        gradient = max(gradient, hamiltonian_gradient_check(phdae, phdae.state_from_effort(z), h))

    return StructureReport(skew, accretivity, gradient)
