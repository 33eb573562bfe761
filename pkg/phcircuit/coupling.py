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
This module splits a partitioned circuit into subsystems joined by coupling
branches and assembles the coupled PH-DAE representations.

Every coupling branch is a virtual zero-volt voltage source with current
:math:`\lambda_j`. With :math:`A_{\lambda,i}` the coupling incidence of
subsystem :math:`i`, the coupled circuit equations are the subsystem
equations plus the coupling equation :math:`\sum_i A_{\lambda,i}^T e_i = 0`,
which is assigned to the last subsystem :math:`k`:

* subsystems :math:`i < k` receive the coupling currents as inputs,
  :math:`\hat u_i = -\lambda`, and return :math:`\hat y_i = A_{\lambda,i}^T e_i`;
* subsystem :math:`k` carries :math:`\lambda` in its state, receives
  :math:`\hat u_k = \sum_{i<k}\hat y_i` and returns :math:`\hat y_k = \lambda`.

The coupling relations read :math:`\hat u = -\hat C\hat y` with the
skew-symmetric interconnection matrix :math:`\hat C`.
"""
from collections import namedtuple
import logging as log

import numpy as np
import scipy.linalg

from .phdae import PhDae, charge_flux_system
from .topology import classify_coupled, classify_index

log.getLogger()


class PartitionError(Exception):
    """Exception raised when a circuit cannot be split along its partitions."""


class PartitionNotConnectedError(PartitionError):
    """Exception raised when a subsystem circuit is not connected to ground."""


class CouplingSpanError(PartitionError):
    """Exception raised when a coupling branch does not join two distinct partitions."""


Subsystem = namedtuple("Subsystem", ["index", "partition", "circuit", "A_lambda", "phdae"])
"""One subsystem of a :class:`PartitionedSystem`.

Args:
    index (int): position of the subsystem, starting at 0
    partition (int): the partition id
    circuit (CircuitGraph): the subsystem circuit, coupling branches removed
    A_lambda (array[int]): coupling incidence :math:`A_{\\lambda,i}`
    phdae (PhDae): the subsystem PH-DAE with coupling ports first
"""


def interconnection_matrix(k, n_lambda):
    r"""The interconnection matrix :math:`\hat C` of ``k`` subsystems.

    With :math:`\hat y = (\hat y_1,\dots,\hat y_k)` and
    :math:`\hat u = -\hat C\hat y`, the blocks are :math:`\hat C_{ik} = I` and
    :math:`\hat C_{ki} = -I` for :math:`i < k`, and zero otherwise.

    Args:
        k (int): the number of subsystems
        n_lambda (int): the number of coupling branches

    Returns:
        array[int]: the ``k n_lambda x k n_lambda`` matrix
    """
    C = np.zeros((k * n_lambda, k * n_lambda), dtype=int)
    last = slice((k - 1) * n_lambda, k * n_lambda)
    for i in range(k - 1):
        block = slice(i * n_lambda, (i + 1) * n_lambda)
        C[block, last] = np.eye(n_lambda, dtype=int)
        C[last, block] = -np.eye(n_lambda, dtype=int)
    return C


def check_interconnection(B_hat, C_hat, tol=0.0):
    r"""Whether :math:`\hat B\hat C\hat B^T` is skew-symmetric.

    Only the Schur complement needs to be skew; :math:`\hat C` itself may
    be arbitrary.

    Args:
        B_hat (array): the stacked coupling port matrix
        C_hat (array): the interconnection matrix
        tol (float): tolerance of the skew-symmetry test

    Returns:
        bool: the result
    """
    S = np.asarray(B_hat) @ np.asarray(C_hat) @ np.asarray(B_hat).T
    return S.size == 0 or bool(np.max(np.abs(S + S.T)) <= tol)


class PartitionedSystem:
    """A circuit split into subsystems.

    Args:
        circuit (CircuitGraph): the unsplit circuit
        subsystems (list[Subsystem]): the subsystems, ordered by partition id
        coupling_names (list[str]): the coupling branches, one :math:`\\lambda` each
        coupled_index (CoupledIndexReport): index classification of the perspectives
    """

    def __init__(self, circuit, subsystems, coupling_names, coupled_index=None):
        self.circuit = circuit
        self.subsystems = list(subsystems)
        self.coupling_names = list(coupling_names)
        self.coupled_index = coupled_index

    def __repr__(self):
        return "<PartitionedSystem: k={}, n_lambda={}>".format(self.k, self.n_lambda)

    @property
    def k(self):
        """int: number of subsystems"""
        return len(self.subsystems)

    @property
    def n_lambda(self):
        """int: number of coupling branches"""
        return len(self.coupling_names)

    @property
    def phdaes(self):
        """list[PhDae]: the subsystem PH-DAEs"""
        return [s.phdae for s in self.subsystems]

    @property
    def C_hat(self):
        """array[int]: the interconnection matrix, restricted to the existing coupling ports"""
        if self.n_lambda == 0:
            return np.zeros((0, 0), dtype=int)
        return interconnection_matrix(self.k, self.n_lambda)

    @property
    def B_hat(self):
        r"""array: block diagonal of the subsystem coupling port matrices :math:`\hat B_i`"""
        return scipy.linalg.block_diag(*[p.B_hat for p in self.phdaes])

    def to_dict(self):
        """JSON-serializable description of the split."""
        return {
            "k": self.k,
            "coupling": self.coupling_names,
            "C_hat": self.C_hat.tolist(),
            "subsystems": [
                {
                    "partition": s.partition,
                    "vertices": s.circuit.vertices,
                    "dims": list(s.phdae.dims),
                    "A_lambda": np.asarray(s.A_lambda).tolist(),
                }
                for s in self.subsystems
            ],
            "index_one": self.coupled_index.index_one if self.coupled_index else None,
        }


def _coupling_incidence(circuit, coupling, vertices):
    row = {v: i for i, v in enumerate(vertices)}
    A = np.zeros((len(vertices), len(coupling)), dtype=int)
    for j, e in enumerate(coupling):
        for vertex, sign in ((e.tail, 1), (e.head, -1)):
            if vertex in row:
                A[row[vertex], j] = sign
    return A


def _subsystem_phdae(circuit, A_lambda, names, last):
    blocks = circuit.blocks(include_coupling=False)
    if not names:
        return charge_flux_system(blocks)
    if last:
        return charge_flux_system(blocks, coupling_state=A_lambda, coupling_names=names)
    return charge_flux_system(blocks, coupling_input=A_lambda, coupling_names=names)


def split_circuit(circuit, partition_spec=None):
    """Split a circuit along its partitions.

    Args:
        circuit (CircuitGraph): a sound circuit
        partition_spec (dict[str, int]): partition id per vertex, overriding
            the partitions of the circuit

    Returns:
        PartitionedSystem: the subsystems, ordered by partition id

    Raises:
        CouplingSpanError: if a coupling branch touches ground or lies inside one partition
        PartitionError: if another branch joins two partitions
        PartitionNotConnectedError: if a subsystem is not connected to ground
        SoundnessViolation: if a subsystem is not sound
    """
    # pylint: disable=too-many-locals
    circuit.check_soundness()

    parts = dict(circuit.partitions)
    parts.update(partition_spec or {})
    ground = circuit.ground

    def part_of(vertex):
        return None if vertex == ground else parts[vertex]

    coupling = circuit.edges_of("K")
    for e in coupling:
        if ground in (e.tail, e.head):
            raise CouplingSpanError(
                "Coupling branch '{}' touches the ground vertex.".format(e.name)
            )
        if part_of(e.tail) == part_of(e.head):
            raise CouplingSpanError(
                "Coupling branch '{}' lies inside partition {}.".format(e.name, part_of(e.tail))
            )

    for e in circuit.edges:
        if e.kind != "K" and len({part_of(e.tail), part_of(e.head)} - {None}) > 1:
            raise PartitionError(
                "Branch '{}' joins partitions {} and {}; only coupling branches may.".format(
                    e.name, part_of(e.tail), part_of(e.head)
                )
            )

    ids = sorted(set(parts[v] for v in circuit.vertices))
    names = [e.name for e in coupling]

    subsystems = []
    for i, p in enumerate(ids):
        vertices = [v for v in circuit.vertices if parts[v] == p]
        edge_names = {
            e.name
            for e in circuit.edges
            if e.kind != "K" and {part_of(e.tail), part_of(e.head)} - {None} == {p}
        }
        sub = circuit.subcircuit(vertices, edge_names)

        if not sub.is_connected():
            raise PartitionNotConnectedError(
                "The subsystem of partition {} is not connected to ground.".format(p)
            )
        sub.check_soundness()

        A_lambda = _coupling_incidence(circuit, coupling, vertices)
        phdae = _subsystem_phdae(sub, A_lambda, names, last=(i == len(ids) - 1))
        phdae.name = "subsystem {}".format(p)
        subsystems.append(Subsystem(i, p, sub, A_lambda, phdae))

    partitioned = PartitionedSystem(circuit, subsystems, names)

    if partitioned.k > 1:
        report = classify_coupled(partitioned)
        partitioned.coupled_index = report
        for s in subsystems[:-1]:
            s.phdae.index_report = report.c2[s.index]
        subsystems[-1].phdae.index_report = report.c3[-1]
    else:
        subsystems[0].phdae.index_report = classify_index(subsystems[0].circuit)

    log.info(
        "Split circuit into %d subsystems with %d coupling branches.", partitioned.k, len(names)
    )
    return partitioned


def assemble_multiply_coupled(partitioned):
    r"""The multiply coupled PH-DAE of a partitioned system.

    Args:
        partitioned (PartitionedSystem): the split circuit

    Returns:
        tuple[list[PhDae], array]: the subsystem PH-DAEs and the interconnection
        matrix :math:`\hat C`

    Raises:
        PartitionError: if :math:`\hat B\hat C\hat B^T` is not skew-symmetric
    """
    C_hat = partitioned.C_hat
    if not check_interconnection(partitioned.B_hat, C_hat):
        raise PartitionError("The coupling Schur complement is not skew-symmetric.")
    return partitioned.phdaes, C_hat


#: list[str]: state label prefixes of the charge/flux oriented MNA, in block order
STATE_ORDER = ["q", "phi", "e", "j", "lambda"]

#: list[str]: equation label prefixes of the charge/flux oriented MNA, in block order
EQUATION_ORDER = ["kcl", "flux", "cap", "vsrc", "coupling"]


def _type_major(labels, order):
    prefix = [l.split("[", 1)[0] for l in labels]
    return sorted(range(len(labels)), key=lambda i: (order.index(prefix[i]), i))


class JointPhDae(PhDae):
    r"""The condensed PH-DAE of a multiply coupled system.

    Its structure matrix is :math:`\hat J = J - \hat B\hat C\hat B^T` with
    :math:`J` the block diagonal of the subsystem structure matrices; only
    the external ports remain. Coordinates are ordered by type,
    :math:`x = (q_C, \phi_L, e, j_V, \lambda)`.

    Args:
        phdae (PhDae): the condensed system
        partitioned (PartitionedSystem): the split circuit
        J_blocks (array): block diagonal of the subsystem structure matrices
        B_hat (array): block diagonal of the subsystem coupling port matrices
        C_hat (array): the interconnection matrix
    """

    # pylint: disable=too-many-arguments

    def __init__(self, phdae, partitioned, J_blocks, B_hat, C_hat):
        super().__init__(
            phdae.E,
            phdae.J,
            phdae.B,
            phdae.effort_index,
            phdae.effort_laws,
            phdae.K_r,
            phdae.N_R,
            phdae.resistor_laws,
            phdae.K_V,
            phdae.energy_terms,
            phdae.labels,
            inputs=phdae.inputs,
            index_report=phdae.index_report,
            name="joint",
        )
        self.partitioned = partitioned
        self.J_blocks = J_blocks
        self.B_hat_blocks = B_hat
        self.C_hat = C_hat

    def scatter(self, x):
        """Split a joint state into the subsystem states."""
        x = np.asarray(x, dtype=float)
        return [
            x[[self.index_of(l) for l in p.labels["state"]]] for p in self.partitioned.phdaes
        ]

    def gather(self, states):
        """Assemble a joint state from subsystem states."""
        x = np.zeros(self.E.shape[1])
        for p, xi in zip(self.partitioned.phdaes, states):
            x[[self.index_of(l) for l in p.labels["state"]]] = xi
        return x

    @staticmethod
    def monolithic_label(label):
        """The label of a coordinate in the model of the unsplit circuit."""
        return "j" + label[len("lambda") :] if label.startswith("lambda[") else label


def assemble_joint_condensed(partitioned):
    r"""Assemble the condensed PH-DAE of a partitioned system.

    Up to the ordering of the coordinates, the result is the charge/flux
    oriented model of the unsplit circuit in which the coupling branches
    are zero-volt voltage sources with currents :math:`\lambda`.

    Args:
        partitioned (PartitionedSystem): the split circuit

    Returns:
        JointPhDae: the condensed system

    Raises:
        PartitionError: if :math:`\hat J` is not skew-symmetric
    """
    # pylint: disable=too-many-locals
    phdaes, C_hat = assemble_multiply_coupled(partitioned)

    def diag(attr):
        return scipy.linalg.block_diag(*[getattr(p, attr) for p in phdaes])

    E = diag("E")
    J_blocks = diag("J")
    B_hat = partitioned.B_hat
    J_hat = J_blocks - B_hat @ C_hat @ B_hat.T if C_hat.size else J_blocks

    if np.max(np.abs(J_hat + J_hat.T), initial=0.0) > 0:
        raise PartitionError("The condensed structure matrix is not skew-symmetric.")

    offsets = np.cumsum([0] + [p.E.shape[1] for p in phdaes])
    effort_index = np.concatenate([p.effort_index + o for p, o in zip(phdaes, offsets)])
    energy_terms = [(q + o, law) for p, o in zip(phdaes, offsets) for q, law in p.energy_terms]

    def cat(kind):
        return [l for p in phdaes for l in p.labels[kind]]

    labels = {kind: cat(kind) for kind in ("state", "effort", "equation")}
    labels["input"] = [l for p in phdaes for l in p.labels["input"][p.coupling_ports :]]
    labels["output"] = [l for p in phdaes for l in p.labels["output"][p.coupling_ports :]]

    def inputs(t):
        return np.concatenate([p.input_vector(t)[p.coupling_ports :] for p in phdaes])

    condensed = PhDae(
        E,
        J_hat,
        diag("B_bar"),
        effort_index,
        [law for p in phdaes for law in p.effort_laws],
        diag("K_r"),
        diag("N_R"),
        [law for p in phdaes for law in p.resistor_laws],
        diag("K_V"),
        energy_terms,
        labels,
        inputs=inputs,
        index_report=partitioned.coupled_index.c1 if partitioned.coupled_index else None,
    )

    rows = _type_major(labels["equation"], EQUATION_ORDER)
    states = _type_major(labels["state"], STATE_ORDER)
    joint = JointPhDae(condensed.reordered(rows, states), partitioned, J_blocks, B_hat, C_hat)

    if joint.index_report is None:
        joint.index_report = partitioned.subsystems[0].phdae.index_report
    return joint
