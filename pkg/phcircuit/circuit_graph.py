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
This module contains the :class:`CircuitGraph` class, the grounded directed
multigraph representation of a circuit, and :func:`build_circuit`, which
creates it from a parsed netlist.
"""
from collections import namedtuple, OrderedDict
import logging as log

import networkx as nx
import numpy as np

from .laws import law_from_spec
from .netlist import netlist_vertices, source_value
from .topology import (
    TopologyBlocks,
    check_cut_free,
    check_cycle_free,
    minimal_support,
    nullspace,
)

log.getLogger()


#: tuple[str]: branch kinds carrying a constitutive law or a source
PHYSICAL_KINDS = ("C", "R", "L", "V", "I")


class CircuitError(Exception):
    """Base class of the errors raised when building a :class:`CircuitGraph`."""


class NotConnectedError(CircuitError):
    """Exception raised when the circuit graph has more than one component."""


class SoundnessViolation(CircuitError):
    """Exception raised for a cycle of voltage sources or a cut of current sources.

    Args:
        message (str): the diagnostic
        kind (str): ``"V-cycle"`` or ``"I-cut"``
        edges (list[str]): the offending branches
    """

    def __init__(self, message, kind=None, edges=()):
        super().__init__(message)
        self.kind = kind
        self.edges = list(edges)


Edge = namedtuple("Edge", ["name", "kind", "tail", "head", "law", "source"])
"""A branch of the circuit graph.

Args:
    name (str): branch name
    kind (str): one of ``R``, ``C``, ``L``, ``V``, ``I``, ``K``
    tail (str): the vertex the branch leaves (``n+``)
    head (str): the vertex the branch enters (``n-``)
    law (ConstitutiveLaw or None): constitutive law of ``R``, ``C``, ``L`` branches
    source (SourceSpec or None): signal of ``V`` and ``I`` branches
"""


CircuitBlocks = namedtuple("CircuitBlocks", ["vertices", "incidence", "names", "laws", "signals"])
"""Per-kind incidence matrices, names, laws and source signals of a circuit.

The ``V`` block lists the voltage sources followed by the coupling branches
(as zero-volt sources) when coupling branches are included.

Args:
    vertices (list[str]): non-ground vertex names
    incidence (dict[str, array[int]]): grounded incidence matrix per kind
    names (dict[str, list[str]]): branch names per kind
    laws (dict[str, list[ConstitutiveLaw]]): laws of the ``C``, ``R``, ``L`` branches
    signals (dict[str, list[SourceSpec or None]]): signals of the ``V`` and ``I`` branches
"""


def blocks_source_vector(blocks, t):
    """Input vector ``(i_src(t), v_src(t))`` of a set of circuit blocks."""
    values = [source_value(s, t) if s is not None else 0.0 for s in blocks.signals["I"]]
    values += [source_value(s, t) if s is not None else 0.0 for s in blocks.signals["V"]]
    return np.array(values, dtype=float)


class CircuitGraph:
    """Grounded directed multigraph of a circuit.

    Vertices and branches are ordered by declaration, so that incidence
    matrices are reproducible across runs.

    Args:
        vertices (list[str]): the non-ground vertices
        ground (str): the ground vertex
        edges (list[Edge]): the branches
        partitions (dict[str, int]): partition id per non-ground vertex
        title (str): circuit title
    """

    def __init__(self, vertices, ground, edges, partitions=None, title=""):
        self.vertices = list(vertices)
        self.ground = ground
        self.edges = list(edges)
        self.title = title
        self.partitions = OrderedDict(
            (v, (partitions or {}).get(v, 1)) for v in self.vertices
        )

        self._row = {v: i for i, v in enumerate(self.vertices)}

        self._graph = nx.MultiDiGraph()
        self._graph.add_nodes_from([ground] + self.vertices)
        for e in self.edges:
            self._graph.add_edge(e.tail, e.head, key=e.name, kind=e.kind)

    def __repr__(self):
        return "<CircuitGraph: {} vertices, {} edges>".format(len(self.vertices), len(self.edges))

    @property
    def graph(self):
        """networkx.MultiDiGraph: the circuit graph, ground included"""
        return self._graph

    @property
    def n_vertices(self):
        """int: number of non-ground vertices :math:`n_v`"""
        return len(self.vertices)

    def edges_of(self, kind):
        """Branches of the given kind, in declaration order."""
        return [e for e in self.edges if e.kind == kind]

    def names(self, kind):
        """Names of the branches of the given kind."""
        return [e.name for e in self.edges_of(kind)]

    def incidence(self, kind, grounded=True):
        """Incidence matrix of the branches of one kind.

        Column :math:`j` has :math:`+1` in the row of the vertex branch
        :math:`j` leaves and :math:`-1` in the row of the vertex it enters.

        Args:
            kind (str): the branch kind
            grounded (bool): if ``False``, the all-vertex incidence matrix is
                returned, with the ground row last

        Returns:
            array[int]: the incidence matrix
        """
        edges = self.edges_of(kind)
        rows = self.n_vertices + (0 if grounded else 1)
        A = np.zeros((rows, len(edges)), dtype=int)

        for j, e in enumerate(edges):
            for vertex, sign in ((e.tail, 1), (e.head, -1)):
                if vertex == self.ground:
                    if not grounded:
                        A[-1, j] = sign
                else:
                    A[self._row[vertex], j] = sign
        return A

    A_C = property(lambda self: self.incidence("C"), doc="array[int]: capacitance incidence")
    A_R = property(lambda self: self.incidence("R"), doc="array[int]: resistance incidence")
    A_L = property(lambda self: self.incidence("L"), doc="array[int]: inductance incidence")
    A_V = property(lambda self: self.incidence("V"), doc="array[int]: voltage-source incidence")
    A_I = property(lambda self: self.incidence("I"), doc="array[int]: current-source incidence")
    A_K = property(lambda self: self.incidence("K"), doc="array[int]: coupling-branch incidence")

    def laws(self, kind):
        """Constitutive laws of the branches of one kind."""
        return [e.law for e in self.edges_of(kind)]

    def is_connected(self):
        """Whether the graph, ground included, is connected and has a branch."""
        return bool(self.edges) and nx.is_connected(self._graph.to_undirected(as_view=True))

    def blocks(self, include_coupling=True):
        """Return the :class:`CircuitBlocks` of the circuit.

        Args:
            include_coupling (bool): append coupling branches to the ``V`` block

        Returns:
            CircuitBlocks: the blocks
        """
        kinds_v = ["V", "K"] if include_coupling else ["V"]

        incidence = {k: self.incidence(k) for k in ("C", "R", "L", "I")}
        incidence["V"] = np.hstack([self.incidence(k) for k in kinds_v])

        names = {k: self.names(k) for k in ("C", "R", "L", "I")}
        names["V"] = [n for k in kinds_v for n in self.names(k)]

        laws = {k: self.laws(k) for k in ("C", "R", "L")}

        signals = {
            "I": [e.source for e in self.edges_of("I")],
            "V": [e.source for k in kinds_v for e in self.edges_of(k)],
        }
        return CircuitBlocks(list(self.vertices), incidence, names, laws, signals)

    def topology_blocks(self, include_coupling=True):
        """Incidence data for :func:`~.classify_blocks`."""
        b = self.blocks(include_coupling)
        return TopologyBlocks(b.vertices, b.incidence, b.names)

    def source_vector(self, t, include_coupling=True):
        """The input vector :math:`u(t) = (i_{src}(t), v_{src}(t))`.

        Coupling branches contribute zero voltages.

        Args:
            t (float): time in seconds
            include_coupling (bool): whether coupling branches count as voltage sources

        Returns:
            array[float]: the input vector
        """
        return blocks_source_vector(self.blocks(include_coupling), t)

    def check_soundness(self):
        """Check connectivity and the absence of V-cycles and I-cuts.

        Coupling branches count as voltage sources.

        Raises:
            NotConnectedError: if the graph is empty or has several components
            SoundnessViolation: with the offending branches
        """
        if not self.is_connected():
            components = list(nx.connected_components(self._graph.to_undirected(as_view=True)))
            raise NotConnectedError(
                "The circuit graph must be connected and nonempty; found {} component(s): {}.".format(
                    len(components), [sorted(c) for c in components]
                )
            )

        b = self.blocks()
        A_V = b.incidence["V"]

        if not check_cycle_free(A_V):
            vec = minimal_support(nullspace(A_V))
            edges = [b.names["V"][i] for i in np.flatnonzero(vec)]
            raise SoundnessViolation(
                "The voltage sources {} form a cycle.".format(", ".join(edges)), "V-cycle", edges
            )

        A_rest = np.hstack([b.incidence[k] for k in ("C", "R", "L", "V")])
        if not check_cut_free(A_rest, b.incidence["I"]):
            w = minimal_support(nullspace(A_rest.T))
            cut = b.incidence["I"].T @ w
            edges = [b.names["I"][i] for i in np.flatnonzero(cut)]
            raise SoundnessViolation(
                "The current sources {} form a cut.".format(", ".join(edges)), "I-cut", edges
            )

    def subcircuit(self, vertices, edge_names):
        """The circuit induced by a subset of vertices and branches.

        Args:
            vertices (list[str]): non-ground vertices to keep, in the given order
            edge_names (set[str]): names of the branches to keep

        Returns:
            CircuitGraph: the subcircuit, sharing the ground vertex
        """
        edges = [e for e in self.edges if e.name in edge_names]
        return CircuitGraph(
            vertices,
            self.ground,
            edges,
            partitions={v: self.partitions[v] for v in vertices},
            title=self.title,
        )


def build_circuit(netlist, **law_options):
    """Build and validate the circuit graph of a netlist.

    Args:
        netlist (Netlist): the parsed netlist

    Keyword Args:
        inversion_tol (float): tolerance of the law inversions
        quadrature_tol (float): tolerance of the stored-energy quadratures

    Returns:
        CircuitGraph: the circuit

    Raises:
        NotConnectedError: if the graph has more than one component
        SoundnessViolation: on a cycle of voltage sources or a cut of current sources
    """
    edges = []
    for el in netlist.elements:
        law = law_from_spec(el.kind, el.law, **law_options) if el.law is not None else None
        edges.append(Edge(el.name, el.kind, el.nodes[0], el.nodes[1], law, el.source))

    circuit = CircuitGraph(
        netlist_vertices(netlist), netlist.ground, edges, netlist.partitions, netlist.title
    )
    circuit.check_soundness()

    log.info(
        "Built circuit with %d vertices and %d branches.", circuit.n_vertices, len(circuit.edges)
    )
    return circuit
