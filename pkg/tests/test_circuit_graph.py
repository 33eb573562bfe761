# Copyright 2018 Xanadu Quantum Technologies Inc.

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
Unit tests for the :mod:`phcircuit.circuit_graph` module.
"""
import pytest
import networkx as nx
import numpy as np

from phcircuit.circuit_graph import (
    CircuitGraph,
    Edge,
    NotConnectedError,
    SoundnessViolation,
    build_circuit,
)
from phcircuit.netlist import parse_netlist

from conftest import CORPUS, circuit_from, random_branches


def netlist_graph(netlist, kinds):
    """Undirected multigraph of the elements of the given kinds of a netlist."""
    graph = nx.MultiGraph()
    graph.add_node(netlist.ground)
    graph.add_nodes_from(v for el in netlist.elements for v in el.nodes)
    graph.add_edges_from(el.nodes for el in netlist.elements if el.kind in kinds)
    return graph


def circuit_graph(circuit, kinds):
    """Undirected multigraph of the branches of the given kinds of a circuit."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(circuit.graph.nodes)
    graph.add_edges_from((e.tail, e.head) for e in circuit.edges if e.kind in kinds)
    return graph


class TestIncidence:
    """Tests for the incidence matrices."""

    def test_signs(self):
        """Test that branches leave their tail (+1) and enter their head (-1)."""
        circuit = circuit_from(CORPUS["rc"])

        assert circuit.vertices == ["1", "2"]
        assert np.array_equal(circuit.A_R, [[1], [-1]])
        assert np.array_equal(circuit.A_C, [[0], [1]])
        assert np.array_equal(circuit.A_V, [[1], [0]])
        assert circuit.A_L.shape == (2, 0)

    def test_ungrounded(self):
        """Test that the all-vertex incidence has zero column sums."""
        circuit = circuit_from(CORPUS["ladder"])
        for kind in "RCLV":
            A = circuit.incidence(kind, grounded=False)
            assert A.shape[0] == circuit.n_vertices + 1
            assert np.all(A.sum(axis=0) == 0)

    def test_graph(self):
        """Test the networkx view of the circuit."""
        circuit = circuit_from(CORPUS["bridge"])
        graph = circuit.graph

        assert set(graph.nodes) == {"0", "1", "2", "3"}
        assert graph.number_of_edges() == 6
        assert graph["1"]["2"]["R1"]["kind"] == "R"


class TestBlocks:
    """Tests for the circuit blocks."""

    def test_coupling_as_voltage_source(self, two_rc):
        """Test that coupling branches follow the voltage sources."""
        blocks = two_rc.blocks()
        assert blocks.names["V"] == ["V1", "K1"]
        assert blocks.incidence["V"].shape == (4, 2)

        blocks = two_rc.blocks(include_coupling=False)
        assert blocks.names["V"] == ["V1"]

    def test_source_vector(self):
        """Test that current sources precede voltage sources."""
        circuit = circuit_from("I1 0 1 DC 2\nR1 1 0 R=1\nV1 2 0 SIN 1 1\nR2 2 1 R=1")
        assert np.allclose(circuit.source_vector(0.25), [2.0, 1.0])

    def test_subcircuit(self, two_rc):
        """Test the subcircuit induced by a partition."""
        sub = two_rc.subcircuit(["b", "m"], {"R2", "C2"})

        assert sub.vertices == ["b", "m"]
        assert sub.names("R") == ["R2"]
        assert dict(sub.partitions) == {"b": 2, "m": 2}
        assert sub.is_connected()


class TestSoundness:
    """Tests for connectivity and soundness checks."""

    def test_not_connected(self):
        """Test that disconnected circuits are rejected."""
        with pytest.raises(NotConnectedError, match="2 component"):
            build_circuit(parse_netlist("R1 1 0 R=1\nR2 2 3 R=1"))

    def test_v_cycle(self):
        """Test that parallel voltage sources form a cycle."""
        with pytest.raises(SoundnessViolation) as e:
            circuit_from("V1 1 0 DC 1\nV2 1 0 DC 2\nR1 1 0 R=1")

        assert e.value.kind == "V-cycle"
        assert set(e.value.edges) == {"V1", "V2"}

    def test_i_cut(self):
        """Test that a vertex fed only by a current source is a cut."""
        with pytest.raises(SoundnessViolation) as e:
            circuit_from("R1 2 0 R=1\nI1 1 2 DC 1")

        assert e.value.kind == "I-cut"
        assert e.value.edges == ["I1"]

    def test_coupling_cycle(self):
        """Test that coupling branches count as voltage sources."""
        with pytest.raises(SoundnessViolation, match="cycle"):
            circuit_from("V1 a 0 DC 1\nV2 b 0 DC 1\nR1 a b R=1\nK1 a b")

    def test_empty(self):
        """Test that a circuit without branches is not connected."""
        circuit = CircuitGraph([], "0", [])
        with pytest.raises(NotConnectedError):
            circuit.check_soundness()

    def test_sound_corpus(self, corpus):
        """Test that the corpus circuits are sound."""
        for text in corpus.values():
            circuit_from(text).check_soundness()

    def test_manual_edges(self):
        """Test building a circuit from edges."""
        edges = [
            Edge("R1", "R", "1", "0", None, None),
            Edge("C1", "C", "1", "0", None, None),
        ]
        circuit = CircuitGraph(["1"], "0", edges)
        circuit.check_soundness()
        assert circuit.names("C") == ["C1"]

    def test_random_verdicts(self):
        """Test the verdicts on random netlists against networkx components and forests."""
        verdicts = []
        for seed in range(300):
            netlist = parse_netlist(random_branches(np.random.RandomState(seed)))

            if not nx.is_connected(netlist_graph(netlist, "RCLVI")):
                expected = "not connected"
            elif not nx.is_forest(netlist_graph(netlist, "V")):
                expected = "V-cycle"
            elif not nx.is_connected(netlist_graph(netlist, "RCLV")):
                expected = "I-cut"
            else:
                expected = "sound"

            try:
                circuit = build_circuit(netlist)
            except NotConnectedError:
                verdict = "not connected"
            except SoundnessViolation as e:
                verdict = e.kind
            else:
                verdict = "sound"
                assert nx.is_forest(circuit_graph(circuit, "V"))
                assert nx.is_connected(circuit_graph(circuit, "RCLV"))

            assert verdict == expected
            verdicts.append(verdict)

        assert {"sound", "not connected", "I-cut"} <= set(verdicts)
