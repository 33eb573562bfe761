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
Unit tests for the :mod:`phcircuit.topology` module.
"""
import json

import pytest
import networkx as nx
import numpy as np

import phcircuit as phc
from phcircuit.topology import (
    Defect,
    IndexReport,
    check_cut_free,
    check_cycle_free,
    check_cycle_free_except,
    classify_coupled,
    classify_index,
    kernel_bases,
    nullspace,
    numerical_rank,
    rank,
)

from conftest import CORPUS, circuit_from, random_coupled_netlist


def random_graph(rng, n_vertices=5, n_edges=8):
    """Random multigraph on the vertices ``0..n`` with ``0`` as ground."""
    edges = []
    while len(edges) < n_edges:
        i, j = rng.choice(n_vertices + 1, size=2, replace=False)
        edges.append((int(i), int(j)))
    return edges


def incidence(n_vertices, edges):
    """Grounded incidence matrix, ground ``0`` dropped."""
    A = np.zeros((n_vertices + 1, len(edges)), dtype=int)
    for k, (i, j) in enumerate(edges):
        A[i, k] = 1
        A[j, k] = -1
    return A[1:]


def multigraph(n_vertices, edges):
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(n_vertices + 1))
    graph.add_edges_from(edges)
    return graph


class TestRank:
    """Tests for ranks and kernels."""

    def test_integer_rank(self):
        """Test the exact rank of an incidence matrix."""
        A = incidence(3, [(1, 0), (2, 1), (2, 0), (3, 2)])
        assert rank(A) == 3
        assert numerical_rank(A) == 3

    def test_float_rank(self):
        """Test that non-integer matrices are ranked numerically."""
        assert rank(np.array([[1.0, 0.5], [2.0, 1.0]])) == 1

    def test_empty(self):
        """Test that empty matrices have rank zero."""
        assert rank(np.zeros((3, 0))) == 0
        assert numerical_rank(np.zeros((2, 2))) == 0

    def test_nullspace(self):
        """Test the primitive integer kernel basis."""
        N = nullspace(np.array([[1, 1, 0], [0, 1, 1]]))

        assert N.shape == (3, 1)
        assert np.array_equal(N[:, 0], [1, -1, 1])

    def test_nullspace_full_rank(self):
        """Test that injective matrices have an empty kernel."""
        assert nullspace(np.eye(3, dtype=int)).shape == (3, 0)

    def test_nullspace_requires_integers(self):
        """Test that the exact kernel rejects real matrices."""
        with pytest.raises(ValueError, match="integer matrix"):
            nullspace(np.array([[0.5, 1.0]]))

    def test_kernel_bases(self):
        """Test the kernel bases of the RC circuit."""
        bases = kernel_bases([[0], [1]], [[1], [0]])

        assert np.array_equal(bases.Z_C, [[1], [0]])
        assert np.array_equal(bases.Z_C_prime, [[0], [1]])
        assert bases.Z_VC.shape == (1, 0)


class TestGraphChecks:
    """Tests for the rank tests of cycles and cuts against networkx."""

    @pytest.mark.parametrize("n_edges", [3, 5, 8])
    def test_cycle_free(self, seed, n_edges):
        """Test that a set of branches is cycle-free iff it spans a forest."""
        rng = np.random.RandomState(seed)
        for _ in range(10):
            edges = random_graph(rng, n_edges=n_edges)
            expected = nx.is_forest(multigraph(5, edges))
            assert check_cycle_free(incidence(5, edges)) == expected

    def test_cut_free(self, seed):
        """Test that no cut lies in K iff the remaining branches connect the graph."""
        rng = np.random.RandomState(seed)
        for _ in range(10):
            edges = random_graph(rng, n_edges=9)
            in_k = rng.rand(len(edges)) < 0.3
            rest = [e for e, k in zip(edges, in_k) if not k]
            K = [e for e, k in zip(edges, in_k) if k]

            expected = nx.is_connected(multigraph(5, rest))
            assert check_cut_free(incidence(5, rest), incidence(5, K)) == expected

    def test_cut_free_shape_mismatch(self):
        """Test that the incidence matrices must have the same rows."""
        with pytest.raises(ValueError, match="row dimension"):
            check_cut_free(np.ones((2, 1)), np.ones((3, 1)))

    def test_cycle_free_except(self):
        """Test that cycles within the excepted set are allowed."""
        A_C = incidence(1, [(1, 0), (1, 0)])
        A_V = incidence(1, [(1, 0)])

        assert check_cycle_free_except(np.zeros((1, 0)), A_C)
        assert not check_cycle_free_except(A_V, A_C)
        assert check_cycle_free_except(A_V, np.zeros((1, 0)))


class TestClassify:
    """Tests for the index classification."""

    @pytest.mark.parametrize(
        "name, model, index, kinds",
        [
            ("rc", "model1", 1, set()),
            ("rc", "model2", 1, set()),
            ("ladder", "model2", 1, set()),
            ("cv_loop", "model1", 2, {"CVLoop"}),
            ("cv_loop", "model2", 2, {"CVLoop"}),
            ("c_loop", "model1", 1, set()),
            ("c_loop", "model2", 2, {"CLoop"}),
            ("li_cut", "model1", 2, {"LICut"}),
            ("li_cut", "model2", 2, {"LICut"}),
        ],
    )
    def test_corpus(self, build, name, model, index, kinds):
        """Test the index of the corpus circuits."""
        report = classify_index(build(name), model)

        assert report.model == model
        assert report.index == index
        assert report.kinds == kinds

    def test_cv_loop_witness(self, build):
        """Test the branches of a CV-loop."""
        report = classify_index(build("cv_loop"))
        assert report.defects == [Defect("CVLoop", ["C1", "V1"], [])]

    def test_li_cut_witness(self, build):
        """Test the branches and vertices of an LI-cut."""
        report = classify_index(build("li_cut"))
        assert report.defects == [Defect("LICut", ["L1", "I1"], ["2"])]

    def test_unknown_model(self, build):
        """Test that an unknown model raises."""
        with pytest.raises(ValueError, match="Unknown model"):
            classify_index(build("rc"), "model3")

    def test_json(self, build):
        """Test the JSON dump of a report."""
        report = classify_index(build("li_cut"), "model2")
        data = json.loads(report.to_json())

        assert data == {
            "model": "model2",
            "index": 2,
            "defects": [{"kind": "LICut", "edges": ["L1", "I1"], "vertices": ["2"]}],
        }

    def test_equality(self):
        """Test report equality."""
        assert IndexReport("model1", 1) == IndexReport("model1", 1, [])
        assert IndexReport("model1", 1) != IndexReport("model2", 1)


def branch_graph(circuit, kinds):
    """Undirected multigraph of the branches of the given kinds, all vertices included."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(circuit.graph.nodes)
    graph.add_edges_from((e.tail, e.head) for e in circuit.edges if e.kind in kinds)
    return graph


def model1_oracle(circuit):
    """Index of model 1: the voltage sources must form a forest once the
    components of the capacitance graph are contracted, and there is no LI-cut."""
    component = {}
    for i, vertices in enumerate(nx.connected_components(branch_graph(circuit, "C"))):
        component.update({v: i for v in vertices})

    contracted = nx.MultiGraph()
    contracted.add_nodes_from(set(component.values()))
    contracted.add_edges_from(
        (component[e.tail], component[e.head]) for e in circuit.edges if e.kind in "VK"
    )

    index_one = nx.is_forest(contracted) and nx.is_connected(branch_graph(circuit, "CRVK"))
    return 1 if index_one else 2


def model2_oracle(circuit):
    """Index of model 2: no cycle of capacitances and voltage sources, no LI-cut."""
    index_one = nx.is_forest(branch_graph(circuit, "CVK")) and nx.is_connected(
        branch_graph(circuit, "CRVK")
    )
    return 1 if index_one else 2


class TestRandomCorpus:
    """Tests of the index classification over random sound circuits."""

    def test_model1_oracle(self, random_corpus):
        """Test model 1 against contracted capacitance components found with networkx."""
        verdicts = [classify_index(c, "model1").index == model1_oracle(c) for _, c in random_corpus]

        assert len(verdicts) == 200
        assert all(verdicts)

    def test_model2_oracle(self, random_corpus):
        """Test model 2 against cycles of C, V and cuts of L, I found with networkx."""
        for _, circuit in random_corpus:
            assert classify_index(circuit, "model2").index == model2_oracle(circuit)

    def test_both_indices_occur(self, random_corpus):
        """Test that the random corpus contains circuits of index one and two."""
        indices = {classify_index(c, "model2").index for _, c in random_corpus}
        assert indices == {1, 2}

    def test_model_order(self, random_corpus):
        """Test that model 1 never has a higher index than model 2."""
        for _, circuit in random_corpus:
            assert classify_index(circuit, "model1").index <= classify_index(circuit, "model2").index

    @pytest.mark.parametrize("model", ["model1", "model2"])
    def test_declaration_order(self, random_corpus, model):
        """Test that the index does not depend on the order of the netlist lines."""
        rng = np.random.RandomState(42)
        for text, circuit in random_corpus:
            lines = text.split("\n")
            shuffled = circuit_from("\n".join(lines[i] for i in rng.permutation(len(lines))))

            assert classify_index(shuffled, model).index == classify_index(circuit, model).index


class TestClassifyCoupled:
    """Tests for the index of coupled circuits."""

    def test_two_rc(self, two_rc):
        """Test the three perspectives on two coupled RC blocks."""
        report = classify_coupled(phc.split_circuit(two_rc))

        assert report.index_one == {"C1": True, "C2": True, "C3": False}
        assert report.c3[0].defects == [Defect("CVLoop", ["C1", "K1"], [])]
        assert report.c3[1].index == 1

    def test_three_rc(self, build):
        """Test that the star layout has a joint system of index one."""
        report = classify_coupled(phc.split_circuit(build("three_rc")))

        assert report.c1.index == 1
        assert len(report.c2) == len(report.c3) == 3

    def test_dict(self, two_rc):
        """Test the dictionary representation."""
        data = classify_coupled(phc.split_circuit(two_rc)).to_dict()

        assert set(data) == {"C1", "C2", "C3", "index_one"}
        assert data["C1"]["model"] == "model1"
        assert json.dumps(data)

    def test_grounded_through_resistance(self):
        """Test two RC blocks whose capacitances are grounded through resistances."""
        circuit = circuit_from(
            """
            .partition 1 1 a c
            .partition 2 b m
            V1 1 0 DC 1
            R1 1 a R=1
            C1 a c C=1
            R3 c 0 R=1
            C2 b m C=1
            R2 m 0 R=1
            K1 a b
            """
        )
        report = classify_coupled(phc.split_circuit(circuit))

        assert report.index_one == {"C1": True, "C2": True, "C3": True}

    def test_empty_coupling(self):
        """Test that without coupling branches (C1) is the index of the whole circuit."""
        circuit = circuit_from(
            """
            .partition 1 1 a
            .partition 2 b
            V1 1 0 DC 1
            R1 1 a R=1
            C1 a 0 C=1
            V2 b 0 DC 1
            C2 b 0 C=1
            R2 b 0 R=1
            """
        )
        partitioned = phc.split_circuit(circuit)
        report = classify_coupled(partitioned)

        assert partitioned.k == 2
        assert report.c1 == classify_index(circuit, "model1")
        assert report.c1.index == 2
        assert report.c1.defects == [Defect("CVLoop", ["C2", "V2"], [])]

    def test_c3_implies_c1(self):
        """Test over random coupled circuits that (C3) of every subsystem implies (C1)."""
        checked = 0
        for seed in range(200):
            try:
                partitioned = phc.split_circuit(
                    circuit_from(random_coupled_netlist(np.random.RandomState(seed)))
                )
            except (phc.CircuitError, phc.PartitionError):
                continue

            report = classify_coupled(partitioned)
            if report.index_one["C3"]:
                assert report.index_one["C1"]
                checked += 1

        assert checked >= 10
