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
Pytest configuration file for PHCircuit test suite.
"""
import os

import pytest
import numpy as np

import phcircuit as phc
from phcircuit.circuit_graph import CircuitError

# defaults
TOL = 1e-6


#: netlists used throughout the test suite; all of them are sound
CORPUS = {
    "rc": """
        .title RC charging
        V1 1 0 DC 1
        R1 1 2 R=1
        C1 2 0 C=1
    """,
    "lc": """
        C1 1 0 C=1
        L1 1 0 L=1
    """,
    "rlc_sin": """
        V1 1 0 SIN 1 2
        R1 1 2 R=0.5
        L1 2 3 L=0.1
        C1 3 0 C=0.2
    """,
    "current_driven": """
        I1 0 1 DC 1
        R1 1 0 R=2
        C1 1 0 C=0.5
    """,
    "cv_loop": """
        V1 1 0 DC 1
        C1 1 0 C=1
        R1 1 0 R=1
    """,
    "c_loop": """
        C1 1 0 C=1
        C2 1 0 C=2
        R1 1 0 R=1
    """,
    "li_cut": """
        R1 1 0 R=1
        L1 1 2 L=1
        I1 2 0 DC 1
    """,
    "ladder": """
        V1 1 0 DC 2
        R1 1 2 R=1
        C1 2 0 C=1
        R2 2 3 R=1
        C2 3 0 C=1
        L1 3 4 L=0.5
        R3 4 0 R=2
    """,
    "nonlinear": """
        V1 1 0 SIN 1 1
        R1 1 2 G=poly:1,0.5
        C1 2 0 Q=poly:1,0.2
        L1 2 3 PHI=poly:0.5,0.1
        R2 3 0 G=diode:0.01,0.5
    """,
    "bridge": """
        V1 1 0 DC 1
        R1 1 2 R=1
        R2 1 3 R=2
        C1 2 0 C=1
        C2 3 0 C=1
        R3 2 3 R=3
    """,
    "inductive_source": """
        I1 0 1 SIN 0.5 1
        L1 1 0 L=1
        R1 1 2 R=1
        C1 2 0 C=1
    """,
    "two_rc": """
        .title two RC blocks
        .partition 1 1 a
        .partition 2 b m
        V1 1 0 DC 1
        R1 1 a R=1
        C1 a 0 C=1
        R2 b m R=1
        C2 m 0 C=1
        K1 a b
    """,
    "three_rc": """
        .partition 1 1 a
        .partition 2 c
        .partition 3 d e f
        V1 1 0 DC 1
        R1 1 a R=1
        C1 a 0 C=1
        C2 c 0 C=1
        R2 c 0 R=2
        R3 d f R=1
        R4 e f R=1
        C3 f 0 C=1
        K1 a d
        K2 c e
    """,
}

#: the unpartitioned netlists
SINGLE = [name for name, text in CORPUS.items() if ".partition" not in text]


@pytest.fixture(scope="session")
def tol():
    """Numerical tolerance for equality tests."""
    return float(os.environ.get("TOL", TOL))


@pytest.fixture(scope="session", params=[4, 7])
def seed(request):
    """Different seeds."""
    return request.param


@pytest.fixture(scope="session")
def corpus():
    """The netlist corpus."""
    return CORPUS


def circuit_from(text):
    """Parse a netlist and build its circuit."""
    return phc.build_circuit(phc.parse_netlist(text))


@pytest.fixture(scope="session")
def build():
    """Builds the circuit of a corpus entry."""
    return lambda name: circuit_from(CORPUS[name])


@pytest.fixture(scope="session")
def two_rc():
    """Two RC blocks joined by one coupling branch."""
    return circuit_from(CORPUS["two_rc"])


def random_branches(rng, n_vertices=4, n_branches=6):
    """Random netlist with branches of every kind between arbitrary vertices.

    Only the first branch is tied to the ground. Voltage sources may close
    cycles, current sources may form cuts and the graph may fall apart.
    """
    lines = []
    for b in range(n_branches):
        kind = rng.choice(list("RCLVI"), p=[0.25, 0.25, 0.2, 0.15, 0.15])
        if b == 0:
            i, j = 1 + rng.randint(n_vertices), 0
        else:
            i, j = rng.choice(n_vertices + 1, size=2, replace=False)

        if kind in "VI":
            value = "DC {}".format(1 + rng.randint(3))
        else:
            value = "{}={}".format(kind, 0.5 + rng.randint(4))
        lines.append("{}{} {} {} {}".format(kind, b, i, j, value))

    return "\n".join(lines)


def sound_random_netlists(count=200):
    """The first ``count`` netlists of :func:`random_branches` that are sound."""
    texts = []
    seed = 0
    while len(texts) < count:
        text = random_branches(np.random.RandomState(seed))
        seed += 1
        try:
            circuit_from(text)
        except CircuitError:
            continue
        texts.append(text)
    return texts


@pytest.fixture(scope="session")
def random_corpus():
    """Sound random netlists together with their circuits."""
    return [(text, circuit_from(text)) for text in sound_random_netlists()]


def random_coupled_netlist(rng, n_vertices=3, n_branches=3):
    """Random netlist of two or three partitions joined by coupling branches.

    A tree of resistances ties every partition to the ground. Each coupling
    branch joins a vertex of an earlier partition to one of the last.
    """
    k = 2 + rng.randint(2)
    lines = []
    groups = []

    for p in range(1, k + 1):
        vertices = ["p{}n{}".format(p, v) for v in range(1, n_vertices + 1)]
        nodes = ["0"] + vertices
        groups.append(vertices)
        lines.append(".partition {} {}".format(p, " ".join(vertices)))

        for v in range(1, n_vertices + 1):
            parent = nodes[rng.randint(v)]
            lines.append("R{}t{} {} {} R={}".format(p, v, parent, nodes[v], 1 + rng.randint(4)))

        for b in range(n_branches):
            i, j = rng.choice(n_vertices + 1, size=2, replace=False)
            kind = rng.choice(list("RCLVI"), p=[0.2, 0.35, 0.2, 0.15, 0.1])
            value = "DC 1" if kind in "VI" else "{}={}".format(kind, 0.5 + rng.randint(4))
            lines.append("{}{}x{} {} {} {}".format(kind, p, b, nodes[i], nodes[j], value))

    for c in range(1 + rng.randint(2)):
        first = groups[rng.randint(k - 1)]
        last = groups[-1]
        lines.append(
            "K{} {} {}".format(c, first[rng.randint(n_vertices)], last[rng.randint(n_vertices)])
        )

    return "\n".join(lines)
