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
This module contains the rank-based graph tests and the differentiation-index
classification of circuit equations.

Cycles and cuts of a grounded circuit graph are characterized by the kernels
of its incidence matrices. For a set of branches :math:`\mathcal{K}` with
incidence matrix :math:`A_K` and the remaining branches :math:`A_{rest}`:

* the graph has no cut consisting only of branches in :math:`\mathcal{K}` iff
  :math:`\ker A_{rest}^T = \{0\}`,
* the graph has no cycle consisting only of branches in :math:`\mathcal{K}` iff
  :math:`\ker A_K = \{0\}`,
* the graph has no cycle of branches in :math:`\mathcal{K}` except for cycles
  of branches in :math:`\mathcal{L}\subset\mathcal{K}` iff
  :math:`\{x \mid A_{K-L}x\in\operatorname{im}A_L\} = \{0\}`.

Incidence matrices are integer matrices, so ranks and kernels are computed
exactly with fraction-free elimination; a floating point rank from a
column-pivoted QR factorization is available as a cross-check.
"""
from collections import namedtuple
from fractions import Fraction
from functools import reduce
import json
import logging as log
import math

import numpy as np
import scipy.linalg

log.getLogger()


MODEL1 = "model1"
MODEL2 = "model2"
MODELS = (MODEL1, MODEL2)


def _is_integral(matrix):
    return matrix.size == 0 or bool(np.all(np.isfinite(matrix)) and np.all(matrix == np.round(matrix)))


def _bareiss_rank(matrix):
    """Exact rank of an integer matrix by fraction-free (Bareiss) elimination."""
    rows = [[int(v) for v in row] for row in np.asarray(matrix)]
    m = len(rows)
    n = len(rows[0]) if m else 0

    rank = 0
    prev = 1
    for col in range(n):
        pivot = next((r for r in range(rank, m) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, m):
            rows[r] = [(p * rows[r][c] - rows[r][col] * rows[rank][c]) // prev for c in range(n)]
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def numerical_rank(matrix):
    r"""Numerical rank via a column-pivoted QR factorization.

    Diagonal entries of :math:`R` above :math:`\tau = \max(m,n)\,\varepsilon\,\sigma_{\max}`
    are counted.

    Args:
        matrix (array): a real matrix

    Returns:
        int: the numerical rank
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))

    if matrix.size == 0:
        return 0

    sigma_max = np.linalg.norm(matrix, 2)
    if sigma_max == 0:
        return 0

    r = scipy.linalg.qr(matrix, mode="r", pivoting=True)[0]
    tau = max(matrix.shape) * np.finfo(float).eps * sigma_max
    return int(np.sum(np.abs(np.diag(r)) > tau))


def rank(matrix):
    """Rank of a matrix.

    Integer matrices are ranked exactly; other matrices numerically with
    :func:`numerical_rank`.

    Args:
        matrix (array): a real matrix

    Returns:
        int: the rank
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))

    if matrix.size == 0:
        return 0

    if not _is_integral(matrix):
        return numerical_rank(matrix)

    exact = _bareiss_rank(matrix)
    if max(matrix.shape) <= 200:
        approx = numerical_rank(matrix)
        if approx != exact:
            log.debug("Exact rank %d differs from numerical rank %d.", exact, approx)
    return exact


def has_full_column_rank(matrix):
    """Whether the columns of ``matrix`` are linearly independent.

    A matrix without columns has full column rank.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim < 2 or matrix.shape[1] == 0:
        return True
    return rank(matrix) == matrix.shape[1]


def _rref(matrix):
    """Reduced row echelon form over the rationals; returns rows and pivot columns."""
    rows = [[Fraction(int(v)) for v in row] for row in np.asarray(matrix)]
    m = len(rows)
    n = matrix.shape[1]
    pivots = []

    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][col]
        rows[r] = [v / p for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return rows, pivots


def _integer_vector(vec):
    """Scale a rational vector to a primitive integer vector."""
    denom = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in vec), 1)
    ints = [int(v * denom) for v in vec]
    g = reduce(math.gcd, (abs(v) for v in ints), 0) or 1
    return [v // g for v in ints]


def nullspace(matrix):
    """Exact kernel basis of an integer matrix.

    Each basis vector is a primitive integer vector with a single free
    variable equal to one (up to scaling), i.e. the basis read off the reduced
    row echelon form.

    Args:
        matrix (array[int]): an ``m x n`` integer matrix

    Returns:
        array[int]: an ``n x d`` matrix whose columns span the kernel
    """
    matrix = np.atleast_2d(np.asarray(matrix))
    m, n = matrix.shape

    if n == 0:
        return np.zeros((0, 0), dtype=int)

    if m == 0:
        return np.eye(n, dtype=int)

    if not _is_integral(matrix):
        raise ValueError("nullspace() requires an integer matrix.")

    rows, pivots = _rref(matrix)
    free = [c for c in range(n) if c not in pivots]

    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            vec[p] = -row[f]
        basis.append(_integer_vector(vec))

    if not basis:
        return np.zeros((n, 0), dtype=int)
    return np.array(basis, dtype=int).T


def column_basis(matrix):
    """Linearly independent columns of an integer matrix spanning its image."""
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.size == 0:
        return np.zeros((matrix.shape[0], 0), dtype=int)
    _, pivots = _rref(matrix)
    return np.asarray(matrix[:, pivots], dtype=int)


def minimal_support(basis, mask=None):
    """Pick the basis column with the smallest support.

    Args:
        basis (array): matrix whose columns are candidate vectors
        mask (array[bool]): if given, only columns with a nonzero entry on the
            masked coordinates are considered

    Returns:
        array or None: the selected vector, or ``None`` if no column qualifies
    """
    best = None
    for vec in np.asarray(basis).T:
        if mask is not None and not np.any(vec[mask]):
            continue
        if best is None or np.count_nonzero(vec) < np.count_nonzero(best):
            best = vec
    return best


def _hstack(rows, *blocks):
    blocks = [np.asarray(b).reshape(rows, -1) for b in blocks]
    if not blocks:
        return np.zeros((rows, 0), dtype=int)
    return np.hstack(blocks)


def check_cut_free(A_rest, A_K):
    r"""Test that no cut consists only of branches in :math:`\mathcal{K}`.

    Args:
        A_rest (array): incidence matrix of all branches not in :math:`\mathcal{K}`
        A_K (array): incidence matrix of the branches in :math:`\mathcal{K}`

    Returns:
        bool: ``True`` iff :math:`\ker A_{rest}^T = \{0\}`
    """
    A_rest = np.atleast_2d(np.asarray(A_rest))
    A_K = np.atleast_2d(np.asarray(A_K))

    if A_K.size and A_rest.shape[0] != A_K.shape[0]:
        raise ValueError(
            "Incidence matrices must share the row dimension, got {} and {}.".format(
                A_rest.shape[0], A_K.shape[0]
            )
        )

    if A_rest.shape[0] == 0:
        return True

    return has_full_column_rank(A_rest.T)


def check_cycle_free(A_K):
    r"""Test that no cycle consists only of branches in :math:`\mathcal{K}`.

    Returns:
        bool: ``True`` iff :math:`\ker A_K = \{0\}`
    """
    return has_full_column_rank(A_K)


def check_cycle_free_except(A_KminusL, A_L):
    r"""Test that every cycle of branches in :math:`\mathcal{K}` lies in :math:`\mathcal{L}`.

    Args:
        A_KminusL (array): incidence matrix of :math:`\mathcal{K}\setminus\mathcal{L}`
        A_L (array): incidence matrix of :math:`\mathcal{L}`

    Returns:
        bool: ``True`` iff :math:`\{x \mid A_{K-L}x\in\operatorname{im}A_L\} = \{0\}`
    """
    A_KminusL = np.atleast_2d(np.asarray(A_KminusL))
    A_L = np.atleast_2d(np.asarray(A_L))
    rows = A_KminusL.shape[0]

    if A_KminusL.shape[1] == 0:
        return True

    joint = _hstack(rows, A_L, A_KminusL)
    return rank(joint) - rank(_hstack(rows, A_L)) == A_KminusL.shape[1]


KernelBases = namedtuple("KernelBases", ["Z_C", "Z_C_prime", "Z_VC"])
r"""Kernel bases used by the index analysis.

Args:
    Z_C (array[int]): full column rank, :math:`\operatorname{im}Z_C = \ker A_C^T`
    Z_C_prime (array[int]): full column rank, :math:`\operatorname{im}Z'_C = \operatorname{im}A_C`
    Z_VC (array[int]): full column rank, :math:`\operatorname{im}Z_{V-C} = \ker A_V^T Z_C`
"""


def kernel_bases(A_C, A_V):
    """Compute the kernel bases :math:`Z_C`, :math:`Z'_C` and :math:`Z_{V-C}`.

    Args:
        A_C (array[int]): capacitance incidence matrix
        A_V (array[int]): voltage-source incidence matrix

    Returns:
        KernelBases: the bases, as integer matrices
    """
    A_C = np.atleast_2d(np.asarray(A_C, dtype=int))
    A_V = np.atleast_2d(np.asarray(A_V, dtype=int))
    n_v = A_C.shape[0]

    if A_C.shape[1] == 0:
        Z_C = np.eye(n_v, dtype=int)
    else:
        Z_C = nullspace(A_C.T)

    Z_C_prime = column_basis(A_C) if A_C.shape[1] else np.zeros((n_v, 0), dtype=int)

    A_V = A_V.reshape(n_v, -1)
    if Z_C.shape[1] == 0:
        Z_VC = np.zeros((0, 0), dtype=int)
    elif A_V.shape[1] == 0:
        Z_VC = np.eye(Z_C.shape[1], dtype=int)
    else:
        Z_VC = nullspace(A_V.T @ Z_C)

    return KernelBases(Z_C, Z_C_prime, Z_VC)


Defect = namedtuple("Defect", ["kind", "edges", "vertices"])
"""A topological cause of index two.

Args:
    kind (str): ``"CVLoop"``, ``"CLoop"`` or ``"LICut"``
    edges (list[str]): names of the branches forming the loop or cut
    vertices (list[str]): vertices carrying the kernel vector
"""


class IndexReport:
    """Result of the differentiation-index classification.

    Args:
        model (str): ``"model1"`` or ``"model2"``
        index (int): the differentiation index (0, 1 or 2)
        defects (list[Defect]): witnesses of index two; empty iff ``index <= 1``
    """

    def __init__(self, model, index, defects=()):
        self.model = model
        self.index = index
        self.defects = list(defects)

    def __repr__(self):
        return "<IndexReport: model={}, index={}, defects={}>".format(
            self.model, self.index, [d.kind for d in self.defects]
        )

    def __eq__(self, other):
        return (
            isinstance(other, IndexReport)
            and self.model == other.model
            and self.index == other.index
            and self.defects == other.defects
        )

    @property
    def kinds(self):
        """set[str]: kinds of the reported defects"""
        return {d.kind for d in self.defects}

    def to_dict(self):
        """Dictionary in the JSON schema ``{model, index, defects: [{kind, edges, vertices}]}``."""
        return {
            "model": self.model,
            "index": self.index,
            "defects": [
                {"kind": d.kind, "edges": list(d.edges), "vertices": list(d.vertices)}
                for d in self.defects
            ],
        }

    def to_json(self, **kwargs):
        """Serialize :meth:`to_dict` as JSON."""
        return json.dumps(self.to_dict(), **kwargs)


TopologyBlocks = namedtuple("TopologyBlocks", ["vertices", "incidence", "names"])
"""Incidence data needed for the classification.

Args:
    vertices (list[str]): non-ground vertex names (rows)
    incidence (dict[str, array]): incidence matrices for the kinds ``C``, ``R``, ``L``, ``V``, ``I``
    names (dict[str, list[str]]): branch names per kind (columns)
"""


def _support(names, vec):
    return [names[i] for i in np.flatnonzero(vec)]


def _li_cut(blocks):
    """LI-cut defect, or ``None``."""
    inc, names = blocks.incidence, blocks.names
    n_v = len(blocks.vertices)
    rest = _hstack(n_v, inc["C"], inc["R"], inc["V"])

    if check_cut_free(rest, _hstack(n_v, inc["L"], inc["I"])):
        return None

    w = minimal_support(nullspace(rest.T))
    edges = _support(names["L"], inc["L"].T @ w) + _support(names["I"], inc["I"].T @ w)
    return Defect("LICut", edges, _support(blocks.vertices, w))


def _cv_loops(blocks, kinds):
    """CV-loop and C-loop witnesses read off :math:`\\ker (A_C\\, A_V)`."""
    inc, names = blocks.incidence, blocks.names
    n_v = len(blocks.vertices)
    n_C = inc["C"].shape[1]
    joint = _hstack(n_v, inc["C"], inc["V"])

    if joint.shape[1] == 0:
        return []

    basis = nullspace(joint)
    all_names = list(names["C"]) + list(names["V"])
    v_mask = np.arange(joint.shape[1]) >= n_C

    found = []
    if "CVLoop" in kinds:
        vec = minimal_support(basis, v_mask)
        if vec is not None:
            found.append(Defect("CVLoop", _support(all_names, vec), []))

    if "CLoop" in kinds:
        c_only = [v for v in basis.T if not np.any(v[v_mask])]
        if c_only:
            vec = minimal_support(np.array(c_only).T)
            found.append(Defect("CLoop", _support(all_names, vec), []))

    return found


def classify_blocks(blocks, model=MODEL1):
    """Classify the index of the circuit equations given by incidence blocks.

    Voltage-like branches (including virtual coupling sources) must be part
    of ``blocks.incidence["V"]``; current-like branches of ``["I"]``.

    Args:
        blocks (TopologyBlocks): incidence data
        model (str): ``"model1"`` (charge/flux MNA) or ``"model2"``

    Returns:
        IndexReport: the classification
    """
    if model not in MODELS:
        raise ValueError("Unknown model '{}'; choose one of {}.".format(model, ", ".join(MODELS)))

    inc = blocks.incidence
    n_v = len(blocks.vertices)

    if n_v == 0:
        return IndexReport(model, 0)

    defects = []

    if model == MODEL1:
        Z_C = kernel_bases(inc["C"], inc["V"]).Z_C
        A_V = np.asarray(inc["V"]).reshape(n_v, -1)
        if A_V.shape[1] and not has_full_column_rank(Z_C.T @ A_V):
            defects.extend(_cv_loops(blocks, ("CVLoop",)))
    else:
        if not check_cycle_free(_hstack(n_v, inc["C"], inc["V"])):
            defects.extend(_cv_loops(blocks, ("CVLoop", "CLoop")))

    li_cut = _li_cut(blocks)
    if li_cut is not None:
        defects.append(li_cut)

    report = IndexReport(model, 2 if defects else 1, defects)
    log.debug("Index classification: %s", report)
    return report


def classify_index(circuit, model=MODEL1):
    """Classify the differentiation index of a circuit's MNA equations.

    Model 2 has index one iff the circuit contains neither cycles of
    capacitances and/or voltage sources nor cuts of inductances and/or
    current sources. Model 1 has index one iff it contains neither cycles of
    capacitances *and* voltage sources (:math:`\\ker Z_C^T A_V = \\{0\\}`) nor
    such cuts. Otherwise the index is two. Coupling branches count as
    voltage sources.

    Args:
        circuit (CircuitGraph): the circuit
        model (str): ``"model1"`` or ``"model2"``

    Returns:
        IndexReport: the classification with witness defects

    Raises:
        SoundnessViolation: if the circuit is not sound
    """
    circuit.check_soundness()
    return classify_blocks(circuit.topology_blocks(), model)


class CoupledIndexReport(namedtuple("CoupledIndexReport", ["c1", "c2", "c3"])):
    """Index classification of the three perspectives on a coupled circuit.

    Args:
        c1 (IndexReport): the joint system with coupling currents as states
        c2 (list[IndexReport]): per subsystem, coupling currents seen as given current sources
        c3 (list[IndexReport]): per subsystem, couplings seen as given voltage sources
    """

    @property
    def index_one(self):
        """dict[str, bool]: whether each perspective has index one throughout"""
        return {
            "C1": self.c1.index <= 1,
            "C2": all(r.index <= 1 for r in self.c2),
            "C3": all(r.index <= 1 for r in self.c3),
        }

    def to_dict(self):
        """Dictionary representation for the JSON analysis dump."""
        return {
            "C1": self.c1.to_dict(),
            "C2": [r.to_dict() for r in self.c2],
            "C3": [r.to_dict() for r in self.c3],
            "index_one": self.index_one,
        }


def _block_diag(mats, rows):
    mats = [np.asarray(m, dtype=int).reshape(r, -1) for m, r in zip(mats, rows)]
    if not mats:
        return np.zeros((0, 0), dtype=int)
    return scipy.linalg.block_diag(*mats).astype(int).reshape(sum(rows), -1)


def classify_coupled(partitioned):
    r"""Classify the index of the three perspectives on a partitioned circuit.

    * (C1): the joint system. Index one iff
      :math:`(\operatorname{diag}A_{C_i}, \operatorname{diag}A_{R_i},
      [\operatorname{diag}A_{V_i} \mid A_\lambda])^T` and
      :math:`\operatorname{diag}Z_{C_i}^T[\operatorname{diag}A_{V_i}\mid A_\lambda]`
      have full column rank.
    * (C2): each subsystem with the coupling currents as current sources. Index
      one iff :math:`Z_{C_i}^T A_{V_i}` and :math:`(A_{C_i}, A_{R_i}, A_{V_i})^T`
      have full column rank.
    * (C3): each subsystem with the couplings as voltage sources. Index one iff
      :math:`(A_{C_i}, A_{R_i}, A_{V_i}, A_{\lambda_i})^T` and
      :math:`Z_{C_i}^T (A_{V_i}, A_{\lambda_i})` have full column rank, where only
      coupling branches touching subsystem :math:`i` are considered.

    Args:
        partitioned (PartitionedSystem): the split circuit

    Returns:
        CoupledIndexReport: the three classifications
    """
    subs = partitioned.subsystems
    coupling_names = list(partitioned.coupling_names)

    rows = [len(s.circuit.vertices) for s in subs]
    sub_blocks = [s.circuit.topology_blocks(include_coupling=False) for s in subs]

    vertices = [v for b in sub_blocks for v in b.vertices]
    joint_inc = {
        kind: _block_diag([b.incidence[kind] for b in sub_blocks], rows) for kind in "CRLI"
    }
    A_lam = (
        np.vstack([np.asarray(s.A_lambda, dtype=int).reshape(r, -1) for s, r in zip(subs, rows)])
        if subs
        else np.zeros((0, 0), dtype=int)
    )
    joint_inc["V"] = np.hstack(
        [_block_diag([b.incidence["V"] for b in sub_blocks], rows), A_lam.reshape(sum(rows), -1)]
    )
    joint_names = {kind: [n for b in sub_blocks for n in b.names[kind]] for kind in "CRLI"}
    joint_names["V"] = [n for b in sub_blocks for n in b.names["V"]] + coupling_names

    c1 = classify_blocks(TopologyBlocks(vertices, joint_inc, joint_names), MODEL1)

    c2 = [classify_blocks(b, MODEL1) for b in sub_blocks]

    c3 = []
    for sub, b in zip(subs, sub_blocks):
        A = np.asarray(sub.A_lambda, dtype=int).reshape(len(b.vertices), -1)
        touching = [j for j in range(A.shape[1]) if np.any(A[:, j])]
        inc = dict(b.incidence)
        inc["V"] = np.hstack([np.asarray(inc["V"]).reshape(len(b.vertices), -1), A[:, touching]])
        names = dict(b.names)
        names["V"] = list(names["V"]) + [coupling_names[j] for j in touching]
        c3.append(classify_blocks(TopologyBlocks(b.vertices, inc, names), MODEL1))

    report = CoupledIndexReport(c1, c2, c3)
    log.info("Coupled index classification: %s", report.index_one)
    return report
