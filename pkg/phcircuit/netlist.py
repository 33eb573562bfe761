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
This module contains the netlist parser and printer.

A netlist holds one element per line, with the kind inferred from the first
letter of the element name:

.. code-block:: none

    * two RC blocks joined by a coupling branch
    .partition 1 n1 a
    .partition 2 b m
    V1 n1 0 DC 1
    R1 n1 a R=1
    C1 a 0 C=1
    R2 b m R=10
    C2 m 0 Q=poly:1,0.1
    K1 a@1 b@2
    .end

Supported element lines:

* ``R<name> <n+> <n-> R=<val> | G=poly:<c1>,<c3> | G=diode:<Is>,<Vt>``
* ``C<name> <n+> <n-> C=<val> | Q=poly:<c1>,<c3>``
* ``L<name> <n+> <n-> L=<val> | PHI=poly:<c1>,<c3>``
* ``V<name> <n+> <n-> DC <val> | SIN <amp> <freq> [phase]`` (phase in radians)
* ``I<name> <n+> <n-> DC <val> | SIN <amp> <freq> [phase]``
* ``K<name> <vertex>[@<part>] <vertex>[@<part>]`` (coupling branch)

and directives ``.partition <id> <vertex>...``, ``.ground <vertex>``,
``.title <text>`` and ``.end``. Lines starting with ``*`` or ``#`` are
comments, as is everything following a ``#`` on an element line.
Vertex ``0`` is the ground unless a ``.ground`` directive names another one.
"""
from collections import namedtuple, OrderedDict
import logging as log
import math
import re

from .laws import LawError, LawSpec, law_from_spec

log.getLogger()


#: str: element kinds in the order used for printing incidence blocks
ELEMENT_KINDS = "RCLVIK"


class NetlistError(Exception):
    """Base class of all netlist errors.

    Args:
        message (str): the diagnostic
        line (int): 1-based line number of the offending token
        column (int): 1-based column of the offending token
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column

        if line is not None:
            message = "line {}, column {}: {}".format(line, column, message)

        super().__init__(message)


class NetlistSyntaxError(NetlistError):
    """Exception raised for malformed tokens, self-loops and invalid law parameters."""


class DuplicateNameError(NetlistError):
    """Exception raised when two elements share a name."""


class UnknownVertexError(NetlistError):
    """Exception raised when a directive references a vertex no element uses."""


class MissingGroundError(NetlistError):
    """Exception raised when the netlist has no ground vertex."""


SourceSpec = namedtuple("SourceSpec", ["shape", "params"])
"""Time signal of an independent source.

Args:
    shape (str): ``"DC"`` or ``"SIN"``
    params (tuple[float]): ``(value,)`` or ``(amplitude, frequency, phase)``
"""


def source_value(source, t):
    r"""Evaluate a source signal at time ``t``.

    ``DC`` sources are constant; ``SIN`` sources evaluate
    :math:`a \sin(2\pi f t + \varphi)`.

    Args:
        source (SourceSpec): the source description
        t (float): time in seconds

    Returns:
        float: the source value
    """
    if source.shape == "DC":
        return source.params[0]

    amp, freq, phase = source.params
    return amp * math.sin(2 * math.pi * freq * t + phase)


ElementDecl = namedtuple("ElementDecl", ["name", "kind", "nodes", "law", "source"])
"""A single element line of a netlist.

Args:
    name (str): unique element name
    kind (str): one of ``R``, ``C``, ``L``, ``V``, ``I``, ``K``
    nodes (tuple[str]): ``(n+, n-)``, the vertices the branch leaves and enters
    law (LawSpec or None): constitutive law of ``R``, ``C`` and ``L`` elements
    source (SourceSpec or None): time signal of ``V`` and ``I`` elements
"""


Netlist = namedtuple("Netlist", ["title", "ground", "elements", "partitions"])
"""A parsed and validated netlist.

Args:
    title (str): the netlist title (may be empty)
    ground (str): name of the ground vertex
    elements (tuple[ElementDecl]): the elements in declaration order
    partitions (OrderedDict[str, int]): partition id of every non-ground vertex,
        in vertex declaration order
"""


def netlist_vertices(netlist):
    """Non-ground vertices of a netlist in declaration order.

    Args:
        netlist (Netlist): the netlist

    Returns:
        list[str]: vertex names
    """
    seen = OrderedDict()
    for el in netlist.elements:
        for node in el.nodes:
            if node != netlist.ground:
                seen.setdefault(node, None)
    return list(seen)


_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

_LAW_KEYS = {"R": ("R", "G"), "C": ("C", "Q"), "L": ("L", "PHI")}


def _tokens(line):
    """Split a line into ``(token, column)`` pairs, dropping inline comments."""
    result = []
    for match in re.finditer(r"\S+", line):
        if match.group().startswith("#"):
            break
        result.append((match.group(), match.start() + 1))
    return result


def _number(token, lineno, col, what="value"):
    if not _NUMBER.match(token):
        raise NetlistSyntaxError("expected a number for the {}, got '{}'".format(what, token), lineno, col)
    return float(token)


def _parse_law(kind, token, lineno, col):
    """Parse a ``key=value`` law token into a :class:`LawSpec`."""
    if "=" not in token:
        raise NetlistSyntaxError("expected a law of the form key=value, got '{}'".format(token), lineno, col)

    key, value = token.split("=", 1)
    key = key.upper()

    if key not in _LAW_KEYS[kind]:
        raise NetlistSyntaxError(
            "law key '{}' is not valid for a {} element".format(key, kind), lineno, col
        )

    if key in ("R", "C", "L"):
        return LawSpec(key, "linear", (_number(value, lineno, col, key),))

    if ":" not in value:
        raise NetlistSyntaxError(
            "expected <family>:<params> after '{}=', got '{}'".format(key, value), lineno, col
        )

    family, params = value.split(":", 1)
    family = family.lower()

    if family not in ("poly", "diode") or (family == "diode" and kind != "R"):
        raise NetlistSyntaxError("unknown law family '{}' for a {} element".format(family, kind), lineno, col)

    params = tuple(_number(p, lineno, col, "law parameter") for p in params.split(","))
    if len(params) != 2:
        raise NetlistSyntaxError(
            "the {} family takes two parameters, got {}".format(family, len(params)), lineno, col
        )

    return LawSpec(key, family, params)


def _parse_source(tokens, lineno):
    """Parse the ``DC <val>`` or ``SIN <amp> <freq> [phase]`` tail of a source line."""
    if not tokens:
        raise NetlistSyntaxError("missing source specification (DC or SIN)", lineno, 1)

    shape, col = tokens[0]
    shape = shape.upper()
    values = [_number(tok, lineno, c) for tok, c in tokens[1:]]

    if shape == "DC":
        if len(values) != 1:
            raise NetlistSyntaxError("DC sources take exactly one value", lineno, col)
        return SourceSpec("DC", tuple(values))

    if shape == "SIN":
        if len(values) not in (2, 3):
            raise NetlistSyntaxError("SIN sources take an amplitude, a frequency and an optional phase", lineno, col)
        if len(values) == 2:
            values.append(0.0)
        return SourceSpec("SIN", tuple(values))

    raise NetlistSyntaxError("unknown source shape '{}'".format(tokens[0][0]), lineno, col)


def _split_vertex(token, lineno, col, coupling):
    """Split a ``vertex[@part]`` token."""
    if "@" not in token:
        return token, None

    if not coupling:
        raise NetlistSyntaxError(
            "partition annotations are only allowed on coupling branches", lineno, col
        )

    vertex, part = token.split("@", 1)
    if not vertex or not part.isdigit() or int(part) < 1:
        raise NetlistSyntaxError("malformed annotated vertex '{}'".format(token), lineno, col)

    return vertex, int(part)


def parse_netlist(text):
    """Parse a netlist.

    Args:
        text (str): the netlist text

    Returns:
        Netlist: the validated netlist

    Raises:
        NetlistSyntaxError: on a malformed line, a self-loop or invalid law parameters
        DuplicateNameError: if two elements share a name
        UnknownVertexError: if a ``.partition`` directive names an unused vertex
        MissingGroundError: if no element touches the ground vertex
    """
    # pylint: disable=too-many-locals,too-many-branches,too-many-statements
    title = ""
    ground = "0"
    ground_pos = None
    elements = []
    positions = {}
    annotations = OrderedDict()

    def annotate(vertex, part, lineno, col):
        if annotations.get(vertex, (part,))[0] != part:
            raise NetlistSyntaxError(
                "vertex '{}' is assigned to partitions {} and {}".format(vertex, annotations[vertex][0], part),
                lineno,
                col,
            )
        annotations[vertex] = (part, lineno, col)

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()

        if not stripped or stripped[0] in "*#":
            continue

        tokens = _tokens(line)
        head, col = tokens[0]

        if head.startswith("."):
            directive = head.lower()

            if directive == ".end":
                break

            if directive == ".title":
                title = line[line.index(head) + len(head):].strip()
                continue

            if directive == ".ground":
                if len(tokens) != 2:
                    raise NetlistSyntaxError(".ground takes exactly one vertex", lineno, col)
                if ground_pos is not None:
                    raise NetlistSyntaxError(
                        "a second .ground directive (first on line {})".format(ground_pos[0]), lineno, col
                    )
                ground = tokens[1][0]
                ground_pos = (lineno, tokens[1][1])
                continue

            if directive == ".partition":
                if len(tokens) < 3:
                    raise NetlistSyntaxError(".partition takes an id and at least one vertex", lineno, col)
                part_tok, part_col = tokens[1]
                if not part_tok.isdigit() or int(part_tok) < 1:
                    raise NetlistSyntaxError(
                        "partition ids are positive integers, got '{}'".format(part_tok), lineno, part_col
                    )
                for vertex, vcol in tokens[2:]:
                    annotate(vertex, int(part_tok), lineno, vcol)
                continue

            raise NetlistSyntaxError("unknown directive '{}'".format(head), lineno, col)

        kind = head[0].upper()
        if kind not in ELEMENT_KINDS:
            raise NetlistSyntaxError("unknown element kind '{}'".format(head[0]), lineno, col)

        if head in positions:
            raise DuplicateNameError(
                "element name '{}' already used on line {}".format(head, positions[head][0]), lineno, col
            )

        if len(tokens) < 3:
            raise NetlistSyntaxError("element '{}' needs two vertices".format(head), lineno, col)

        nodes = []
        for tok, tcol in tokens[1:3]:
            vertex, part = _split_vertex(tok, lineno, tcol, kind == "K")
            if part is not None:
                annotate(vertex, part, lineno, tcol)
            nodes.append(vertex)

        if nodes[0] == nodes[1]:
            raise NetlistSyntaxError(
                "element '{}' is a self-loop at vertex '{}'".format(head, nodes[0]), lineno, tokens[2][1]
            )

        rest = tokens[3:]
        law = source = None

        if kind in "RCL":
            if len(rest) != 1:
                raise NetlistSyntaxError(
                    "element '{}' takes exactly one law token".format(head), lineno, (rest or tokens)[-1][1]
                )
            law = _parse_law(kind, rest[0][0], lineno, rest[0][1])
            try:
                law_from_spec(kind, law)
            except LawError as e:
                raise NetlistSyntaxError(str(e), lineno, rest[0][1])

        elif kind in "VI":
            source = _parse_source(rest, lineno)

        elif rest:
            raise NetlistSyntaxError("coupling branch '{}' takes no parameters".format(head), lineno, rest[0][1])

        positions[head] = (lineno, col)
        elements.append(ElementDecl(head, kind, tuple(nodes), law, source))

    used = set()
    for el in elements:
        used.update(el.nodes)

    if ground not in used:
        if ground_pos is None:
            raise MissingGroundError("no element is connected to the ground vertex '0'")
        raise MissingGroundError(
            "no element is connected to the ground vertex '{}'".format(ground), *ground_pos
        )

    for vertex, (part, lineno, col) in annotations.items():
        if vertex == ground:
            raise NetlistSyntaxError("the ground vertex belongs to every partition", lineno, col)
        if vertex not in used:
            raise UnknownVertexError("unknown vertex '{}'".format(vertex), lineno, col)

    netlist = Netlist(title, ground, tuple(elements), OrderedDict())
    for vertex in netlist_vertices(netlist):
        netlist.partitions[vertex] = annotations.get(vertex, (1,))[0]

    for el in elements:
        if el.kind == "K":
            continue
        parts = {netlist.partitions[n] for n in el.nodes if n != ground}
        if len(parts) > 1:
            raise NetlistSyntaxError(
                "element '{}' joins partitions {}; only coupling branches may".format(
                    el.name, " and ".join(str(p) for p in sorted(parts))
                ),
                *positions[el.name]
            )

    log.info("Parsed netlist with %d elements and %d vertices.", len(elements), len(netlist.partitions))
    return netlist


def read_netlist(path):
    """Read and parse a UTF-8 netlist file.

    Args:
        path (str): path to the netlist

    Returns:
        Netlist: the validated netlist
    """
    with open(path, "r", encoding="utf-8") as f:
        return parse_netlist(f.read())


def _format_number(value):
    return repr(float(value))


def _format_law(law):
    if law.family == "linear":
        return "{}={}".format(law.key, _format_number(law.params[0]))
    return "{}={}:{}".format(law.key, law.family, ",".join(_format_number(p) for p in law.params))


def _format_source(source):
    return " ".join([source.shape] + [_format_number(p) for p in source.params])


def print_netlist(netlist):
    """Print a netlist in the grammar accepted by :func:`parse_netlist`.

    Parsing the printed text yields a netlist equal to ``netlist``.

    Args:
        netlist (Netlist): the netlist

    Returns:
        str: the netlist text
    """
    lines = []

    if netlist.title:
        lines.append(".title {}".format(netlist.title))

    if netlist.ground != "0":
        lines.append(".ground {}".format(netlist.ground))

    parts = OrderedDict()
    for vertex, part in netlist.partitions.items():
        parts.setdefault(part, []).append(vertex)

    if set(parts) != {1}:
        for part in sorted(parts):
            lines.append(".partition {} {}".format(part, " ".join(parts[part])))

    for el in netlist.elements:
        fields = [el.name, el.nodes[0], el.nodes[1]]
        if el.law is not None:
            fields.append(_format_law(el.law))
        if el.source is not None:
            fields.append(_format_source(el.source))
        lines.append(" ".join(fields))

    lines.append(".end")
    return "\n".join(lines) + "\n"
