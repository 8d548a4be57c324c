# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

# causal_model.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import logging
import re
from dataclasses import dataclass
import networkx as nx
from pathanalysis.dataset_io import NAME_PATTERN
from pathanalysis.errors import ModelError
from pathanalysis.io_utils import read_text, strip_comments

# logging setup
logger = logging.getLogger("pathanalysis.causal_model")

NAME = NAME_PATTERN
PATTERN_VAR = re.compile(r"^var\s+(.+)$")
PATTERN_PATH = re.compile(r"^path\s+(%s)\s*->\s*(%s)$" % (NAME, NAME))
PATTERN_COVARY = re.compile(r"^covary\s+(%s)\s*<->\s*(%s)$" % (NAME, NAME))


@dataclass(frozen=True)
class CausalGraph:
    """
    A recursive causal model: declared variables, directed cause -> effect
    edges and optional covariance arcs between exogenous variables.
    """
    variables: tuple
    edges: tuple
    covary: tuple = ()

    def __post_init__(self):
        variables = tuple(self.variables)
        edges = tuple((str(a), str(b)) for a, b in self.edges)
        covary = tuple((str(a), str(b)) for a, b in self.covary)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "covary", covary)

        declared = set(variables)
        if len(declared) != len(variables):
            raise ModelError("DuplicateName", "variables declared more than once: %s" % ", ".join(variables))
        seen = set()
        for a, b in edges:
            for x in (a, b):
                if x not in declared:
                    raise ModelError("UndeclaredVariable", "'%s' in path %s -> %s" % (x, a, b))
            if a == b:
                raise ModelError("SelfLoop", "%s -> %s" % (a, b))
            if (a, b) in seen:
                raise ModelError("DuplicateEdge", "%s -> %s" % (a, b))
            seen.add((a, b))
        cycle = _find_cycle(variables, edges)
        if cycle is not None:
            raise ModelError("CycleDetected", " -> ".join(cycle))
        targets = set(b for _, b in edges)
        seen = set()
        for a, b in covary:
            for x in (a, b):
                if x not in declared:
                    raise ModelError("UndeclaredVariable", "'%s' in covary %s <-> %s" % (x, a, b))
                if x in targets:
                    raise ModelError("CovaryOnEndogenous", "'%s' has incoming paths (covary %s <-> %s)" % (x, a, b))
            if a == b:
                raise ModelError("SelfLoop", "%s <-> %s" % (a, b))
            if frozenset((a, b)) in seen:
                raise ModelError("DuplicateEdge", "%s <-> %s" % (a, b))
            seen.add(frozenset((a, b)))

    def position(self, name):
        """
        Returns the declaration index of the variable.

        :param name: the variable
        :type name: str
        :return: the 0-based index
        :rtype: int
        """
        if name not in self.variables:
            raise ModelError("UnknownVariable", "'%s' is not part of the model" % name)
        return self.variables.index(name)

    def has_edge(self, cause, effect):
        return (cause, effect) in self.edges

    def has_covary(self, a, b):
        return ((a, b) in self.covary) or ((b, a) in self.covary)


@dataclass(frozen=True)
class StructuralEquation:
    """
    The regression of an endogenous variable on all of its graph parents.
    """
    outcome: str
    predictors: tuple


def _digraph(variables, edges):
    """
    Turns the variables/edges into a networkx graph.

    :param variables: the variables
    :type variables: tuple
    :param edges: the directed edges
    :type edges: tuple
    :return: the graph
    :rtype: nx.DiGraph
    """
    result = nx.DiGraph()
    result.add_nodes_from(variables)
    result.add_edges_from(edges)
    return result


def _find_cycle(variables, edges):
    """
    Locates a directed cycle, if any.

    :param variables: the variables
    :type variables: tuple
    :param edges: the directed edges
    :type edges: tuple
    :return: the variables along the cycle (first one repeated at the end), None if acyclic
    :rtype: list
    """
    try:
        cycle = nx.find_cycle(_digraph(variables, edges))
    except nx.NetworkXNoCycle:
        return None
    return [a for a, _ in cycle] + [cycle[0][0]]


def parents(g, name):
    """
    Returns the direct causes of the variable, in declaration order.

    :param g: the graph
    :type g: CausalGraph
    :param name: the variable
    :type name: str
    :return: the parents
    :rtype: list
    """
    g.position(name)
    result = set(a for a, b in g.edges if b == name)
    return [x for x in g.variables if x in result]


def children(g, name):
    """
    Returns the direct effects of the variable, in declaration order.

    :param g: the graph
    :type g: CausalGraph
    :param name: the variable
    :type name: str
    :return: the children
    :rtype: list
    """
    g.position(name)
    result = set(b for a, b in g.edges if a == name)
    return [x for x in g.variables if x in result]


def covary_partners(g, name):
    """
    Returns the variables connected to this one via a covariance arc.

    :param g: the graph
    :type g: CausalGraph
    :param name: the variable
    :type name: str
    :return: the partners, in declaration order
    :rtype: list
    """
    result = set()
    for a, b in g.covary:
        if a == name:
            result.add(b)
        elif b == name:
            result.add(a)
    return [x for x in g.variables if x in result]


def ancestors(g, name):
    """
    Returns all variables with a directed path into the variable, in declaration order.

    :param g: the graph
    :type g: CausalGraph
    :param name: the variable
    :type name: str
    :return: the ancestors
    :rtype: list
    """
    g.position(name)
    result = nx.ancestors(_digraph(g.variables, g.edges), name)
    return [x for x in g.variables if x in result]


def exogenous(g):
    """
    Returns the variables without incoming edges, in declaration order.

    :param g: the graph
    :type g: CausalGraph
    :return: the exogenous variables
    :rtype: list
    """
    targets = set(b for _, b in g.edges)
    return [x for x in g.variables if x not in targets]


def topological_order(g):
    """
    Returns all variables in topological order; ties are broken by
    declaration order.

    :param g: the graph
    :type g: CausalGraph
    :return: the ordered variables
    :rtype: list
    """
    cycle = _find_cycle(g.variables, g.edges)
    if cycle is not None:
        raise ModelError("CycleDetected", " -> ".join(cycle))
    return list(nx.lexicographical_topological_sort(_digraph(g.variables, g.edges), key=g.variables.index))


def validate_graph(g):
    """
    Confirms that the graph is recursive and returns the endogenous variables
    in topological order. Isolated variables only generate a warning.

    :param g: the graph
    :type g: CausalGraph
    :return: the endogenous variables
    :rtype: list
    """
    order = topological_order(g)
    connected = set()
    for a, b in g.edges + g.covary:
        connected.add(a)
        connected.add(b)
    for x in g.variables:
        if x not in connected:
            logger.warning("Variable is isolated (no paths or covariance arcs): %s" % x)
    targets = set(b for _, b in g.edges)
    return [x for x in order if x in targets]


def endogenous(g):
    """
    Returns the variables with incoming edges, in topological order.

    :param g: the graph
    :type g: CausalGraph
    :return: the endogenous variables
    :rtype: list
    """
    targets = set(b for _, b in g.edges)
    return [x for x in topological_order(g) if x in targets]


def equations_for(g):
    """
    Derives one structural equation per endogenous variable, regressing it on
    all of its parents (declaration order).

    :param g: the graph
    :type g: CausalGraph
    :return: the equations, in topological order of the outcomes
    :rtype: list
    """
    return [StructuralEquation(outcome=x, predictors=tuple(parents(g, x))) for x in endogenous(g)]


def without_edges(g, removed):
    """
    Returns a copy of the graph without the specified directed edges.

    :param g: the graph
    :type g: CausalGraph
    :param removed: the (cause, effect) tuples to remove
    :type removed: list
    :return: the pruned graph
    :rtype: CausalGraph
    """
    removed = set(tuple(x) for x in removed)
    return CausalGraph(variables=g.variables, edges=tuple(e for e in g.edges if e not in removed), covary=g.covary)


def parse_model_text(text, source="<string>"):
    """
    Parses the model text format ('var', 'path A -> B', 'covary A <-> B' lines,
    '#' comments).

    :param text: the model definition
    :type text: str
    :param source: where the text came from, used in error messages
    :type source: str
    :return: the validated graph
    :rtype: CausalGraph
    """
    variables = []
    edges = []
    covary = []
    for lineno, line in strip_comments(text):
        m = PATTERN_VAR.match(line)
        if m is not None:
            for name in m.group(1).split():
                if name in variables:
                    raise ModelError("DuplicateName", "%s, line %d: variable '%s' declared twice" % (source, lineno, name))
                if not re.fullmatch(NAME, name):
                    raise ModelError("SyntaxError", "%s, line %d: invalid variable name '%s'" % (source, lineno, name))
                variables.append(name)
            continue
        m = PATTERN_PATH.match(line)
        if m is not None:
            for name in m.groups():
                if name not in variables:
                    raise ModelError("UndeclaredVariable", "%s, line %d: '%s'" % (source, lineno, name))
            edges.append((m.group(1), m.group(2)))
            continue
        m = PATTERN_COVARY.match(line)
        if m is not None:
            for name in m.groups():
                if name not in variables:
                    raise ModelError("UndeclaredVariable", "%s, line %d: '%s'" % (source, lineno, name))
            covary.append((m.group(1), m.group(2)))
            continue
        raise ModelError("SyntaxError", "%s, line %d: cannot parse '%s'" % (source, lineno, line))

    result = CausalGraph(variables=tuple(variables), edges=tuple(edges), covary=tuple(covary))
    logger.info("Model %s: %d variables, %d paths, %d covariance arcs"
                % (source, len(variables), len(edges), len(covary)))
    return result


def parse_model(path):
    """
    Loads the model from the text file.

    :param path: the file to read
    :type path: str
    :return: the validated graph
    :rtype: CausalGraph
    """
    return parse_model_text(read_text(path), source=path)


def serialize_model(g):
    """
    Turns the graph into the model text format.

    :param g: the graph
    :type g: CausalGraph
    :return: the text
    :rtype: str
    """
    lines = ["var " + " ".join(g.variables)]
    for a, b in g.edges:
        lines.append("path %s -> %s" % (a, b))
    for a, b in g.covary:
        lines.append("covary %s <-> %s" % (a, b))
    return "\n".join(lines) + "\n"
