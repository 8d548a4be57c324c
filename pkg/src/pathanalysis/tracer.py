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

# tracer.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import enum
import logging
import math
from dataclasses import dataclass
import numpy as np
from pathanalysis.causal_model import children, covary_partners, exogenous, parents, topological_order
from pathanalysis.dataset_io import CorrelationMatrix
from pathanalysis.errors import ModelError

# logging setup
logger = logging.getLogger("pathanalysis.tracer")


class Direction(enum.Enum):
    """
    How a step of a trace traverses its arc.
    """
    FORWARD = "forward"
    BACKWARD = "backward"
    COVARIANCE = "covariance"


class TraceClass(enum.Enum):
    """
    Direct (D), indirect (I) or spurious (S) component of a correlation.
    """
    DIRECT = "D"
    INDIRECT = "I"
    SPURIOUS = "S"


@dataclass(frozen=True)
class Step:
    """
    A single move of a trace, from 'source' to 'target'.
    """
    source: str
    target: str
    direction: Direction

    @property
    def edge(self):
        """
        The arc as declared in the graph: (cause, effect) for directed arcs.
        """
        if self.direction == Direction.BACKWARD:
            return self.target, self.source
        return self.source, self.target

    def __str__(self):
        if self.direction == Direction.FORWARD:
            return "%s -> %s" % (self.source, self.target)
        elif self.direction == Direction.BACKWARD:
            return "%s <- %s" % (self.source, self.target)
        else:
            return "%s <-> %s" % (self.source, self.target)


@dataclass(frozen=True)
class Trace:
    """
    A legitimate walk between two variables under the tracing rules, with the
    product of the coefficients along it.
    """
    steps: tuple
    trace_class: TraceClass
    product: float

    @property
    def nodes(self):
        return (self.steps[0].source,) + tuple(s.target for s in self.steps)

    def __str__(self):
        result = self.steps[0].source
        for s in self.steps:
            if s.direction == Direction.FORWARD:
                result += " -> " + s.target
            elif s.direction == Direction.BACKWARD:
                result += " <- " + s.target
            else:
                result += " <-> " + s.target
        return result


@dataclass(frozen=True)
class Decomposition:
    """
    All traces between a pair of variables and the resulting reproduced correlation.
    """
    pair: tuple
    traces: tuple

    @property
    def reproduced(self):
        return math.fsum(t.product for t in self.traces)


def classify(steps):
    """
    Classifies the trace. Traces that only follow arrows in a single direction
    are causal: one step is direct, more are indirect. Anything that reverses
    direction or uses a covariance arc is spurious. A purely backward trace is
    a causal chain walked from the effect side and classifies the same way.

    :param steps: the steps of the trace
    :type steps: tuple
    :return: the class
    :rtype: TraceClass
    """
    directions = set(s.direction for s in steps)
    if len(directions) != 1 or Direction.COVARIANCE in directions:
        return TraceClass.SPURIOUS
    if len(steps) == 1:
        return TraceClass.DIRECT
    return TraceClass.INDIRECT


def _walk(g, i, j):
    """
    Enumerates the step sequences of all traces from i to j: an optional run
    of backward steps, at most one covariance arc, then forward steps only,
    never visiting a variable twice.

    :param g: the graph
    :type g: CausalGraph
    :param i: the start variable
    :type i: str
    :param j: the end variable
    :type j: str
    :return: list of step tuples
    :rtype: list
    """
    result = []

    def visit(node, visited, steps, backward_allowed):
        if node == j:
            result.append(tuple(steps))
            return
        moves = []
        if backward_allowed:
            moves.extend((x, Direction.BACKWARD, True) for x in parents(g, node))
            moves.extend((x, Direction.COVARIANCE, False) for x in covary_partners(g, node))
        moves.extend((x, Direction.FORWARD, False) for x in children(g, node))
        for target, direction, still_backward in moves:
            if target in visited:
                continue
            visited.add(target)
            steps.append(Step(source=node, target=target, direction=direction))
            visit(target, visited, steps, still_backward)
            steps.pop()
            visited.remove(target)

    visit(i, {i}, [], True)
    return result


def _product(steps, coefficients, covariances):
    """
    Multiplies the coefficients along the steps.

    :param steps: the steps
    :type steps: tuple
    :param coefficients: (cause, effect) -> path coefficient
    :type coefficients: dict
    :param covariances: (a, b) -> correlation of the exogenous pair
    :type covariances: dict
    :return: the product
    :rtype: float
    """
    result = 1.0
    for s in steps:
        if s.direction == Direction.COVARIANCE:
            key = (s.source, s.target)
            result *= covariances[key] if key in covariances else covariances[(s.target, s.source)]
        else:
            result *= coefficients[s.edge]
    return result


def trace_pair(g, coefficients, covariances, i, j):
    """
    Decomposes the correlation between i and j into its traces, using the
    supplied coefficients.

    :param g: the graph
    :type g: CausalGraph
    :param coefficients: (cause, effect) -> path coefficient
    :type coefficients: dict
    :param covariances: (a, b) -> correlation of the exogenous pair
    :type covariances: dict
    :param i: the first variable
    :type i: str
    :param j: the second variable
    :type j: str
    :return: the decomposition
    :rtype: Decomposition
    """
    g.position(i)
    g.position(j)
    if i == j:
        raise ModelError("SameVariable", "cannot trace '%s' to itself" % i)
    traces = []
    for steps in _walk(g, i, j):
        traces.append(Trace(steps=steps, trace_class=classify(steps),
                            product=_product(steps, coefficients, covariances)))
    traces.sort(key=lambda t: [g.position(x) for x in t.nodes])
    return Decomposition(pair=(i, j), traces=tuple(traces))


def trace_matrix(g, coefficients, covariances, n):
    """
    Computes the reproduced correlations of all variable pairs by tracing.

    :param g: the graph
    :type g: CausalGraph
    :param coefficients: (cause, effect) -> path coefficient
    :type coefficients: dict
    :param covariances: (a, b) -> correlation of the exogenous pair
    :type covariances: dict
    :param n: the sample size to attach to the matrix
    :type n: int
    :return: the reproduced matrix (variables in declaration order)
    :rtype: CorrelationMatrix
    """
    p = len(g.variables)
    r = np.eye(p)
    for a in range(p):
        for b in range(a + 1, p):
            value = trace_pair(g, coefficients, covariances, g.variables[a], g.variables[b]).reproduced
            r[a, b] = value
            r[b, a] = value
            logger.debug("r(%s,%s) = %.6f" % (g.variables[a], g.variables[b], value))
    return CorrelationMatrix(names=g.variables, r=r, n=n, implied=True)


def oracle_matrix(g, coefficients, covariances, n):
    """
    Computes the implied correlations with the recursive rule
    r(i, j) = sum over parents k of j of beta(j, k) * r(i, k), visiting the
    exogenous variables first and the endogenous ones in topological order.

    :param g: the graph
    :type g: CausalGraph
    :param coefficients: (cause, effect) -> path coefficient
    :type coefficients: dict
    :param covariances: (a, b) -> correlation of the exogenous pair
    :type covariances: dict
    :param n: the sample size to attach to the matrix
    :type n: int
    :return: the implied matrix (variables in declaration order)
    :rtype: CorrelationMatrix
    """
    exo = exogenous(g)
    order = exo + [x for x in topological_order(g) if x not in exo]
    pos = dict((x, g.position(x)) for x in g.variables)
    r = np.eye(len(g.variables))
    for (a, b), value in covariances.items():
        r[pos[a], pos[b]] = value
        r[pos[b], pos[a]] = value
    for jj, j in enumerate(order):
        pa = parents(g, j)
        if len(pa) == 0:
            continue
        for i in order[:jj]:
            value = math.fsum(coefficients[(k, j)] * r[pos[i], pos[k]] for k in pa)
            r[pos[i], pos[j]] = value
            r[pos[j], pos[i]] = value
    return CorrelationMatrix(names=g.variables, r=r, n=n, implied=True)


def enumerate_traces(m, i, j):
    """
    Lists all legitimate traces between the two variables of the fitted model,
    ordered by the declaration positions of the variables they visit.

    :param m: the fitted model
    :type m: FittedModel
    :param i: the start variable
    :type i: str
    :param j: the end variable
    :type j: str
    :return: the traces
    :rtype: list
    """
    return list(reproduced_correlation(m, i, j).traces)


def reproduced_correlation(m, i, j):
    """
    Decomposes the model-implied correlation between two variables.

    :param m: the fitted model
    :type m: FittedModel
    :param i: the start variable
    :type i: str
    :param j: the end variable
    :type j: str
    :return: the decomposition
    :rtype: Decomposition
    """
    return trace_pair(m.graph, m.coefficients(), m.covariances(), i, j)


def reproduced_matrix(m):
    """
    Computes the reproduced correlation matrix of the fitted model by tracing.

    :param m: the fitted model
    :type m: FittedModel
    :return: the reproduced matrix
    :rtype: CorrelationMatrix
    """
    return trace_matrix(m.graph, m.coefficients(), m.covariances(), m.correlation.n)


def implied_oracle(m):
    """
    Computes the reproduced correlation matrix with the recursive rule,
    independently of the trace enumeration.

    :param m: the fitted model
    :type m: FittedModel
    :return: the implied matrix
    :rtype: CorrelationMatrix
    """
    return oracle_matrix(m.graph, m.coefficients(), m.covariances(), m.correlation.n)


def decompose_all(m):
    """
    Decomposes every variable pair, earlier variable (topological order) first.

    :param m: the fitted model
    :type m: FittedModel
    :return: the decompositions
    :rtype: list
    """
    order = topological_order(m.graph)
    result = []
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            result.append(reproduced_correlation(m, order[a], order[b]))
    return result
