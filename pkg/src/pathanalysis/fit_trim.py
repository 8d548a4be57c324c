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

# fit_trim.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import logging
import re
from dataclasses import dataclass
import numpy as np
from pathanalysis.causal_model import without_edges
from pathanalysis.dataset_io import CorrelationMatrix
from pathanalysis.errors import DataError, ModelError
from pathanalysis.estimator import DEFAULT_ALPHA, fit_model, fit_model_from_dataset
from pathanalysis.io_utils import read_lines
from pathanalysis.tracer import reproduced_matrix, trace_matrix

# logging setup
logger = logging.getLogger("pathanalysis.fit_trim")

DEFAULT_FIT_THRESHOLD = 0.05
PATTERN_COEFFICIENT = re.compile(r"^(\S+)\s*(->|<->)\s*(\S+)\s+(\S+)$")


@dataclass(frozen=True)
class FitReport:
    """
    Comparison of observed and reproduced correlations.
    """
    observed: CorrelationMatrix
    reproduced: CorrelationMatrix
    threshold: float

    @property
    def diffs(self):
        return np.abs(self.observed.r - self.reproduced.r)

    @property
    def flagged(self):
        """
        The cells (lower triangle) whose absolute difference exceeds the threshold.

        :return: list of (row variable, column variable, difference) tuples
        :rtype: list
        """
        result = []
        diffs = self.diffs
        names = self.observed.names
        for i in range(len(names)):
            for j in range(i):
                if diffs[i, j] > self.threshold:
                    result.append((names[i], names[j], float(diffs[i, j])))
        return result

    @property
    def max_diff(self):
        return float(np.max(self.diffs))

    @property
    def consistent(self):
        return len(self.flagged) == 0

    def is_flagged(self, a, b):
        """
        Checks whether the cell of the two variables is flagged.

        :param a: the first variable
        :type a: str
        :param b: the second variable
        :type b: str
        :return: whether flagged
        :rtype: bool
        """
        return any(set((row, col)) == set((a, b)) for row, col, _ in self.flagged)


@dataclass(frozen=True)
class TrimIteration:
    """
    One fit/assess/trim round.
    """
    model: object
    report: FitReport
    removed: tuple


@dataclass(frozen=True)
class TrimLog:
    """
    The sequence of fit/assess/trim rounds until no path gets removed.
    """
    iterations: tuple

    @property
    def final(self):
        return self.iterations[-1]


def compare(observed, reproduced, threshold=DEFAULT_FIT_THRESHOLD):
    """
    Compares the observed correlations (restricted to the reproduced variables)
    with the reproduced ones.

    :param observed: the empirical correlations
    :type observed: CorrelationMatrix
    :param reproduced: the model-implied correlations
    :type reproduced: CorrelationMatrix
    :param threshold: the largest acceptable absolute difference
    :type threshold: float
    :return: the report
    :rtype: FitReport
    """
    if threshold <= 0:
        raise DataError("InvalidThreshold", "fit threshold must be positive, got %g" % threshold)
    names = reproduced.names
    obs = CorrelationMatrix(names=names, r=observed.submatrix(names, names), n=observed.n)
    result = FitReport(observed=obs, reproduced=reproduced, threshold=threshold)
    for row, col, diff in result.flagged:
        logger.info("Reproduced correlation %s/%s differs by %.3f" % (row, col, diff))
    return result


def fit_report(m, threshold=DEFAULT_FIT_THRESHOLD):
    """
    Assesses the fit of the model by comparing its reproduced correlations
    with the ones it was estimated from.

    :param m: the fitted model
    :type m: FittedModel
    :param threshold: the largest acceptable absolute difference
    :type threshold: float
    :return: the report
    :rtype: FitReport
    """
    return compare(m.correlation, reproduced_matrix(m), threshold=threshold)


def replay_decomposition(g, coefficients, covariances=None, n=0):
    """
    Computes the reproduced correlations from supplied rather than estimated
    coefficients, eg to re-trace published values.

    :param g: the graph
    :type g: CausalGraph
    :param coefficients: (cause, effect) -> path coefficient, for every edge
    :type coefficients: dict
    :param covariances: (a, b) -> correlation, for every covariance arc
    :type covariances: dict
    :param n: the sample size to attach to the matrix
    :type n: int
    :return: the reproduced matrix
    :rtype: CorrelationMatrix
    """
    if covariances is None:
        covariances = {}
    for e in g.edges:
        if e not in coefficients:
            raise ModelError("MissingCoefficient", "no coefficient for %s -> %s" % e)
    for e in coefficients:
        if e not in g.edges:
            raise ModelError("UnknownEdge", "coefficient for %s -> %s, which is not a path of the model" % e)
    for a, b in g.covary:
        if ((a, b) not in covariances) and ((b, a) not in covariances):
            raise ModelError("MissingCoefficient", "no correlation for %s <-> %s" % (a, b))
    return trace_matrix(g, coefficients, covariances, n)


def load_replay_coefficients(path):
    """
    Reads coefficients from lines like 'X1 -> X2 0.804' (paths) or
    'X1 <-> X4 0.2' (covariance arcs).

    :param path: the file to read
    :type path: str
    :return: tuple of coefficients dict and covariances dict
    :rtype: tuple
    """
    coefficients = {}
    covariances = {}
    for lineno, line in read_lines(path):
        m = PATTERN_COEFFICIENT.match(line)
        if m is None:
            raise ModelError("SyntaxError", "%s, line %d: expected 'cause -> effect value'" % (path, lineno))
        a, arrow, b, value = m.groups()
        try:
            value = float(value)
        except ValueError:
            raise ModelError("SyntaxError", "%s, line %d: '%s' is not a number" % (path, lineno, value))
        if arrow == "->":
            coefficients[(a, b)] = value
        else:
            covariances[(a, b)] = value
    logger.info("Replay coefficients: %d path(s), %d covariance(s)" % (len(coefficients), len(covariances)))
    return coefficients, covariances


def trim_step(m):
    """
    Removes all directed paths whose coefficient is not significant at the
    model's alpha (p >= alpha), simultaneously. Covariance arcs are kept.

    :param m: the fitted model
    :type m: FittedModel
    :return: tuple of removed (cause, effect, p-value) tuples and the pruned graph
    :rtype: tuple
    """
    removed = []
    for cause, effect in m.graph.edges:
        p = m.p_value(cause, effect)
        if p >= m.alpha:
            removed.append((cause, effect, p))
            logger.info("Removing path %s -> %s (p=%.3f)" % (cause, effect, p))
    return removed, without_edges(m.graph, [(a, b) for a, b, _ in removed])


def fit_and_trim(c, g, alpha=DEFAULT_ALPHA, threshold=DEFAULT_FIT_THRESHOLD, dataset=None):
    """
    Alternates fitting, fit assessment and trimming until no path gets
    removed anymore.

    :param c: the correlation matrix
    :type c: CorrelationMatrix
    :param g: the initial graph
    :type g: CausalGraph
    :param alpha: the significance level for keeping paths
    :type alpha: float
    :param threshold: the largest acceptable difference between observed and reproduced correlations
    :type threshold: float
    :param dataset: the raw data to fit from instead of the matrix, ignored if None
    :type dataset: Dataset
    :return: the log of all iterations
    :rtype: TrimLog
    """
    iterations = []
    while True:
        if dataset is None:
            m = fit_model(c, g, alpha=alpha)
        else:
            m = fit_model_from_dataset(dataset, g, alpha=alpha)
        report = fit_report(m, threshold=threshold)
        removed, pruned = trim_step(m)
        iterations.append(TrimIteration(model=m, report=report, removed=tuple(removed)))
        logger.info("Iteration %d: %d path(s), %d removed, consistent=%s"
                    % (len(iterations), len(g.edges), len(removed), report.consistent))
        if len(removed) == 0:
            break
        g = pruned
    return TrimLog(iterations=tuple(iterations))
