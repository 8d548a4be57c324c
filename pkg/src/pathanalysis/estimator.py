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

# estimator.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import logging
import math
from dataclasses import dataclass
import numpy as np
from scipy.linalg import lu_factor, lu_solve
from pathanalysis.causal_model import equations_for, validate_graph
from pathanalysis.dataset_io import pearson_matrix, standardize
from pathanalysis.distributions import t_two_tailed
from pathanalysis.errors import EstimationError, ModelError

# logging setup
logger = logging.getLogger("pathanalysis.estimator")

DEFAULT_ALPHA = 0.05
PIVOT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class EquationFit:
    """
    The standardized least-squares fit of a single structural equation.
    """
    outcome: str
    predictors: tuple
    beta: tuple
    se: tuple
    t: tuple
    p: tuple
    r2: float
    n: int

    @property
    def residual_variance(self):
        return 1.0 - self.r2

    @property
    def df(self):
        return self.n - len(self.predictors) - 1

    def coefficient(self, predictor):
        return self.beta[self.predictors.index(predictor)]

    def p_value(self, predictor):
        return self.p[self.predictors.index(predictor)]


@dataclass(frozen=True)
class FittedModel:
    """
    A causal graph with one fitted equation per endogenous variable.
    """
    graph: object
    fits: tuple
    correlation: object
    alpha: float = DEFAULT_ALPHA

    def fit_for(self, outcome):
        """
        Returns the fit of the equation for the endogenous variable.

        :param outcome: the endogenous variable
        :type outcome: str
        :return: the fit
        :rtype: EquationFit
        """
        for fit in self.fits:
            if fit.outcome == outcome:
                return fit
        raise ModelError("NotEndogenous", "'%s' has no structural equation" % outcome)

    def coefficient(self, cause, effect):
        return self.fit_for(effect).coefficient(cause)

    def p_value(self, cause, effect):
        return self.fit_for(effect).p_value(cause)

    def is_significant(self, cause, effect):
        return self.p_value(cause, effect) < self.alpha

    def coefficients(self):
        """
        Returns the path coefficient of every directed edge.

        :return: the mapping (cause, effect) -> coefficient, in edge order
        :rtype: dict
        """
        return dict((e, self.coefficient(*e)) for e in self.graph.edges)

    def covariances(self):
        """
        Returns the empirical correlation attached to every covariance arc.

        :return: the mapping (a, b) -> correlation
        :rtype: dict
        """
        return dict(((a, b), self.correlation.get(a, b)) for a, b in self.graph.covary)


def p_value_from_t(t, df):
    """
    Computes the two-tailed p-value of a t statistic.

    :param t: the statistic
    :type t: float
    :param df: the degrees of freedom (>= 1)
    :type df: int
    :return: the p-value
    :rtype: float
    """
    if df < 1:
        raise EstimationError("InsufficientN", "degrees of freedom must be at least 1, got %d" % df)
    return t_two_tailed(t, df)


def _solver(rxx, names):
    """
    Factorizes the predictor correlations with partial pivoting.

    :param rxx: the k x k predictor block
    :type rxx: np.ndarray
    :param names: the predictor names, for error messages
    :type names: tuple
    :return: the LU factorization
    :rtype: tuple
    """
    lu, piv = lu_factor(rxx)
    if np.min(np.abs(np.diag(lu))) <= PIVOT_TOLERANCE:
        raise EstimationError("SingularPredictors", "predictors are linearly dependent: %s" % ", ".join(names))
    return lu, piv


def _inference(beta, inv_diag, r2, n, outcome):
    """
    Computes standard errors, t statistics and p-values.

    :param beta: the coefficients
    :type beta: np.ndarray
    :param inv_diag: the diagonal of the inverted predictor correlations
    :type inv_diag: np.ndarray
    :param r2: the coefficient of determination
    :type r2: float
    :param n: the sample size
    :type n: int
    :param outcome: the outcome, for error messages
    :type outcome: str
    :return: tuple of se, t, p tuples
    :rtype: tuple
    """
    k = len(beta)
    df = n - k - 1
    if df < 1:
        raise EstimationError("InsufficientN", "equation for '%s' has %d predictors but n=%d" % (outcome, k, n))
    se = []
    t = []
    p = []
    for b, d in zip(beta, inv_diag):
        s = math.sqrt(max(0.0, (1.0 - r2) * d / df))
        if s > 0:
            tv = b / s
        elif b == 0:
            tv = 0.0
        else:
            tv = math.copysign(math.inf, b)
        se.append(s)
        t.append(tv)
        p.append(p_value_from_t(tv, df))
    return tuple(se), tuple(t), tuple(p)


def fit_equation(c, eq):
    """
    Fits the structural equation from the correlation matrix by solving the
    normal equations R_xx beta = r_xy.

    :param c: the correlation matrix
    :type c: CorrelationMatrix
    :param eq: the equation to fit
    :type eq: StructuralEquation
    :return: the fit
    :rtype: EquationFit
    """
    preds = list(eq.predictors)
    if len(preds) == 0:
        raise ModelError("NotEndogenous", "'%s' has no predictors" % eq.outcome)
    rxx = c.submatrix(preds, preds)
    rxy = c.submatrix(preds, [eq.outcome])[:, 0]
    lu = _solver(rxx, eq.predictors)
    beta = lu_solve(lu, rxy)
    inv_diag = np.diag(lu_solve(lu, np.eye(len(preds))))
    r2 = min(1.0, max(0.0, float(np.dot(beta, rxy))))
    se, t, p = _inference(beta, inv_diag, r2, c.n, eq.outcome)
    logger.debug("%s ~ %s: beta=%s, R2=%.6f" % (eq.outcome, " + ".join(preds), str(beta), r2))
    return EquationFit(outcome=eq.outcome, predictors=tuple(preds), beta=tuple(float(x) for x in beta),
                       se=se, t=t, p=p, r2=r2, n=c.n)


def _check_variables(g, names, source):
    """
    Ensures that all model variables are available.

    :param g: the graph
    :type g: CausalGraph
    :param names: the available names
    :type names: tuple
    :param source: what the names belong to
    :type source: str
    """
    for x in g.variables:
        if x not in names:
            raise ModelError("UnknownVariable", "model variable '%s' not in %s" % (x, source))


def fit_model(c, g, alpha=DEFAULT_ALPHA):
    """
    Fits every structural equation of the graph from the correlation matrix.

    :param c: the correlation matrix
    :type c: CorrelationMatrix
    :param g: the graph
    :type g: CausalGraph
    :param alpha: the significance level used for trimming and reporting
    :type alpha: float
    :return: the fitted model
    :rtype: FittedModel
    """
    _check_variables(g, c.names, "correlation matrix")
    validate_graph(g)
    fits = tuple(fit_equation(c, eq) for eq in equations_for(g))
    logger.info("Fitted %d equation(s), %d path(s)" % (len(fits), len(g.edges)))
    return FittedModel(graph=g, fits=fits, correlation=c, alpha=alpha)


def fit_model_from_dataset(d, g, alpha=DEFAULT_ALPHA):
    """
    Fits every structural equation from raw data: the variables get
    standardized and each equation is solved by least squares.

    :param d: the dataset
    :type d: Dataset
    :param g: the graph
    :type g: CausalGraph
    :param alpha: the significance level used for trimming and reporting
    :type alpha: float
    :return: the fitted model
    :rtype: FittedModel
    """
    _check_variables(g, d.names, "dataset")
    validate_graph(g)
    data = d.select(g.variables)
    z = standardize(data)
    fits = []
    for eq in equations_for(g):
        x = np.column_stack([z.column(name) for name in eq.predictors])
        y = z.column(eq.outcome)
        lu = _solver(x.T @ x / (z.n - 1), eq.predictors)
        beta = np.linalg.lstsq(x, y, rcond=None)[0]
        resid = y - x @ beta
        r2 = min(1.0, max(0.0, 1.0 - float(resid @ resid) / (z.n - 1)))
        inv_diag = np.diag(lu_solve(lu, np.eye(len(eq.predictors))))
        se, t, p = _inference(beta, inv_diag, r2, z.n, eq.outcome)
        fits.append(EquationFit(outcome=eq.outcome, predictors=eq.predictors, beta=tuple(float(b) for b in beta),
                                se=se, t=t, p=p, r2=r2, n=z.n))
    logger.info("Fitted %d equation(s) from %d observations" % (len(fits), z.n))
    return FittedModel(graph=g, fits=tuple(fits), correlation=pearson_matrix(data), alpha=alpha)
