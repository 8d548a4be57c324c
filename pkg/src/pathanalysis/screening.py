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

# screening.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import logging
import math
from dataclasses import dataclass
import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.stats import kstest, spearmanr
from pathanalysis.causal_model import equations_for
from pathanalysis.dataset_io import Dataset, pearson_matrix, standardize, summary_stats
from pathanalysis.distributions import chi2_quantile, chi2_upper_tail
from pathanalysis.errors import DataError, ModelError

# logging setup
logger = logging.getLogger("pathanalysis.screening")

OUTLIER_QUANTILE = 0.999
NORMALITY_ALPHA = 0.05
VIF_THRESHOLD = 10.0
HETEROSCEDASTICITY_ALPHA = 0.05
LINEARITY_GAP = 0.1
PIVOT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Outlier:
    row: int
    d2: float
    flagged: bool


@dataclass(frozen=True)
class NormalityResult:
    name: str
    statistic: float
    critical: float

    @property
    def passed(self):
        return self.statistic <= self.critical


@dataclass(frozen=True)
class HeteroscedasticityResult:
    lm: float
    p: float
    flagged: bool


@dataclass(frozen=True)
class LinearityResult:
    a: str
    b: str
    pearson: float
    spearman: float

    @property
    def gap(self):
        return abs(self.spearman) - abs(self.pearson) > LINEARITY_GAP


@dataclass(frozen=True)
class ScreeningReport:
    """
    The outcome of all pre-analysis assumption checks.
    """
    outliers: tuple
    normality: tuple
    vif: dict
    heteroscedasticity: dict
    ranges: tuple
    linearity: tuple

    @property
    def flagged_outliers(self):
        return [o for o in self.outliers if o.flagged]

    @property
    def passed(self):
        """
        Whether all checks passed; linearity gaps are advisory only.
        """
        if len(self.flagged_outliers) > 0:
            return False
        if not all(x.passed for x in self.normality):
            return False
        if any(v > VIF_THRESHOLD for scores in self.vif.values() for v in scores.values()):
            return False
        if any(h.flagged for h in self.heteroscedasticity.values()):
            return False
        return True


def mahalanobis_d2(d, quantile=OUTLIER_QUANTILE):
    """
    Computes the squared Mahalanobis distance of every row from the mean,
    using the n-1 sample covariance, and flags rows beyond the chi-square(p)
    quantile.

    :param d: the dataset, or an n x p array (1-D arrays count as a single variable)
    :type d: Dataset or np.ndarray
    :param quantile: the chi-square quantile to use as cutoff
    :type quantile: float
    :return: list of Outlier objects, one per row
    :rtype: list
    """
    if isinstance(d, Dataset):
        x = d.values
    else:
        x = np.asarray(d, dtype=float)
        if x.ndim == 1:
            x = x[:, np.newaxis]
    n, p = x.shape
    if n <= p:
        raise DataError("TooFewObservations", "Mahalanobis distance requires n > p (n=%d, p=%d)" % (n, p))
    centred = x - np.mean(x, axis=0)
    s = np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
    lu, piv = lu_factor(s)
    if np.min(np.abs(np.diag(lu))) <= PIVOT_TOLERANCE:
        raise DataError("CollinearColumns", "sample covariance matrix is singular")
    solved = lu_solve((lu, piv), centred.T).T
    d2 = np.einsum("ij,ij->i", centred, solved)
    cutoff = chi2_quantile(quantile, p)
    result = []
    for i, value in enumerate(d2):
        flagged = bool(value > cutoff)
        if flagged:
            logger.warning("Row %d is a multivariate outlier (D2=%.3f > %.3f)" % (i, value, cutoff))
        result.append(Outlier(row=i, d2=float(value), flagged=flagged))
    return result


def lilliefors_critical(n):
    """
    Approximate 5% critical value of the KS statistic when mean and sd are
    estimated from the sample.

    :param n: the sample size
    :type n: int
    :return: the critical value
    :rtype: float
    """
    s = math.sqrt(n)
    return 0.895 / (s - 0.01 + 0.85 / s)


def normality_ks(column, name=""):
    """
    One-sample Kolmogorov-Smirnov test against a normal distribution with
    mean and sd estimated from the sample, judged with the Lilliefors
    critical value at alpha 0.05.

    :param column: the values
    :type column: np.ndarray
    :param name: the name of the variable
    :type name: str
    :return: the result
    :rtype: NormalityResult
    """
    x = np.asarray(column, dtype=float)
    if len(x) < 4:
        raise DataError("TooFewObservations", "normality test requires at least 4 values, got %d" % len(x))
    sd = np.std(x, ddof=1)
    if sd <= 0:
        raise DataError("ConstantVariable", "variable '%s' has zero variance" % name)
    z = (x - np.mean(x)) / sd
    statistic = float(kstest(z, "norm").statistic)
    result = NormalityResult(name=name, statistic=statistic, critical=lilliefors_critical(len(x)))
    if not result.passed:
        logger.warning("Variable '%s' deviates from normality (D=%.3f > %.3f)" % (name, statistic, result.critical))
    return result


def vif_scores(c, predictors):
    """
    Computes the variance inflation factors of the predictors, ie
    1 / (1 - R^2) of each predictor regressed on the others, from the
    diagonal of the inverted predictor correlation block.

    :param c: the correlation matrix
    :type c: CorrelationMatrix
    :param predictors: the predictors
    :type predictors: list
    :return: predictor -> VIF
    :rtype: dict
    """
    predictors = list(predictors)
    if len(predictors) < 2:
        raise DataError("TooFewPredictors", "VIF requires at least 2 predictors")
    block = c.submatrix(predictors, predictors)
    lu, piv = lu_factor(block)
    if np.min(np.abs(np.diag(lu))) <= PIVOT_TOLERANCE:
        raise DataError("SingularSubmatrix", "predictors are perfectly collinear: %s" % ", ".join(predictors))
    inv = lu_solve((lu, piv), np.eye(len(predictors)))
    result = {}
    for i, name in enumerate(predictors):
        result[name] = max(1.0, float(inv[i, i]))
        if result[name] > VIF_THRESHOLD:
            logger.warning("Predictor '%s' has VIF %.2f > %.1f" % (name, result[name], VIF_THRESHOLD))
    return result


def heteroscedasticity_check(residuals, fitted, alpha=HETEROSCEDASTICITY_ALPHA):
    """
    Breusch-Pagan style check: the squared standardized residuals are
    regressed on the fitted values and LM = n * R^2 is referred to chi-square(1).

    :param residuals: the residuals
    :type residuals: np.ndarray
    :param fitted: the fitted values
    :type fitted: np.ndarray
    :param alpha: the significance level for flagging
    :type alpha: float
    :return: the result
    :rtype: HeteroscedasticityResult
    """
    e = np.asarray(residuals, dtype=float)
    f = np.asarray(fitted, dtype=float)
    if len(e) != len(f):
        raise DataError("NonRectangular", "%d residuals but %d fitted values" % (len(e), len(f)))
    if len(e) < 5:
        raise DataError("TooFewObservations", "heteroscedasticity check requires at least 5 values")
    if np.std(f) <= 0:
        raise DataError("ConstantVariable", "fitted values are constant")
    sd = np.std(e, ddof=1)
    if sd <= 0:
        return HeteroscedasticityResult(lm=0.0, p=1.0, flagged=False)
    u = (e / sd) ** 2
    if np.std(u) <= 0:
        return HeteroscedasticityResult(lm=0.0, p=1.0, flagged=False)
    r = np.corrcoef(u, f)[0, 1]
    lm = float(len(e) * r * r)
    p = chi2_upper_tail(lm, 1)
    return HeteroscedasticityResult(lm=lm, p=p, flagged=bool(p < alpha))


def linearity_proxy(d):
    """
    Compares Pearson and Spearman correlations of every variable pair; a
    Spearman magnitude clearly above the Pearson one hints at a monotone but
    non-linear relation.

    :param d: the dataset
    :type d: Dataset
    :return: the comparisons, lower triangle in variable order
    :rtype: list
    """
    c = pearson_matrix(d)
    result = []
    for i in range(d.p):
        for j in range(i):
            rho = float(spearmanr(d.values[:, i], d.values[:, j]).correlation)
            item = LinearityResult(a=d.names[i], b=d.names[j], pearson=float(c.r[i, j]), spearman=rho)
            if item.gap:
                logger.info("Possible non-linearity between '%s' and '%s'" % (item.a, item.b))
            result.append(item)
    return result


def screen_report(d, model):
    """
    Runs all assumption checks on the model variables of the dataset.

    :param d: the dataset
    :type d: Dataset
    :param model: the causal graph
    :type model: CausalGraph
    :return: the report
    :rtype: ScreeningReport
    """
    for x in model.variables:
        if x not in d.names:
            raise ModelError("UnknownVariable", "model variable '%s' not in dataset" % x)
    data = d.select(model.variables)
    c = pearson_matrix(data)
    z = standardize(data)
    vif = {}
    hetero = {}
    for eq in equations_for(model):
        if len(eq.predictors) >= 2:
            vif[eq.outcome] = vif_scores(c, eq.predictors)
        x = np.column_stack([z.column(name) for name in eq.predictors])
        y = z.column(eq.outcome)
        beta = np.linalg.lstsq(x, y, rcond=None)[0]
        fitted = x @ beta
        hetero[eq.outcome] = heteroscedasticity_check(y - fitted, fitted)
    result = ScreeningReport(
        outliers=tuple(mahalanobis_d2(data)),
        normality=tuple(normality_ks(data.column(x), name=x) for x in data.names),
        vif=vif,
        heteroscedasticity=hetero,
        ranges=tuple(summary_stats(data)),
        linearity=tuple(linearity_proxy(data)))
    logger.info("Screening of %d rows: passed=%s" % (data.n, result.passed))
    return result
