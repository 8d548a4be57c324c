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

# dataset_io.py
# Copyright (C) 2020-2026 Fracpete (fracpete at gmail dot com)

import csv
import enum
import logging
import math
import re
from dataclasses import dataclass
import numpy as np
from pathanalysis.distributions import t_two_tailed
from pathanalysis.errors import DataError
from pathanalysis.io_utils import read_lines

# logging setup
logger = logging.getLogger("pathanalysis.dataset_io")

DEFAULT_MISSING = ("", "NA")
SYMMETRY_TOLERANCE = 1e-12
FILE_SYMMETRY_TOLERANCE = 1e-6
PSD_WARN = -1e-8
PSD_ERROR = -1e-4

# variable names: no whitespace, no angle brackets (reserved for the arrows of model files)
NAME_PATTERN = r"[^\s<>]+"


class Strength(enum.Enum):
    """
    Strength of association of a correlation coefficient (Cohen's guideline).
    """
    NEGLIGIBLE = "negligible"
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


def _check_names(names):
    """
    Ensures that the variable names are unique, non-empty and without whitespace
    or angle brackets.

    :param names: the names to check
    :type names: list
    """
    seen = set()
    for name in names:
        if re.fullmatch(NAME_PATTERN, name) is None:
            raise DataError("InvalidName", "variable names must be non-empty and without whitespace or '<'/'>': '%s'" % name)
        if name in seen:
            raise DataError("DuplicateName", "variable '%s' occurs more than once" % name)
        seen.add(name)


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Raw observations (rows) of named variables (columns), without missing values.
    """
    names: tuple
    values: np.ndarray
    dropped_rows: int = 0

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(self.names):
            raise DataError("NonRectangular", "expected %d columns, got shape %s" % (len(self.names), values.shape))
        _check_names(self.names)
        if len(self.names) < 2:
            raise DataError("TooFewColumns", "at least 2 variables required, got %d" % len(self.names))
        if values.shape[0] < 3:
            raise DataError("TooFewRows", "at least 3 complete rows required, got %d" % values.shape[0])
        if not np.all(np.isfinite(values)):
            raise DataError("MissingValues", "dataset contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def column(self, name):
        """
        Returns the values of the specified variable.

        :param name: the variable name
        :type name: str
        :return: the column
        :rtype: np.ndarray
        """
        if name not in self.names:
            raise DataError("UnknownVariable", "variable '%s' not in dataset" % name)
        return self.values[:, self.names.index(name)]

    def select(self, names):
        """
        Returns a dataset with just the specified variables (in that order).

        :param names: the variables to keep
        :type names: list
        :return: the reduced dataset
        :rtype: Dataset
        """
        for name in names:
            if name not in self.names:
                raise DataError("UnknownVariable", "variable '%s' not in dataset" % name)
        idx = [self.names.index(name) for name in names]
        return Dataset(names=tuple(names), values=self.values[:, idx], dropped_rows=self.dropped_rows)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """
    Symmetric matrix of Pearson correlations with unit diagonal, plus the
    sample size it summarizes.
    """
    names: tuple
    r: np.ndarray
    n: int
    implied: bool = False

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        _check_names(self.names)
        r = np.array(self.r, dtype=float)
        p = len(self.names)
        if r.shape != (p, p):
            raise DataError("NonRectangular", "expected %dx%d matrix, got shape %s" % (p, p, r.shape))
        if not np.all(np.isfinite(r)):
            raise DataError("EntryOutOfRange", "matrix contains non-finite entries")
        if np.max(np.abs(r - r.T)) > SYMMETRY_TOLERANCE:
            raise DataError("Asymmetric", "matrix is not symmetric (max deviation %g)" % np.max(np.abs(r - r.T)))
        if np.any(np.diag(r) != 1.0):
            raise DataError("BadDiagonal", "diagonal entries must be 1")
        if self.n is None:
            raise DataError("MissingSampleSize", "sample size n is required")
        # model-implied matrices (eg replayed coefficients) need not be proper correlations
        if not self.implied:
            if np.any(np.abs(r) > 1.0):
                raise DataError("EntryOutOfRange", "correlations must lie in [-1, 1]")
            min_eig = float(np.min(np.linalg.eigvalsh(r)))
            if min_eig < PSD_ERROR:
                raise DataError("NotPositiveSemiDefinite", "smallest eigenvalue %g below %g" % (min_eig, PSD_ERROR))
            if min_eig < PSD_WARN:
                logger.warning("Correlation matrix slightly indefinite, smallest eigenvalue: %g" % min_eig)
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "n", int(self.n))

    def index(self, name):
        """
        Returns the 0-based position of the variable.

        :param name: the variable name
        :type name: str
        :return: the index
        :rtype: int
        """
        if name not in self.names:
            raise DataError("UnknownVariable", "variable '%s' not in correlation matrix" % name)
        return self.names.index(name)

    def get(self, a, b):
        """
        Returns the correlation between the two variables.

        :param a: the first variable
        :type a: str
        :param b: the second variable
        :type b: str
        :return: the correlation
        :rtype: float
        """
        return float(self.r[self.index(a), self.index(b)])

    def submatrix(self, rows, cols):
        """
        Returns the block of correlations for the specified variables.

        :param rows: the row variables
        :type rows: list
        :param cols: the column variables
        :type cols: list
        :return: the block
        :rtype: np.ndarray
        """
        return self.r[np.ix_([self.index(x) for x in rows], [self.index(x) for x in cols])]


@dataclass(frozen=True)
class SummaryStats:
    """
    Descriptive statistics of a single variable.
    """
    name: str
    mean: float
    sd: float
    min: float
    max: float

    @property
    def range(self):
        return self.max - self.min


def load_dataset(path, missing_tokens=DEFAULT_MISSING):
    """
    Loads a CSV file with a header row of variable names and numeric cells.
    Rows with missing or non-numeric cells are deleted listwise.

    :param path: the CSV file to read
    :type path: str
    :param missing_tokens: the cell values that represent missing values
    :type missing_tokens: set or tuple
    :return: the dataset
    :rtype: Dataset
    """
    missing = set(missing_tokens)
    names = None
    rows = []
    dropped = 0
    try:
        with open(path, newline='') as csv_file:
            csv_reader = csv.reader(csv_file)
            for lineno, row in enumerate(csv_reader, start=1):
                if len(row) == 0:
                    continue
                row = [x.strip() for x in row]
                if names is None:
                    names = row
                    _check_names(names)
                    logger.info("Variables: %s" % ", ".join(names))
                    continue
                if len(row) != len(names):
                    raise DataError("NonRectangular", "line %d has %d cells, expected %d" % (lineno, len(row), len(names)))
                values = []
                for cell in row:
                    if cell in missing:
                        break
                    try:
                        value = float(cell)
                    except ValueError:
                        break
                    if not math.isfinite(value):
                        break
                    values.append(value)
                if len(values) == len(names):
                    rows.append(values)
                else:
                    logger.debug("Dropping line %d: %s" % (lineno, str(row)))
                    dropped += 1
    except OSError as e:
        raise DataError("UnreadableFile", "%s (%s)" % (path, e.strerror))
    except UnicodeDecodeError:
        raise DataError("UnreadableFile", "%s is not a text file" % path)

    if names is None:
        raise DataError("UnreadableFile", "%s contains no header" % path)
    if len(rows) < 3:
        raise DataError("TooFewRows", "%d complete rows in %s, at least 3 required" % (len(rows), path))
    if dropped > 0:
        logger.warning("Listwise deletion removed %d row(s) from %s" % (dropped, path))
    return Dataset(names=tuple(names), values=np.array(rows), dropped_rows=dropped)


def write_dataset(d, path):
    """
    Writes the dataset to a CSV file.

    :param d: the dataset to write
    :type d: Dataset
    :param path: the file to write to
    :type path: str
    """
    with open(path, "w", newline='') as csv_file:
        csv_writer = csv.writer(csv_file)
        csv_writer.writerow(d.names)
        for row in d.values:
            csv_writer.writerow([repr(float(x)) for x in row])


def dataset_to_csv(d):
    """
    Turns the dataset into CSV text.

    :param d: the dataset to convert
    :type d: Dataset
    :return: the CSV content
    :rtype: str
    """
    lines = [",".join(d.names)]
    for row in d.values:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def load_correlation(path):
    """
    Loads a correlation matrix from the line-based text format:

      n 44
      vars X1 X2 X3 Y
      matrix
      1 .804 -.469 .225
      ...

    :param path: the file to read
    :type path: str
    :return: the validated matrix
    :rtype: CorrelationMatrix
    """
    n = None
    names = None
    rows = []
    in_matrix = False
    for lineno, line in read_lines(path):
        parts = line.split()
        if in_matrix:
            try:
                rows.append([float(x) for x in parts])
            except ValueError:
                raise DataError("SyntaxError", "line %d: non-numeric matrix entry" % lineno)
            continue
        if parts[0] == "n" and len(parts) == 2:
            try:
                n = int(parts[1])
            except ValueError:
                raise DataError("SyntaxError", "line %d: sample size must be an integer" % lineno)
        elif parts[0] == "vars" and len(parts) > 1:
            names = parts[1:]
        elif parts[0] == "matrix" and len(parts) == 1:
            in_matrix = True
        else:
            raise DataError("SyntaxError", "line %d: unexpected '%s'" % (lineno, line))

    if n is None:
        raise DataError("MissingSampleSize", "no 'n' line in %s" % path)
    if names is None:
        raise DataError("SyntaxError", "no 'vars' line in %s" % path)
    if len(rows) != len(names) or any(len(row) != len(names) for row in rows):
        raise DataError("NonRectangular", "matrix in %s must be %dx%d" % (path, len(names), len(names)))
    r = np.array(rows)
    if np.any(np.abs(r) > 1.0):
        raise DataError("EntryOutOfRange", "correlations must lie in [-1, 1]")
    if np.max(np.abs(r - r.T)) > FILE_SYMMETRY_TOLERANCE:
        raise DataError("Asymmetric", "matrix in %s is not symmetric" % path)
    if np.any(np.diag(r) != 1.0):
        raise DataError("BadDiagonal", "diagonal entries in %s must be 1" % path)
    r = (r + r.T) / 2.0
    logger.info("Loaded %dx%d correlation matrix (n=%d) from %s" % (len(names), len(names), n, path))
    return CorrelationMatrix(names=tuple(names), r=r, n=n)


def write_correlation(c, digits=None):
    """
    Turns the correlation matrix into the line-based text format.

    :param c: the matrix to convert
    :type c: CorrelationMatrix
    :param digits: the number of decimals to use, full precision if None
    :type digits: int
    :return: the text
    :rtype: str
    """
    def fmt(x):
        if digits is None:
            return repr(float(x))
        return "%.*f" % (digits, x)

    lines = ["n %d" % c.n, "vars " + " ".join(c.names), "matrix"]
    for row in c.r:
        lines.append(" ".join(fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _sd_or_fail(values, names):
    """
    Returns the sample standard deviations (n-1), failing on constant columns.

    :param values: the n x p matrix
    :type values: np.ndarray
    :param names: the column names
    :type names: tuple
    :return: the standard deviations
    :rtype: np.ndarray
    """
    sd = np.std(values, axis=0, ddof=1)
    for name, s in zip(names, sd):
        if s <= 0:
            raise DataError("ConstantVariable", "variable '%s' has zero variance" % name)
    return sd


def pearson_matrix(d):
    """
    Computes the Pearson correlation matrix of the dataset.

    :param d: the dataset
    :type d: Dataset
    :return: the correlation matrix
    :rtype: CorrelationMatrix
    """
    _sd_or_fail(d.values, d.names)
    r = np.corrcoef(d.values, rowvar=False)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(names=d.names, r=r, n=d.n)


def correlation_pvalue(r, n):
    """
    Computes the two-tailed p-value of a Pearson correlation, using
    t = r * sqrt(n-2) / sqrt(1-r^2) with n-2 degrees of freedom.

    :param r: the correlation
    :type r: float
    :param n: the sample size (>= 3)
    :type n: int
    :return: the p-value
    :rtype: float
    """
    if n < 3:
        raise DataError("TooFewObservations", "p-value requires n >= 3, got %d" % n)
    if abs(r) > 1.0:
        raise DataError("EntryOutOfRange", "correlation %g outside [-1, 1]" % r)
    if abs(r) == 1.0:
        return 0.0
    t = r * math.sqrt(n - 2) / math.sqrt(1.0 - r * r)
    return t_two_tailed(t, n - 2)


def strength_label(r):
    """
    Classifies the magnitude of the correlation according to Cohen's guideline,
    with half-open bands [0, 0.1), [0.1, 0.3), [0.3, 0.5), [0.5, 1].

    :param r: the correlation
    :type r: float
    :return: the strength
    :rtype: Strength
    """
    a = abs(r)
    if a < 0.1:
        return Strength.NEGLIGIBLE
    elif a < 0.3:
        return Strength.SMALL
    elif a < 0.5:
        return Strength.MEDIUM
    else:
        return Strength.LARGE


def correlation_table(c):
    """
    Generates the rows of the observed correlation table: one dictionary per
    variable pair (lower triangle, row-major) with r, p, strength and the
    significance markers ('**' at 0.01, '*' at 0.05).

    :param c: the correlation matrix
    :type c: CorrelationMatrix
    :return: the list of rows
    :rtype: list
    """
    result = []
    for i in range(len(c.names)):
        for j in range(i):
            r = float(c.r[i, j])
            p = correlation_pvalue(r, c.n)
            if p < 0.01:
                marker = "**"
            elif p < 0.05:
                marker = "*"
            else:
                marker = ""
            result.append({
                "row": c.names[i],
                "col": c.names[j],
                "r": r,
                "p": p,
                "strength": strength_label(r).value,
                "marker": marker,
            })
    return result


def standardize(d):
    """
    Turns every column into z-scores (mean 0, sample sd 1).

    :param d: the dataset
    :type d: Dataset
    :return: the standardized dataset
    :rtype: Dataset
    """
    sd = _sd_or_fail(d.values, d.names)
    z = (d.values - np.mean(d.values, axis=0)) / sd
    return Dataset(names=d.names, values=z, dropped_rows=d.dropped_rows)


def summary_stats(d):
    """
    Computes the descriptive statistics for every variable.

    :param d: the dataset
    :type d: Dataset
    :return: the statistics, in variable order
    :rtype: list
    """
    result = []
    for i, name in enumerate(d.names):
        col = d.values[:, i]
        result.append(SummaryStats(name=name, mean=float(np.mean(col)), sd=float(np.std(col, ddof=1)),
                                   min=float(np.min(col)), max=float(np.max(col))))
    return result


def _sqrtm_psd(r):
    """
    Symmetric square root of a positive semi-definite matrix.

    :param r: the matrix
    :type r: np.ndarray
    :return: S with S @ S = r
    :rtype: np.ndarray
    """
    w, v = np.linalg.eigh(r)
    if np.min(w) < PSD_WARN:
        raise DataError("NotPositiveSemiDefinite", "smallest eigenvalue %g" % np.min(w))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def generate_synthetic(target, n, seed=1, exact=True):
    """
    Generates a synthetic dataset whose correlations follow the target matrix.
    In exact mode the random draws are centred and orthonormalized before being
    recoloured with the square root of the target, so that the sample
    correlation matrix equals the target. Otherwise rows are drawn i.i.d.
    from a multivariate normal with the target as population correlation.

    :param target: the correlation matrix to reproduce
    :type target: CorrelationMatrix
    :param n: the number of rows to generate
    :type n: int
    :param seed: the seed for the random number generator
    :type seed: int
    :param exact: whether the sample correlation must match the target exactly
    :type exact: bool
    :return: the dataset
    :rtype: Dataset
    """
    p = len(target.names)
    rng = np.random.default_rng(seed)
    if exact:
        if n <= p:
            raise DataError("TooFewObservations", "exact mode requires n > p (n=%d, p=%d)" % (n, p))
        root = _sqrtm_psd(target.r)
        z = rng.standard_normal((n, p))
        z -= np.mean(z, axis=0)
        q, _ = np.linalg.qr(z)
        values = q * math.sqrt(n - 1) @ root
    else:
        _sqrtm_psd(target.r)
        values = rng.multivariate_normal(np.zeros(p), target.r, size=n, method="eigh")
    logger.info("Generated %d synthetic rows (seed=%d, exact=%s)" % (n, seed, exact))
    return Dataset(names=target.names, values=values)
