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

# distributions.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import math
from scipy.special import betainc
from scipy.stats import chi2


def t_two_tailed(t, df):
    """
    Computes the two-tailed tail probability of Student's t distribution,
    using the regularized incomplete beta function:
    p = I_{df/(df+t^2)}(df/2, 1/2).

    :param t: the t statistic
    :type t: float
    :param df: the degrees of freedom (>= 1)
    :type df: int
    :return: the probability, in [0, 1]
    :rtype: float
    """
    if math.isinf(t):
        return 0.0
    if math.isnan(t):
        return float("nan")
    x = df / (df + t * t)
    p = float(betainc(df / 2.0, 0.5, x))
    return min(1.0, max(0.0, p))


def chi2_quantile(q, df):
    """
    Returns the q-quantile of the chi-square distribution.

    :param q: the lower-tail probability
    :type q: float
    :param df: the degrees of freedom
    :type df: int
    :return: the quantile
    :rtype: float
    """
    return float(chi2.ppf(q, df))


def chi2_upper_tail(x, df):
    """
    Returns the upper-tail probability P(X > x) of the chi-square distribution.

    :param x: the statistic
    :type x: float
    :param df: the degrees of freedom
    :type df: int
    :return: the probability
    :rtype: float
    """
    return float(chi2.sf(x, df))
