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

# effects.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import math
from dataclasses import dataclass
from pathanalysis.causal_model import ancestors, endogenous, topological_order
from pathanalysis.errors import ModelError
from pathanalysis.tracer import TraceClass, reproduced_correlation


@dataclass(frozen=True)
class EffectRow:
    """
    Direct, indirect and total causal effect of a determinant on an outcome.
    Absent components are None.
    """
    outcome: str
    determinant: str
    direct: object
    indirect: object
    r2: float
    significant: bool

    @property
    def total(self):
        return (self.direct or 0.0) + (self.indirect or 0.0)


@dataclass(frozen=True)
class EffectsTable:
    """
    The causal effects of all ancestors on every endogenous variable.
    """
    rows: tuple

    def row(self, outcome, determinant):
        for r in self.rows:
            if (r.outcome == outcome) and (r.determinant == determinant):
                return r
        raise ModelError("UnknownVariable", "no effect of '%s' on '%s'" % (determinant, outcome))

    def outcomes(self):
        result = []
        for r in self.rows:
            if r.outcome not in result:
                result.append(r.outcome)
        return result


def effects_table(m):
    """
    Decomposes the total causal effects of the fitted model. Spurious
    components never count towards any effect.

    :param m: the fitted model
    :type m: FittedModel
    :return: the table, outcomes and determinants in topological order
    :rtype: EffectsTable
    """
    g = m.graph
    order = topological_order(g)
    rows = []
    for outcome in endogenous(g):
        fit = m.fit_for(outcome)
        determinants = sorted(ancestors(g, outcome), key=order.index)
        for determinant in determinants:
            direct = None
            significant = False
            if g.has_edge(determinant, outcome):
                direct = m.coefficient(determinant, outcome)
                significant = bool(m.is_significant(determinant, outcome))
            products = [t.product for t in reproduced_correlation(m, determinant, outcome).traces
                        if t.trace_class == TraceClass.INDIRECT]
            indirect = math.fsum(products) if len(products) > 0 else None
            rows.append(EffectRow(outcome=outcome, determinant=determinant, direct=direct, indirect=indirect,
                                  r2=fit.r2, significant=significant))
    return EffectsTable(rows=tuple(rows))


def variance_explained(m, outcome):
    """
    Returns the share of the outcome's variance explained by its equation and
    the share left to factors outside the model.

    :param m: the fitted model
    :type m: FittedModel
    :param outcome: the endogenous variable
    :type outcome: str
    :return: tuple of R^2 and 1 - R^2
    :rtype: tuple
    """
    fit = m.fit_for(outcome)
    return fit.r2, 1.0 - fit.r2
