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

# report.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import json
import math
from dataclasses import dataclass, field
from pathanalysis.dataset_io import correlation_table
from pathanalysis.effects import effects_table
from pathanalysis.fit_trim import fit_report
from pathanalysis.tracer import decompose_all

VERSION = "0.1.0"
ABSENT = "---"


@dataclass(frozen=True)
class AnalysisReport:
    """
    Everything the pipeline produced, ready for rendering.
    """
    model: object
    fit: object
    effects: object
    decompositions: tuple
    trim_log: object = None
    screening: object = None
    replay: object = None
    provenance: dict = field(default_factory=dict)

    @property
    def observed(self):
        return self.fit.observed

    @property
    def reproduced(self):
        return self.fit.reproduced


def build_report(m, threshold, trim_log=None, screening=None, replay=None, provenance=None):
    """
    Assembles the report for the (final) fitted model.

    :param m: the fitted model
    :type m: FittedModel
    :param threshold: the fit threshold
    :type threshold: float
    :param trim_log: the trimming iterations, if any
    :type trim_log: TrimLog
    :param screening: the screening results, if any
    :type screening: ScreeningReport
    :param replay: fit report of replayed coefficients, if any
    :type replay: FitReport
    :param provenance: input files and parameters
    :type provenance: dict
    :return: the report
    :rtype: AnalysisReport
    """
    if provenance is None:
        provenance = {}
    return AnalysisReport(model=m, fit=fit_report(m, threshold=threshold), effects=effects_table(m),
                          decompositions=tuple(decompose_all(m)), trim_log=trim_log, screening=screening,
                          replay=replay, provenance=dict(provenance))


def fmt(x, digits=3):
    """
    Formats the number with fixed decimals, avoiding negative zero.

    :param x: the number to format, None for absent
    :type x: float
    :param digits: the number of decimals
    :type digits: int
    :return: the formatted number
    :rtype: str
    """
    if x is None:
        return ABSENT
    result = "%.*f" % (digits, x)
    if result.startswith("-") and float(result) == 0.0:
        result = result[1:]
    return result


def _table(header, rows):
    """
    Lays out the rows as left-aligned columns.

    :param header: the column headers
    :type header: list
    :param rows: the rows (lists of strings)
    :type rows: list
    :return: the lines
    :rtype: list
    """
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    result = []
    for row in [header] + rows:
        result.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return result


def _matrix_lines(c, flagged=None):
    """
    Renders the lower triangle of a correlation matrix.

    :param c: the matrix
    :type c: CorrelationMatrix
    :param flagged: the fit report whose flagged cells get a '*', ignored if None
    :type flagged: FitReport
    :return: the lines
    :rtype: list
    """
    rows = []
    for i, a in enumerate(c.names):
        row = [a]
        for j in range(i + 1):
            cell = fmt(c.r[i, j]) if i != j else "1"
            if (flagged is not None) and (i != j) and flagged.is_flagged(a, c.names[j]):
                cell += "*"
            row.append(cell)
        rows.append(row + [""] * (len(c.names) - i - 1))
    return _table([""] + list(c.names), rows)


def _fit_lines(report, title):
    """
    Renders observed vs reproduced correlations.

    :param report: the fit report
    :type report: FitReport
    :param title: the section title
    :type title: str
    :return: the lines
    :rtype: list
    """
    result = [title, "=" * len(title), "", "Observed Correlation"]
    result.extend(_matrix_lines(report.observed))
    result.append("")
    result.append("Reproduced Correlation")
    result.extend(_matrix_lines(report.reproduced, flagged=report))
    if not report.consistent:
        result.append("*Difference between reproduced and observed correlation is greater than %s." % report.threshold)
    result.append("")
    result.append("Maximum difference: %s" % fmt(report.max_diff))
    result.append("Consistent with the empirical data: %s" % ("yes" if report.consistent else "no"))
    result.append("")
    return result


def _screening_lines(s):
    """
    Renders the assumption checks.

    :param s: the screening results
    :type s: ScreeningReport
    :return: the lines
    :rtype: list
    """
    lines = ["Screening", "=========", ""]
    lines += _table(["Variable", "Mean", "SD", "Min", "Max", "Range", "KS D", "Critical", "Normal"],
                    [[x.name, fmt(x.mean), fmt(x.sd), fmt(x.min), fmt(x.max), fmt(x.range),
                      fmt(k.statistic), fmt(k.critical), "yes" if k.passed else "no"]
                     for x, k in zip(s.ranges, s.normality)])
    lines.append("")
    flagged = s.flagged_outliers
    if len(flagged) == 0:
        lines.append("Multivariate outliers: none")
    else:
        lines.append("Multivariate outliers (row: D2): "
                     + ", ".join("%d: %s" % (o.row, fmt(o.d2)) for o in flagged))
    for outcome in s.vif:
        lines.append("VIF (%s): " % outcome + ", ".join("%s=%s" % (k, fmt(v)) for k, v in s.vif[outcome].items()))
    for outcome, h in s.heteroscedasticity.items():
        lines.append("Heteroscedasticity (%s): LM=%s, p=%s%s" % (outcome, fmt(h.lm), fmt(h.p), " *" if h.flagged else ""))
    gaps = [x for x in s.linearity if x.gap]
    if len(gaps) > 0:
        lines.append("Possible non-linearity: " + ", ".join("%s/%s" % (x.a, x.b) for x in gaps))
    lines.append("Assumptions met: %s" % ("yes" if s.passed else "no"))
    lines.append("")
    return lines


def render_screening_text(s):
    """
    Renders only the assumption checks as text.

    :param s: the screening results
    :type s: ScreeningReport
    :return: the text
    :rtype: str
    """
    return "\n".join(_screening_lines(s))


def render_text(r):
    """
    Renders the report as human-readable tables (3 decimals).

    :param r: the report
    :type r: AnalysisReport
    :return: the text
    :rtype: str
    """
    m = r.model
    lines = []

    if r.screening is not None:
        lines += _screening_lines(r.screening)

    lines += ["Observed Correlation (n=%d)" % m.correlation.n, "=" * len("Observed Correlation (n=%d)" % m.correlation.n), ""]
    rows = []
    for row in correlation_table(r.observed):
        rows.append([row["row"], row["col"], fmt(row["r"]) + row["marker"], fmt(row["p"]), row["strength"]])
    lines += _table(["Variable", "Variable", "Pearson", "Sig. (2-tailed)", "Strength"], rows)
    lines.append("**. significant at the 0.01 level, *. significant at the 0.05 level (2-tailed)")
    lines.append("")

    lines += ["Path Coefficients (alpha=%s)" % m.alpha, "=" * len("Path Coefficients (alpha=%s)" % m.alpha), ""]
    rows = []
    for fit in m.fits:
        for i, pred in enumerate(fit.predictors):
            star = "*" if fit.p[i] < m.alpha else ""
            rows.append(["%s -> %s" % (pred, fit.outcome), fmt(fit.beta[i]) + star, fmt(fit.se[i]),
                         fmt(fit.t[i]), fmt(fit.p[i])])
    lines += _table(["Path", "Beta", "SE", "t", "p"], rows)
    for a, b in m.graph.covary:
        lines.append("%s <-> %s: %s" % (a, b, fmt(m.correlation.get(a, b))))
    lines.append("")
    lines += _table(["Equation", "R2", "Residual"],
                    [["%s ~ %s" % (fit.outcome, " + ".join(fit.predictors)), fmt(fit.r2), fmt(fit.residual_variance)]
                     for fit in m.fits])
    lines.append("")

    lines += ["Path Decomposition", "==================", ""]
    for d in r.decompositions:
        if len(d.traces) == 0:
            lines.append("r(%s,%s) = %s" % (d.pair[0], d.pair[1], fmt(0.0)))
            continue
        classes = " ".join("(%s)" % t.trace_class.value for t in d.traces)
        lines.append("r(%s,%s) = %s %s" % (d.pair[0], d.pair[1], fmt(d.reproduced), classes))
        for t in d.traces:
            lines.append("  %s = %s (%s)" % (str(t), fmt(t.product), t.trace_class.value))
    lines.append("")

    lines += _fit_lines(r.fit, "Model Fit (threshold=%s)" % r.fit.threshold)

    if r.replay is not None:
        lines += _fit_lines(r.replay, "Replayed Coefficients (threshold=%s)" % r.replay.threshold)

    if (r.trim_log is not None) and (len(r.trim_log.iterations) > 0):
        lines += ["Trimming", "========", ""]
        for i, it in enumerate(r.trim_log.iterations, start=1):
            if len(it.removed) == 0:
                removed = "none"
            else:
                removed = ", ".join("%s -> %s (p=%s)" % (a, b, fmt(p)) for a, b, p in it.removed)
            lines.append("Iteration %d: %d path(s), max diff %s, consistent: %s, removed: %s"
                         % (i, len(it.model.graph.edges), fmt(it.report.max_diff),
                            "yes" if it.report.consistent else "no", removed))
        lines.append("")

    lines += ["Causal Effects", "==============", ""]
    rows = []
    for outcome in r.effects.outcomes():
        first = True
        for row in r.effects.rows:
            if row.outcome != outcome:
                continue
            label = "%s (R2 = %s)" % (outcome, fmt(row.r2)) if first else ""
            first = False
            rows.append([label, row.determinant + ("*" if row.significant else ""), fmt(row.direct),
                         fmt(row.indirect), fmt(row.total)])
    lines += _table(["Outcome", "Determinant", "Direct", "Indirect", "Total"], rows)
    for fit in m.fits:
        lines.append("%s: %s%% explained, %s%% unexplained"
                     % (fit.outcome, fmt(100 * fit.r2, 1), fmt(100 * fit.residual_variance, 1)))
    lines.append("")

    return "\n".join(lines)


def _json_safe(obj):
    """
    Replaces non-finite numbers, which JSON cannot represent: infinities become
    the strings "inf"/"-inf", NaN becomes null.

    :param obj: the nested dictionaries/lists
    :return: the cleaned up copy
    """
    if isinstance(obj, dict):
        return dict((k, _json_safe(v)) for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return [_json_safe(x) for x in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        if math.isnan(obj):
            return None
        return "inf" if obj > 0 else "-inf"
    return obj


def _matrix_dict(c):
    return {"names": list(c.names), "n": c.n, "r": [[float(x) for x in row] for row in c.r]}


def _fit_dict(report):
    return {
        "threshold": report.threshold,
        "consistent": report.consistent,
        "max_diff": report.max_diff,
        "flagged": [{"row": a, "col": b, "diff": d} for a, b, d in report.flagged],
        "observed": _matrix_dict(report.observed),
        "reproduced": _matrix_dict(report.reproduced),
    }


def screening_to_dict(s):
    """
    Turns the assumption checks into nested dictionaries/lists.

    :param s: the screening results
    :type s: ScreeningReport
    :return: the dictionary
    :rtype: dict
    """
    return {
        "passed": bool(s.passed),
        "outliers": [{"row": o.row, "d2": o.d2, "flagged": bool(o.flagged)} for o in s.outliers],
        "normality": [{"name": k.name, "statistic": k.statistic, "critical": k.critical, "passed": bool(k.passed)}
                      for k in s.normality],
        "vif": dict((k, dict(v)) for k, v in s.vif.items()),
        "heteroscedasticity": dict((k, {"lm": h.lm, "p": h.p, "flagged": bool(h.flagged)})
                                   for k, h in s.heteroscedasticity.items()),
        "ranges": [{"name": x.name, "mean": x.mean, "sd": x.sd, "min": x.min, "max": x.max, "range": x.range}
                   for x in s.ranges],
        "linearity": [{"a": x.a, "b": x.b, "pearson": x.pearson, "spearman": x.spearman, "gap": bool(x.gap)}
                      for x in s.linearity],
    }


def render_screening_json(s, provenance=None):
    """
    Renders only the assumption checks as JSON.

    :param s: the screening results
    :type s: ScreeningReport
    :param provenance: input files and parameters
    :type provenance: dict
    :return: the JSON
    :rtype: str
    """
    result = {"screening": screening_to_dict(s)}
    result["provenance"] = dict(provenance) if provenance is not None else {}
    return json.dumps(_json_safe(result), indent=2, allow_nan=False)


def report_to_dict(r):
    """
    Turns the report into nested dictionaries/lists (key order is stable).

    :param r: the report
    :type r: AnalysisReport
    :return: the dictionary
    :rtype: dict
    """
    m = r.model
    result = {}
    if r.screening is not None:
        result["screening"] = screening_to_dict(r.screening)
    paths = []
    for fit in m.fits:
        for i, pred in enumerate(fit.predictors):
            paths.append({"cause": pred, "effect": fit.outcome, "beta": float(fit.beta[i]), "se": float(fit.se[i]),
                          "t": float(fit.t[i]), "p": float(fit.p[i]), "significant": bool(fit.p[i] < m.alpha)})
    result["coefficients"] = {
        "alpha": m.alpha,
        "paths": paths,
        "covariances": [{"a": a, "b": b, "r": m.correlation.get(a, b)} for a, b in m.graph.covary],
        "equations": [{"outcome": fit.outcome, "predictors": list(fit.predictors), "r2": fit.r2,
                       "residual_variance": fit.residual_variance} for fit in m.fits],
    }
    result["observed"] = _matrix_dict(r.observed)
    result["correlations"] = correlation_table(r.observed)
    result["reproduced"] = _matrix_dict(r.reproduced)
    result["decompositions"] = [
        {"pair": list(d.pair), "reproduced": d.reproduced,
         "traces": [{"steps": [str(s) for s in t.steps], "class": t.trace_class.value, "product": t.product}
                    for t in d.traces]}
        for d in r.decompositions]
    result["fit"] = _fit_dict(r.fit)
    if r.replay is not None:
        result["replay"] = _fit_dict(r.replay)
    if r.trim_log is not None:
        result["trim_log"] = [
            {"edges": [list(e) for e in it.model.graph.edges],
             "removed": [{"cause": a, "effect": b, "p": p} for a, b, p in it.removed],
             "consistent": bool(it.report.consistent),
             "max_diff": it.report.max_diff}
            for it in r.trim_log.iterations]
    result["effects"] = [
        {"outcome": row.outcome, "determinant": row.determinant, "direct": row.direct, "indirect": row.indirect,
         "total": row.total, "r2": row.r2, "unexplained": 1.0 - row.r2, "significant": bool(row.significant)}
        for row in r.effects.rows]
    result["provenance"] = dict(r.provenance)
    return result


def render_json(r):
    """
    Renders the report as a single JSON document with full precision.

    :param r: the report
    :type r: AnalysisReport
    :return: the JSON
    :rtype: str
    """
    return json.dumps(_json_safe(report_to_dict(r)), indent=2, allow_nan=False)


def _quote(s):
    return '"%s"' % s.replace('"', '\\"')


def render_diagram(g, m=None):
    """
    Renders the causal graph in GraphViz DOT format. With a fitted model, paths
    get labelled with their coefficients ('*' when significant) and covariance
    arcs with their correlations.

    :param g: the graph
    :type g: CausalGraph
    :param m: the fitted model, ignored if None
    :type m: FittedModel
    :return: the DOT text
    :rtype: str
    """
    lines = ["digraph path_model {", "  rankdir = LR;", ""]
    for x in g.variables:
        lines.append("  %s [ shape = \"box\" ];" % _quote(x))
    lines.append("")
    for a, b in g.edges:
        attrs = ""
        if m is not None:
            label = fmt(m.coefficient(a, b)) + ("*" if m.is_significant(a, b) else "")
            attrs = " [ label = %s ]" % _quote(label)
        lines.append("  %s -> %s%s;" % (_quote(a), _quote(b), attrs))
    for a, b in g.covary:
        attrs = "dir = \"both\", style = \"dashed\""
        if m is not None:
            attrs += ", label = %s" % _quote(fmt(m.correlation.get(a, b)))
        lines.append("  %s -> %s [ %s ];" % (_quote(a), _quote(b), attrs))
    lines.append("}")
    return "\n".join(lines) + "\n"
