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

# cli.py
# Copyright (C) 2026 Fracpete (fracpete at gmail dot com)

import argparse
import logging
import sys
import traceback
from pathanalysis.causal_model import parse_model
from pathanalysis.dataset_io import dataset_to_csv, generate_synthetic, load_correlation, load_dataset, pearson_matrix
from pathanalysis.errors import PathAnalysisError
from pathanalysis.estimator import DEFAULT_ALPHA, fit_model, fit_model_from_dataset
from pathanalysis.fit_trim import DEFAULT_FIT_THRESHOLD, compare, fit_and_trim, load_replay_coefficients, replay_decomposition
from pathanalysis.io_utils import output_str
from pathanalysis.report import VERSION, build_report, render_diagram, render_json, render_screening_json, render_screening_text, render_text
from pathanalysis.screening import screen_report

# logging setup
logger = logging.getLogger("pathanalysis.cli")

EXIT_CONSISTENT = 0
EXIT_INCONSISTENT = 1
EXIT_USAGE = 2
EXIT_ERROR = 3

DEFAULT_SEED = 1


class UsageError(Exception):
    """
    Raised for invalid combinations of options that argparse cannot express.
    """
    pass


def _missing_tokens(s):
    return tuple(x.strip() for x in s.split(","))


def _load_inputs(parsed, need_raw=False):
    """
    Loads the model and the data (raw CSV or correlation matrix). When raw data
    is required but only a correlation matrix is available, an exact synthetic
    dataset gets generated from the matrix using the seed.

    :param parsed: the parsed options
    :type parsed: argparse.Namespace
    :param need_raw: whether raw data is required
    :type need_raw: bool
    :return: tuple of graph, correlation matrix, dataset (None if not available)
    :rtype: tuple
    """
    if (parsed.data is None) and (parsed.corr is None):
        raise UsageError("one of the arguments --data/--corr is required")
    g = parse_model(parsed.model)
    logger.info("Model: %d variable(s), %d path(s)" % (len(g.variables), len(g.edges)))
    dataset = None
    if parsed.data is not None:
        dataset = load_dataset(parsed.data, missing_tokens=_missing_tokens(parsed.missing))
        c = pearson_matrix(dataset)
    else:
        c = load_correlation(parsed.corr)
        if need_raw:
            dataset = generate_synthetic(c, c.n, seed=parsed.seed, exact=True)
    return g, c, dataset


def _provenance(parsed):
    """
    Collects input files and parameters for the report.

    :param parsed: the parsed options
    :type parsed: argparse.Namespace
    :return: the provenance
    :rtype: dict
    """
    result = {"tool": "path-analysis", "version": VERSION, "command": parsed.command}
    for key in ["model", "data", "corr", "replay_coefficients", "alpha", "fit_threshold", "seed", "trim"]:
        if hasattr(parsed, key):
            result[key] = getattr(parsed, key)
    return result


def _output(parsed, content):
    output_str(content, path=parsed.output, overwrite=parsed.overwrite, logger=logger)


def screen(parsed):
    """
    Runs the assumption checks.

    :param parsed: the parsed options
    :type parsed: argparse.Namespace
    :return: the exit code
    :rtype: int
    """
    g, c, dataset = _load_inputs(parsed, need_raw=True)
    s = screen_report(dataset, g)
    if parsed.format == "json":
        _output(parsed, render_screening_json(s, provenance=_provenance(parsed)))
    elif parsed.format == "text":
        _output(parsed, render_screening_text(s))
    else:
        raise UsageError("screen does not support format '%s'" % parsed.format)
    return EXIT_CONSISTENT if s.passed else EXIT_INCONSISTENT


def fit(parsed):
    """
    Fits (and optionally trims) the model and outputs the report.

    :param parsed: the parsed options
    :type parsed: argparse.Namespace
    :return: the exit code
    :rtype: int
    """
    g, c, dataset = _load_inputs(parsed)
    screening = None
    if dataset is not None:
        screening = screen_report(dataset, g)

    trim_log = None
    if parsed.trim:
        trim_log = fit_and_trim(c, g, alpha=parsed.alpha, threshold=parsed.fit_threshold, dataset=dataset)
        m = trim_log.final.model
    elif dataset is not None:
        m = fit_model_from_dataset(dataset, g, alpha=parsed.alpha)
    else:
        m = fit_model(c, g, alpha=parsed.alpha)

    replay = None
    if parsed.replay_coefficients is not None:
        coefficients, covariances = load_replay_coefficients(parsed.replay_coefficients)
        reproduced = replay_decomposition(g, coefficients, covariances, n=c.n)
        replay = compare(c, reproduced, threshold=parsed.fit_threshold)

    r = build_report(m, parsed.fit_threshold, trim_log=trim_log, screening=screening, replay=replay,
                     provenance=_provenance(parsed))
    if parsed.format == "json":
        _output(parsed, render_json(r))
    elif parsed.format == "dot":
        _output(parsed, render_diagram(m.graph, m))
    else:
        _output(parsed, render_text(r))
    return EXIT_CONSISTENT if r.fit.consistent else EXIT_INCONSISTENT


def diagram(parsed):
    """
    Outputs the path diagram in DOT format, with coefficients if data was supplied.

    :param parsed: the parsed options
    :type parsed: argparse.Namespace
    :return: the exit code
    :rtype: int
    """
    if (parsed.data is None) and (parsed.corr is None):
        g = parse_model(parsed.model)
        _output(parsed, render_diagram(g))
        return EXIT_CONSISTENT
    g, c, dataset = _load_inputs(parsed)
    if parsed.trim:
        m = fit_and_trim(c, g, alpha=parsed.alpha, threshold=parsed.fit_threshold, dataset=dataset).final.model
    elif dataset is not None:
        m = fit_model_from_dataset(dataset, g, alpha=parsed.alpha)
    else:
        m = fit_model(c, g, alpha=parsed.alpha)
    _output(parsed, render_diagram(m.graph, m))
    return EXIT_CONSISTENT


def synth(parsed):
    """
    Outputs a synthetic CSV dataset reproducing the correlation matrix.

    :param parsed: the parsed options
    :type parsed: argparse.Namespace
    :return: the exit code
    :rtype: int
    """
    c = load_correlation(parsed.corr)
    rows = c.n if parsed.rows is None else parsed.rows
    d = generate_synthetic(c, rows, seed=parsed.seed, exact=not parsed.sampling)
    _output(parsed, dataset_to_csv(d))
    return EXIT_CONSISTENT


def _add_common(parser):
    parser.add_argument("--output", metavar="FILE", dest="output", required=False, default=None, help="the file to write the output to instead of stdout")
    parser.add_argument("--overwrite", action="store_true", dest="overwrite", required=False, help="whether to overwrite an existing output file")
    parser.add_argument("--verbose", action="store_true", dest="verbose", required=False, help="whether to output logging information")
    parser.add_argument("--debug", action="store_true", dest="debug", required=False, help="whether to output debugging information")


def _add_inputs(parser, model_required=True):
    parser.add_argument("--model", metavar="FILE", dest="model", required=model_required, help="the causal model (var/path/covary lines)")
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--data", metavar="CSV", dest="data", required=False, default=None, help="the raw data, CSV with header row")
    group.add_argument("--corr", metavar="FILE", dest="corr", required=False, default=None, help="the correlation matrix (n/vars/matrix lines)")
    parser.add_argument("--missing", metavar="TOKENS", dest="missing", required=False, default=",NA", help="comma-separated cell values that represent missing values")
    parser.add_argument("--seed", metavar="INT", dest="seed", type=int, required=False, default=DEFAULT_SEED, help="the seed for synthesizing raw data from a correlation matrix")


def _add_estimation(parser, trim_flag=True):
    parser.add_argument("--alpha", metavar="ALPHA", dest="alpha", type=float, required=False, default=DEFAULT_ALPHA, help="the significance level for keeping paths")
    parser.add_argument("--fit-threshold", metavar="DIFF", dest="fit_threshold", type=float, required=False, default=DEFAULT_FIT_THRESHOLD, help="the largest acceptable difference between observed and reproduced correlations")
    if trim_flag:
        parser.add_argument("--trim", action="store_true", dest="trim", required=False, help="whether to remove non-significant paths and re-fit until no path gets removed")


def create_parser():
    """
    Creates the parser for the command-line options.

    :return: the parser
    :rtype: argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(
        description='Path analysis of causal models from raw data or a correlation matrix.',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        prog="path-analysis")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    sub = subparsers.add_parser("screen", help="checks the assumptions of the analysis", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_inputs(sub)
    sub.add_argument("--format", dest="format", choices=["text", "json"], default="text", required=False, help="the output format")
    _add_common(sub)
    sub.set_defaults(func=screen)

    for name, help_str in [("fit", "fits the model and assesses its fit"),
                           ("trim", "fits and trims the model, same as 'fit --trim'")]:
        sub = subparsers.add_parser(name, help=help_str, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        _add_inputs(sub)
        _add_estimation(sub, trim_flag=(name == "fit"))
        sub.add_argument("--format", dest="format", choices=["text", "json", "dot"], default="text", required=False, help="the output format")
        sub.add_argument("--replay-coefficients", metavar="FILE", dest="replay_coefficients", required=False, default=None, help="re-traces the correlations with these coefficients ('cause -> effect value' lines)")
        _add_common(sub)
        sub.set_defaults(func=fit)
        if name == "trim":
            sub.set_defaults(trim=True)

    sub = subparsers.add_parser("diagram", help="outputs the path diagram in DOT format", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _add_inputs(sub)
    _add_estimation(sub)
    _add_common(sub)
    sub.set_defaults(func=diagram)

    sub = subparsers.add_parser("synth", help="generates synthetic raw data from a correlation matrix", formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sub.add_argument("--corr", metavar="FILE", dest="corr", required=True, help="the correlation matrix (n/vars/matrix lines)")
    sub.add_argument("--rows", metavar="INT", dest="rows", type=int, required=False, default=None, help="the number of rows, uses the sample size of the matrix if omitted")
    sub.add_argument("--seed", metavar="INT", dest="seed", type=int, required=False, default=DEFAULT_SEED, help="the seed for the random number generator")
    sub.add_argument("--sampling", action="store_true", dest="sampling", required=False, help="draws rows from the population instead of matching the sample correlations exactly")
    _add_common(sub)
    sub.set_defaults(func=synth)

    return parser


def main(args=None):
    """
    Runs the path analysis.
    Use -h/--help to see all options.

    :param args: the command-line arguments to use, uses sys.argv if None
    :type args: list
    :return: the exit code (0 consistent, 1 inconsistent, 2 usage error, 3 data/model error)
    :rtype: int
    """
    parser = create_parser()
    try:
        parsed = parser.parse_args(args=args)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_CONSISTENT
    # configure logging
    if parsed.debug:
        logging.basicConfig(level=logging.DEBUG)
    elif parsed.verbose:
        logging.basicConfig(level=logging.INFO)
    logger.debug(parsed)
    try:
        return parsed.func(parsed)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write("error: usage: %s\n" % str(e))
        return EXIT_USAGE
    except PathAnalysisError as e:
        sys.stderr.write("error: %s\n" % str(e))
        return EXIT_ERROR
    except OSError as e:
        sys.stderr.write("error: UnwritableFile: %s\n" % str(e))
        return EXIT_ERROR


def sys_main():
    """
    Runs the main function using the system cli arguments, and
    returns a system error code.

    :return: 0 for consistent, 1 for inconsistent, 2 for usage errors, 3 for failures.
    :rtype: int
    """

    try:
        return main()
    except Exception as e:
        logger.info(traceback.format_exc())
        sys.stderr.write("error: Internal: %s\n" % str(e))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(sys_main())
