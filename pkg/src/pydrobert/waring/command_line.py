# Copyright 2021 Sean Robertson

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Script-like functions intended to be accessed by command line

Every command returns (and exits with) 0 on success, 2 on a configuration or usage
error, 3 when a computation fails, and 4 when a budget would be exceeded.
"""

import argparse
import json
import logging
import sys

from typing import Optional, Sequence

import pydrobert.waring as waring

from pydrobert.waring import config
from pydrobert.waring import ConfigError
from pydrobert.waring import WaringLabError
from pydrobert.waring.degree import classify
from pydrobert.waring.degree import DegreeProfile
from pydrobert.waring.experiment import load_config
from pydrobert.waring.experiment import run
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.kamke import check_conditions
from pydrobert.waring.kamke import HKInstance
from pydrobert.waring.kamke import solve_bruteforce
from pydrobert.waring.represent import assemble
from pydrobert.waring.represent import DEFAULT_DELTA
from pydrobert.waring.represent import representation_scan
from pydrobert.waring.represent import SCAN_HEADER
from pydrobert.waring.util import _plain
from pydrobert.waring.util import write_csv
from pydrobert.waring.util import write_json

__all__ = [
    "hk_solve",
    "represent",
    "waring_lab",
]


def _nonneg_int_type(string):
    """Convert to an int and make sure its nonnegative"""
    try:
        val = int(string)
        assert val >= 0
    except (ValueError, AssertionError):
        raise argparse.ArgumentTypeError(
            "{} is not a nonnegative integer".format(string)
        )
    return val


def _pos_int_type(string):
    """Convert to an int and make sure its positive"""
    try:
        val = int(string)
        assert val > 0
    except (ValueError, AssertionError):
        raise argparse.ArgumentTypeError("{} is not a positive integer".format(string))
    return val


def _big_int_type(string):
    """Convert to an int, accepting integral scientific notation like 1e8"""
    try:
        return int(string)
    except ValueError:
        pass
    try:
        val = float(string)
        assert val.is_integer()
    except (ValueError, AssertionError):
        raise argparse.ArgumentTypeError("{} is not an integer".format(string))
    return int(val)


def _setting_type(string):
    """Split a 'key=value' override"""
    key, sep, value = string.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError("expected key=value, got '{}'".format(string))
    return key.strip(), value.strip()


def _add_common_args(parser):
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log more. Repeat for per-item detail",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + waring.__version__
    )


def _setup_logging(options) -> logging.Logger:
    logger = logging.getLogger(sys.argv[0])
    package_logger = logging.getLogger("pydrobert.waring")
    handler = logging.StreamHandler()
    for log in (logger, package_logger):
        if not log.handlers:
            log.addHandler(handler)
    level = {0: logging.WARNING, 1: logging.INFO}.get(options.verbose, 9)
    logger.setLevel(min(level, logging.INFO))
    package_logger.setLevel(level)
    return logger


def _error_code(logger, ex: Exception) -> int:
    if isinstance(ex, WaringLabError):
        logger.error("{}: {}".format(type(ex).__name__, ex))
        return ex.exit_code
    raise ex


def _waring_lab_parse_args(args):
    parser = argparse.ArgumentParser(description=waring_lab.__doc__)
    parser.add_argument("config", help="Path to the experiment configuration")
    parser.add_argument(
        "--dry-run",
        action="store_true",
        default=False,
        help="Validate the configuration and print compute estimates without "
        "running",
    )
    parser.add_argument(
        "--output-dir", default=None, help="Overrides 'output_dir' of the config"
    )
    parser.add_argument(
        "--workers", type=_pos_int_type, default=None, help="Overrides 'workers'"
    )
    parser.add_argument("--grid", default=None, help="Overrides 'grid'")
    parser.add_argument("--samples", default=None, help="Overrides 'samples'")
    parser.add_argument("--sigma", default=None, help="Overrides 'sigma'")
    parser.add_argument(
        "--panel-budget", default=None, help="Overrides 'panel_budget'"
    )
    parser.add_argument(
        "--set",
        type=_setting_type,
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override any key of the config. Keys of the [experiment] section "
        "go there, other keys to the command's section",
    )
    _add_common_args(parser)
    return parser.parse_args(args)


def waring_lab(args: Optional[Sequence[str]] = None) -> int:
    """Run an experiment described by a configuration file

    Outputs (CSV, JSON, and gnuplot data) and a ``report.json`` with the checks
    and a manifest of output hashes are written to the configured output directory.
    """
    try:
        options = _waring_lab_parse_args(args)
    except SystemExit as ex:
        return ex.code
    logger = _setup_logging(options)
    overrides = dict(options.set)
    for key in ("output_dir", "workers", "grid", "samples", "sigma", "panel_budget"):
        value = getattr(options, key)
        if value is not None:
            overrides[key] = value
    try:
        config_ = load_config(options.config, overrides)
        report = run(config_, options.dry_run)
    except Exception as ex:
        return _error_code(logger, ex)
    if options.dry_run:
        print(json.dumps(_plain(report.estimates), sort_keys=True, indent=2))
    else:
        for name, check in report.checks.items():
            logger.info("{}: {} ({})".format(name, check["value"], check["passed"]))
        if not report.passed:
            logger.warning("Some checks failed; see {}".format(config_.output_dir))
    return 0


def _hk_solve_parse_args(args):
    parser = argparse.ArgumentParser(description=hk_solve.__doc__)
    parser.add_argument("--k", type=_pos_int_type, required=True, help="Equations")
    parser.add_argument("--s", type=_pos_int_type, required=True, help="Unknowns")
    parser.add_argument(
        "--targets",
        type=_big_int_type,
        nargs="+",
        required=True,
        help="N_1 ... N_k",
    )
    parser.add_argument(
        "--xmax", type=_pos_int_type, required=True, help="Largest unknown"
    )
    parser.add_argument(
        "--budget",
        type=_pos_int_type,
        default=config.DFS_NODE_BUDGET,
        help="Search nodes before giving up",
    )
    parser.add_argument("--workers", type=_pos_int_type, default=1)
    parser.add_argument(
        "--output",
        default=None,
        help="Where to write the JSON result. Defaults to stdout",
    )
    _add_common_args(parser)
    return parser.parse_args(args)


def hk_solve(args: Optional[Sequence[str]] = None) -> int:
    """Solve x_1^j + ... + x_s^j = N_j for j = 1, ..., k in positive integers

    Prints (or writes) the instance, its solvability conditions, and the solution
    (null if there is none up to --xmax)
    """
    try:
        options = _hk_solve_parse_args(args)
    except SystemExit as ex:
        return ex.code
    logger = _setup_logging(options)
    try:
        inst = HKInstance(options.k, options.s, options.targets)
    except ValueError as ex:
        logger.error(str(ex))
        return ConfigError.exit_code
    try:
        conditions = check_conditions(inst)
        solution = solve_bruteforce(inst, options.xmax, options.budget, options.workers)
    except Exception as ex:
        return _error_code(logger, ex)
    result = {
        "instance": inst.to_dict(),
        "conditions": conditions.to_dict(),
        "solution": None if solution is None else solution.to_list(),
    }
    if options.output is None:
        print(json.dumps(_plain(result), sort_keys=True))
    else:
        write_json(options.output, result)
    return 0


def _represent_parse_args(args):
    parser = argparse.ArgumentParser(description=represent.__doc__)
    parser.add_argument(
        "--function", required=True, help="The function, in prefix notation"
    )
    parser.add_argument("--shift", type=float, default=None)
    parser.add_argument("--N", type=_big_int_type, required=True, help="Target")
    parser.add_argument("--s", type=_pos_int_type, required=True, help="Summands")
    parser.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    parser.add_argument(
        "--xmax",
        type=_pos_int_type,
        default=None,
        help="Hilbert-Kamke search cap. Chosen from the targets if unset",
    )
    parser.add_argument(
        "--declared",
        nargs=2,
        metavar=("CLASS", "D_F"),
        default=None,
        help="Declare the function's class (I or III) and degree instead of "
        "classifying it numerically",
    )
    parser.add_argument(
        "--scan",
        type=_nonneg_int_type,
        default=0,
        metavar="COUNT",
        help="Represent COUNT consecutive targets starting at --N and write CSV",
    )
    parser.add_argument(
        "--budget", type=_pos_int_type, default=config.DFS_NODE_BUDGET
    )
    parser.add_argument("--workers", type=_pos_int_type, default=1)
    parser.add_argument(
        "--output",
        default=None,
        help="Where to write the JSON result (or CSV when scanning). Defaults to "
        "stdout",
    )
    _add_common_args(parser)
    return parser.parse_args(args)


def represent(args: Optional[Sequence[str]] = None) -> int:
    """Write N as f(X + y_1) + ... + f(X + y_s) up to a bounded residual"""
    try:
        options = _represent_parse_args(args)
    except SystemExit as ex:
        return ex.code
    logger = _setup_logging(options)
    try:
        f = FunctionExpr.parse(options.function, options.shift)
        declared = None
        if options.declared is not None:
            declared = DegreeProfile(options.declared[0], int(options.declared[1]))
    except WaringLabError as ex:
        return _error_code(logger, ex)
    except ValueError as ex:
        logger.error(str(ex))
        return ConfigError.exit_code
    try:
        profile = classify(f, declared)
        if options.scan:
            rows = representation_scan(
                f,
                profile,
                range(options.N, options.N + options.scan),
                options.s,
                options.delta,
                options.xmax,
                options.budget,
                options.workers,
            )
        else:
            result = assemble(
                f,
                profile,
                options.N,
                options.s,
                options.delta,
                options.xmax,
                options.budget,
                options.workers,
            )
    except Exception as ex:
        return _error_code(logger, ex)
    if options.scan:
        if options.output is None:
            print(",".join(SCAN_HEADER))
            for row in rows:
                print(",".join(str(x) for x in _plain(row.to_row())))
        else:
            write_csv(options.output, SCAN_HEADER, (r.to_row() for r in rows))
    elif options.output is None:
        print(json.dumps(_plain(result.to_dict()), sort_keys=True))
    else:
        write_json(options.output, result.to_dict())
    return 0
