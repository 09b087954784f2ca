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

"""Config-driven experiments

An experiment is described by a configuration file with an ``[experiment]``
section naming the function and the command, and a section named after the command
holding its parameters::

    [experiment]
    function = pow(x, 2)
    command = sumset-gaps
    output_dir = squares

    [sumset-gaps]
    s = 5
    lo = 34
    hi = 100000

The same structure can be written in JSON, with one object per section. See
:ref:`config` for every key. :func:`run` writes the command's outputs to
``output_dir`` and returns a :class:`RunReport`, which is also written there as
``report.json``. Outputs depend only on the configuration and the package version.
"""

import abc
import configparser
import difflib
import json
import logging
import math
import os
import re
import time

from collections import OrderedDict
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import pydrobert.waring as waring

from pydrobert.waring import AliasedFactory
from pydrobert.waring import BudgetExceeded
from pydrobert.waring import config
from pydrobert.waring import ConfigError
from pydrobert.waring import DomainError
from pydrobert.waring import basis
from pydrobert.waring import circle
from pydrobert.waring import kamke
from pydrobert.waring import represent
from pydrobert.waring.degree import classify
from pydrobert.waring.degree import DegreeProfile
from pydrobert.waring.functions import _mp
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.util import file_sha256
from pydrobert.waring.util import solve_increasing
from pydrobert.waring.util import write_csv
from pydrobert.waring.util import write_json
from pydrobert.waring.util import write_plotdata

__all__ = [
    "emit_plotdata",
    "Experiment",
    "ExperimentConfig",
    "load_config",
    "run",
    "RunReport",
]

REPORT_NAME = "report.json"

logger = logging.getLogger(__name__)


_REQUIRED = object()


def _to_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer, got {!r}".format(value))
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError("expected an integer, got {!r}".format(value))
        return int(value)
    value = str(value).strip()
    try:
        return int(value)
    except ValueError:
        pass
    as_float = float(value)
    if not as_float.is_integer():
        raise ValueError("expected an integer, got {!r}".format(value))
    return int(as_float)


def _to_float(value) -> float:
    if isinstance(value, bool):
        raise ValueError("expected a number, got {!r}".format(value))
    return float(value)


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    value = str(value).strip().lower()
    if value in {"1", "yes", "true", "on"}:
        return True
    if value in {"0", "no", "false", "off"}:
        return False
    raise ValueError("expected a boolean, got {!r}".format(value))


def _to_str(value) -> str:
    if not isinstance(value, str):
        raise ValueError("expected a string, got {!r}".format(value))
    return value.strip()


def _to_int_list(value) -> List[int]:
    if isinstance(value, str):
        value = [x for x in re.split(r"[\s,]+", value.strip()) if x]
    return [_to_int(x) for x in value]


def _choice(*choices: str) -> Callable[[Any], str]:
    def _convert(value):
        value = _to_str(value)
        if value not in choices:
            raise ValueError("expected one of {}, got '{}'".format(choices, value))
        return value

    return _convert


class Param(object):
    """A typed key of a configuration section

    Parameters
    ----------
    convert : callable
        Converts a string (or JSON value) to the parameter's type, raising
        :class:`ValueError` on failure
    default : optional
        If unset, the key is required
    description : str, optional
    """

    def __init__(self, convert: Callable, default=_REQUIRED, description: str = ""):
        self.convert = convert
        self.default = default
        self.description = description

    @property
    def required(self) -> bool:
        return self.default is _REQUIRED


EXPERIMENT_PARAMS = OrderedDict(
    (
        ("function", Param(_to_str, None, "The function in prefix notation")),
        ("shift", Param(_to_float, None, "Shift of the argument")),
        ("command", Param(_to_str, description="The command to run")),
        ("output_dir", Param(_to_str, ".", "Where outputs are written")),
        (
            "precision",
            Param(
                _choice("double", "extended"),
                "double",
                "'extended' cross-checks every floor in extended precision",
            ),
        ),
        ("workers", Param(_to_int, 1, "Number of worker threads")),
        ("declared_class", Param(_choice("I", "II", "III"), None, "Declared class")),
        ("declared_d_f", Param(_to_int, None, "Declared degree d_f")),
        ("declared_c_f", Param(_to_float, 0.0, "Declared degree c_f")),
        ("bitset_budget", Param(_to_int, config.BITSET_BUDGET, "Max sumset bits")),
        ("dfs_budget", Param(_to_int, config.DFS_NODE_BUDGET, "Max search nodes")),
        ("panel_budget", Param(_to_int, config.PANEL_BUDGET, "Max panels")),
        (
            "convolution_budget",
            Param(_to_int, config.CONVOLUTION_BUDGET, "Max convolution table size"),
        ),
    )
)


class ExperimentConfig(object):
    """A validated experiment configuration

    Parameters
    ----------
    experiment : dict
        Raw keys of the ``[experiment]`` section (see :obj:`EXPERIMENT_PARAMS`),
        including ``command``
    params : dict, optional
        Raw parameters of the command. Converted and validated by the command's
        :class:`Experiment`
    lines : dict, optional
        Maps ``(section, key)`` to the line it was read from, for error messages

    Raises
    ------
    ConfigError
        If a key is unknown, a value does not convert, or a required key is missing
    """

    def __init__(
        self,
        experiment: dict,
        params: Optional[dict] = None,
        lines: Optional[dict] = None,
    ):
        self.lines = dict() if lines is None else lines
        values = _convert_section(
            "experiment", EXPERIMENT_PARAMS, experiment, self.lines
        )
        self.command = values["command"]
        try:
            cls = Experiment.subclass_from_alias(self.command)
        except ValueError:
            raise ConfigError(
                "unknown command '{}'{}".format(
                    self.command, _suggest(self.command, Experiment.all_aliases())
                ),
                self.lines.get(("experiment", "command")),
            )
        self.function = values["function"]
        if self.function is None and cls.needs_function:
            raise ConfigError(
                "command '{}' needs a function".format(self.command),
                self.lines.get(("experiment", "command")),
            )
        self.shift = values["shift"]
        self.output_dir = values["output_dir"]
        self.precision = values["precision"]
        self.workers = values["workers"]
        if self.workers < 1:
            raise ConfigError(
                "workers must be positive", self.lines.get(("experiment", "workers"))
            )
        self.declared = None
        if values["declared_class"] is not None:
            if values["declared_d_f"] is None:
                raise ConfigError(
                    "declared_class needs declared_d_f",
                    self.lines.get(("experiment", "declared_class")),
                )
            try:
                self.declared = DegreeProfile(
                    values["declared_class"],
                    values["declared_d_f"],
                    values["declared_c_f"],
                )
            except ValueError as e:
                raise ConfigError(
                    str(e), self.lines.get(("experiment", "declared_class"))
                )
        self.budgets = dict(
            (name, values[name + "_budget"])
            for name in ("bitset", "dfs", "panel", "convolution")
        )
        self.params = _convert_section(
            self.command, cls.params, params or dict(), self.lines
        )

    def to_dict(self) -> dict:
        """The configuration as JSON-ready sections"""
        experiment = OrderedDict(
            (
                ("function", self.function),
                ("shift", self.shift),
                ("command", self.command),
                ("output_dir", self.output_dir),
                ("precision", self.precision),
                ("workers", self.workers),
            )
        )
        if self.declared is not None:
            experiment["declared_class"] = self.declared.function_class
            experiment["declared_d_f"] = self.declared.d_f
            experiment["declared_c_f"] = self.declared.c_f
        for name, value in self.budgets.items():
            experiment[name + "_budget"] = value
        return {"experiment": experiment, self.command: dict(self.params)}


def _suggest(key: str, options: Sequence[str]) -> str:
    close = difflib.get_close_matches(key, list(options), n=1)
    return "; did you mean '{}'?".format(close[0]) if close else ""


def _convert_section(
    section: str, params: Dict[str, Param], raw: dict, lines: dict
) -> dict:
    out = dict()
    for key, value in raw.items():
        line = lines.get((section, key))
        if key not in params:
            raise ConfigError(
                "unknown key '{}' in [{}]{}".format(
                    key, section, _suggest(key, params)
                ),
                line,
            )
        if value is None:
            out[key] = params[key].default
            continue
        try:
            out[key] = params[key].convert(value)
        except (TypeError, ValueError) as e:
            raise ConfigError("bad value for '{}': {}".format(key, e), line)
    for key, param in params.items():
        if key in out:
            continue
        if param.required:
            raise ConfigError("[{}] is missing the key '{}'".format(section, key))
        out[key] = param.default
    return out


_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=;#\s\[][^=]*?)\s*=")
_JSON_KEY = re.compile(r'"((?:[^"\\]|\\.)*)"\s*:')


def _ini_lines(text: str) -> dict:
    lines, section = dict(), None
    for no, line in enumerate(text.splitlines(), 1):
        match = _SECTION.match(line)
        if match:
            section = match.group(1).strip()
            lines.setdefault((section, None), no)
            continue
        match = _KEY.match(line)
        if match and section is not None:
            lines.setdefault((section, match.group(1)), no)
    return lines


def _json_lines(text: str) -> dict:
    # sections are the top-level keys; good enough for error messages
    lines, section, depth = dict(), None, 0
    for no, line in enumerate(text.splitlines(), 1):
        for match in _JSON_KEY.finditer(line):
            key = match.group(1)
            if depth <= 1:
                section = key
                lines.setdefault((section, None), no)
            else:
                lines.setdefault((section, key), no)
        depth += line.count("{") - line.count("}")
    return lines


def _parse_ini(text: str, path: str) -> Tuple[dict, dict]:
    parser = configparser.ConfigParser(
        interpolation=None,
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        default_section="\0",
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=path)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError("expected a '[section]' header before any key", e.lineno)
    except configparser.DuplicateSectionError as e:
        raise ConfigError("section [{}] appears twice".format(e.section), e.lineno)
    except configparser.DuplicateOptionError as e:
        raise ConfigError(
            "key '{}' appears twice in [{}]".format(e.option, e.section), e.lineno
        )
    except configparser.ParsingError as e:
        lineno = e.errors[0][0] if e.errors else None
        raise ConfigError("expected 'key = value' or '[section]'", lineno)
    sections = OrderedDict(
        (name, OrderedDict(parser.items(name))) for name in parser.sections()
    )
    return sections, _ini_lines(text)


def _parse_json(text: str) -> Tuple[dict, dict]:
    try:
        obj = json.loads(text, object_pairs_hook=OrderedDict)
    except ValueError as e:
        raise ConfigError("invalid JSON: {}".format(e.msg), getattr(e, "lineno", None))
    if not isinstance(obj, dict) or not all(isinstance(v, dict) for v in obj.values()):
        raise ConfigError("expected a JSON object of section objects", 1)
    return obj, _json_lines(text)


def _from_sections(
    sections: dict, lines: dict, overrides: Optional[dict] = None
) -> ExperimentConfig:
    if "experiment" not in sections:
        raise ConfigError("missing the [experiment] section")
    experiment = dict(sections["experiment"])
    command = experiment.get("command")
    if command is None:
        raise ConfigError(
            "[experiment] is missing the key 'command'",
            lines.get(("experiment", None)),
        )
    for name in sections:
        if name not in {"experiment", command}:
            raise ConfigError(
                "unexpected section [{}] for command '{}'{}".format(
                    name, command, _suggest(name, ["experiment", command])
                ),
                lines.get((name, None)),
            )
    params = dict(sections.get(command, dict()))
    for key, value in (overrides or dict()).items():
        if key in EXPERIMENT_PARAMS:
            experiment[key] = value
        else:
            params[key] = value
    return ExperimentConfig(experiment, params, lines)


def load_config(path: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Read an experiment configuration from a file

    The file is JSON if its first non-blank character is ``{``, otherwise the
    ``key = value`` grammar with ``[section]`` headers.

    Parameters
    ----------
    path : str
    overrides : dict, optional
        Values replacing those of the file. Keys of the ``[experiment]`` section go
        there; any other key goes to the command's section

    Raises
    ------
    ConfigError
        With the offending line when known
    """
    try:
        with open(path, encoding="utf-8") as file_:
            text = file_.read()
    except IOError as e:
        raise ConfigError("cannot read '{}': {}".format(path, e))
    if text.lstrip().startswith("{"):
        sections, lines = _parse_json(text)
    else:
        sections, lines = _parse_ini(text, path)
    return _from_sections(sections, lines, overrides)


def emit_plotdata(
    path: str,
    columns: Sequence[str],
    rows,
    config_: Optional[ExperimentConfig] = None,
):
    """Write gnuplot-ready columns with a comment header naming the experiment"""
    comments = ["pydrobert-waring {}".format(waring.__version__)]
    if config_ is not None:
        comments.append("command: {}".format(config_.command))
        if config_.function is not None:
            comments.append("function: {}".format(config_.function))
    write_plotdata(path, columns, rows, comments)


class RunReport(object):
    """The summary of one run of an experiment

    Attributes
    ----------
    config : dict
        The configuration, as JSON-ready sections
    version : str
    wall_time : float
        Seconds
    dry_run : bool
    checks : dict
        Maps a check name to a dictionary with a measured ``value`` and whether it
        ``passed`` (:obj:`None` for purely informational measurements)
    manifest : dict
        Maps every output file (relative to the output directory) to the SHA-256 of
        its content
    estimates : dict
        Compute estimates. Filled on dry runs
    """

    def __init__(self, config_: ExperimentConfig, dry_run: bool = False):
        self.config = config_.to_dict()
        self.version = waring.__version__
        self.wall_time = 0.0
        self.dry_run = dry_run
        self.checks = OrderedDict()
        self.manifest = OrderedDict()
        self.estimates = OrderedDict()

    @property
    def passed(self) -> bool:
        """Whether no check failed"""
        return all(c["passed"] is not False for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "wall_time": self.wall_time,
            "dry_run": self.dry_run,
            "checks": self.checks,
            "manifest": self.manifest,
            "estimates": self.estimates,
            "passed": self.passed,
        }


class _Context(object):
    # what an experiment sees while it runs

    def __init__(self, config_: ExperimentConfig, report: RunReport):
        self.config = config_
        self.report = report
        self.workers = config_.workers
        self.budgets = config_.budgets
        self.params = config_.params
        self._f = self._profile = None

    @property
    def f(self) -> FunctionExpr:
        if self._f is None:
            try:
                self._f = FunctionExpr.parse(self.config.function, self.config.shift)
            except DomainError:
                raise
            except ValueError as e:
                raise ConfigError(
                    "bad function: {}".format(e),
                    self.config.lines.get(("experiment", "function")),
                )
        return self._f

    @property
    def profile(self) -> DegreeProfile:
        if self._profile is None:
            self._profile = classify(self.f, self.config.declared)
        return self._profile

    def path(self, name: str) -> str:
        return os.path.join(self.config.output_dir, name)

    def add(self, name: str):
        self.report.manifest[name] = file_sha256(self.path(name))

    def csv(self, name: str, header: Sequence[str], rows):
        write_csv(self.path(name), header, rows)
        self.add(name)

    def json(self, name: str, obj):
        write_json(self.path(name), obj)
        self.add(name)

    def plot(self, name: str, columns: Sequence[str], rows):
        emit_plotdata(self.path(name), columns, rows, self.config)
        self.add(name)

    def validate(self, profile: bool = False):
        """Parse the function, and classify it if `profile`"""
        return self.profile if profile else self.f

    def check(self, name: str, value, passed: Optional[bool] = None):
        self.report.checks[name] = {"value": value, "passed": passed}

    def estimate(self, name: str, value, budget: Optional[int] = None):
        self.report.estimates[name] = value
        if budget is not None:
            self.report.estimates[name + "_budget"] = budget
            self.check(name + "_within_budget", value, bool(value <= budget))


class Experiment(AliasedFactory):
    """A command that can be run from a configuration

    Subclasses declare their parameters in `params`; :meth:`run` reads the
    converted values from the context and writes outputs through it.
    """

    params = OrderedDict()
    needs_function = True

    @abc.abstractmethod
    def run(self, ctx: _Context):
        pass

    def estimate(self, ctx: _Context):
        """Fill in compute estimates without running"""
        pass


class Classify(Experiment):
    """Classify the function and report its degrees"""

    aliases = {"classify"}

    def run(self, ctx):
        profile = ctx.profile
        ctx.json(
            "profile.json", {"function": str(ctx.f), "profile": profile.to_dict()}
        )
        ctx.check("function_class", profile.function_class)
        ctx.check("degree", profile.degree)
        ctx.check("c_f", profile.c_f)

    def estimate(self, ctx):
        ctx.validate()


class GenerateSequence(Experiment):
    """Generate ``[f(n)]`` on a window"""

    aliases = {"sequence"}
    params = OrderedDict(
        (
            ("n_start", Param(_to_int, 1, "First n")),
            ("count", Param(_to_int, description="Number of terms")),
        )
    )

    def run(self, ctx):
        n_start, count = ctx.params["n_start"], ctx.params["count"]
        seq = basis.gen_sequence(ctx.f, n_start, count, ctx.workers)
        seq.to_csv(ctx.path("sequence.csv"))
        ctx.add("sequence.csv")
        ctx.check("monotone", seq.monotone, seq.monotone or not seq.increasing)
        ctx.check("extended_floors", int(seq.precision_flags.sum()))
        ctx.check("ambiguous_floors", int(seq.ambiguous.sum()))
        if ctx.config.precision == "extended":
            mismatches = 0
            for n, value, amb in zip(seq.n, seq.values, seq.ambiguous):
                if amb:
                    continue
                exact = int(_mp.floor(ctx.f.eval(int(n), "extended")))
                mismatches += exact != int(value)
            ctx.check("extended_mismatches", mismatches, mismatches == 0)

    def estimate(self, ctx):
        ctx.validate()
        ctx.estimate("terms", ctx.params["count"], config.MAX_SEQUENCE_COUNT)


def _terms_upto(f: FunctionExpr, limit: int) -> int:
    return int(math.floor(solve_increasing(lambda x: f.eval(x), limit + 1.0, 1.0)))


class SumsetGaps(Experiment):
    """Gaps of the ``s``-fold sumset of ``[f(n)]`` on a window"""

    aliases = {"sumset-gaps"}
    params = OrderedDict(
        (
            ("s", Param(_to_int, description="Number of summands")),
            ("lo", Param(_to_int, description="Window start")),
            ("hi", Param(_to_int, description="Window end")),
            ("doublings", Param(_to_int, 0, "Times the window end is doubled")),
            ("bitmap", Param(_to_bool, False, "Dump the sumset bitmap")),
        )
    )

    def _limit(self, ctx):
        return ctx.params["hi"] << ctx.params["doublings"]

    def run(self, ctx):
        s, lo, hi = ctx.params["s"], ctx.params["lo"], ctx.params["hi"]
        doublings = ctx.params["doublings"]
        limit = self._limit(ctx)
        seq = basis.gen_sequence_upto(ctx.f, limit, ctx.workers)
        bm = basis.sumset_fold(seq, s, limit, ctx.budgets["bitset"], ctx.workers)
        reports = [basis.gap_report(bm, lo, hi << i) for i in range(doublings + 1)]
        stab = basis.StabilizationReport(reports)
        ctx.json("gaps.json", dict(reports[0].to_dict(), stabilization=stab.to_dict()))
        ctx.plot(
            "gaps.dat",
            ("gap", "count"),
            enumerate(reports[0].gap_histogram.tolist()),
        )
        if ctx.params["bitmap"]:
            bm.dump(ctx.path("sumset.bin"))
            ctx.add("sumset.bin")
        ctx.check("max_gap", reports[0].max_gap)
        ctx.check("max_gap_location", reports[0].max_gap_location)
        if doublings:
            ctx.check(
                "gap_stabilized", [r.max_gap for r in reports], stab.stabilized
            )

    def estimate(self, ctx):
        limit = self._limit(ctx)
        ctx.estimate("sequence_terms", _terms_upto(ctx.f, limit))
        ctx.estimate("bitset_bits", limit + 1, ctx.budgets["bitset"])


class BasisOrder(Experiment):
    """Search for the least ``s`` covering a window, then certify and represent"""

    aliases = {"basis-order"}
    params = OrderedDict(
        (
            ("lo", Param(_to_int, description="Window start")),
            ("hi", Param(_to_int, description="Window end")),
            ("s_max", Param(_to_int, 8, "Largest s tried")),
            ("certificate", Param(_to_bool, True, "Build a Bezout certificate")),
            ("target_start", Param(_to_int, None, "First target to represent")),
            ("target_count", Param(_to_int, 0, "Number of targets to represent")),
        )
    )

    def run(self, ctx):
        lo, hi, s_max = ctx.params["lo"], ctx.params["hi"], ctx.params["s_max"]
        seq = basis.gen_sequence_upto(ctx.f, hi, ctx.workers)
        s, reports = basis.basis_order_search(
            seq, lo, hi, s_max, ctx.workers, ctx.budgets["bitset"]
        )
        out = {"s": s, "reports": {str(t): r.to_dict() for t, r in reports.items()}}
        ctx.check("order", s, s is not None)
        if ctx.params["certificate"]:
            cert = basis.gcd_bezout(seq)
            ctx.check("certificate_verified", cert.verify(), cert.verify())
            out["certificate"] = cert.to_dict()
            count = ctx.params["target_count"]
            if s is not None and count:
                cert, bm, _ = basis.lemma3_certificate(
                    seq, s, hi, ctx.workers, ctx.budgets["bitset"]
                )
                out["certificate"] = cert.to_dict()
                start = ctx.params["target_start"]
                start = lo if start is None else start
                rows, verified = [], True
                for N in range(start, start + count):
                    parts = basis.represent_lemma3(N, seq, s, cert, bm)
                    verified &= sum(parts) == N
                    rows.append((N, len(parts), " ".join(str(p) for p in parts)))
                ctx.csv("representations.csv", ("N", "parts", "summands"), rows)
                ctx.check("representations_verified", count, verified)
        ctx.json("basis_order.json", out)
        ctx.csv(
            "basis_order.csv",
            ("s", "max_gap", "location"),
            ((t, r.max_gap, r.max_gap_location) for t, r in reports.items()),
        )

    def estimate(self, ctx):
        hi = ctx.params["hi"]
        ctx.estimate("sequence_terms", _terms_upto(ctx.f, hi))
        ctx.estimate(
            "bitset_bits", (hi + 1) * ctx.params["s_max"], ctx.budgets["bitset"]
        )


class Residues(Experiment):
    """Residue classes hit by ``[f(n)]`` for every modulus up to ``q_max``"""

    aliases = {"residues"}
    params = OrderedDict(
        (
            ("q_max", Param(_to_int, 20, "Largest modulus")),
            ("n_max", Param(_to_int, description="Largest n")),
        )
    )

    def run(self, ctx):
        rows, full = [], True
        for q in range(1, ctx.params["q_max"] + 1):
            seen = basis.residue_coverage(ctx.f, q, ctx.params["n_max"], ctx.workers)
            missing = sorted(set(range(q)) - seen)
            full &= not missing
            rows.append((q, len(seen), " ".join(str(r) for r in missing)))
        ctx.csv("residues.csv", ("q", "covered", "missing"), rows)
        ctx.check("all_residues_covered", full, full)

    def estimate(self, ctx):
        ctx.validate()
        ctx.estimate("terms", ctx.params["n_max"], config.MAX_SEQUENCE_COUNT)


class Density(Experiment):
    """Histogram of ``{f(n) / q}``"""

    aliases = {"density"}
    params = OrderedDict(
        (
            ("q", Param(_to_int, 1, "Modulus")),
            ("n_max", Param(_to_int, description="Largest n")),
            ("bins", Param(_to_int, 10, "Number of bins")),
            ("tolerance", Param(_to_float, 0.05, "Largest accepted deviation")),
        )
    )

    def run(self, ctx):
        report = basis.fractional_density(
            ctx.f, ctx.params["q"], ctx.params["n_max"], ctx.params["bins"], ctx.workers
        )
        rows = list(zip(report.bin_centers, report.frequencies, report.counts))
        ctx.csv("density.csv", ("bin_center", "frequency", "count"), rows)
        ctx.plot("density.dat", ("bin_center", "frequency"), (r[:2] for r in rows))
        ctx.check(
            "max_deviation",
            report.max_deviation,
            report.max_deviation < ctx.params["tolerance"],
        )

    def estimate(self, ctx):
        ctx.validate()
        ctx.estimate("terms", ctx.params["n_max"], config.MAX_SEQUENCE_COUNT)


class CircleCheck(Experiment):
    """Exact and circle-method counts, plus major and minor arc diagnostics"""

    aliases = {"circle-check"}
    params = OrderedDict(
        (
            ("N", Param(_to_int, description="Target")),
            ("s", Param(_to_int, description="Number of summands")),
            ("grid", Param(_to_int, None, "Points of the trapezoidal sum")),
            (
                "steps",
                Param(_to_int, circle.MAJOR_ARC_STEPS, "Half-steps on the major arc"),
            ),
            ("samples", Param(_to_int, 1000, "Minor arc samples")),
            ("sigma", Param(_to_float, None, "Minor arc saving exponent")),
            ("major_arc", Param(_to_bool, True, "Run the major arc report")),
            ("minor_arc", Param(_to_bool, True, "Run the minor arc report")),
        )
    )

    def _grid(self, ctx, params):
        grid = ctx.params["grid"]
        if grid is None:
            vmax = int(math.floor(ctx.f.eval(math.floor(params.X1))))
            grid = 2 * params.s * vmax + params.N + 1
        return grid

    def run(self, ctx):
        N, s = ctx.params["N"], ctx.params["s"]
        params = circle.arc_params(ctx.f, ctx.profile, N, s)
        out = {"arcs": params.to_dict()}
        direct = circle.count_R_direct(
            ctx.f, N, s, params.X0, params.X1, ctx.budgets["convolution"]
        )
        grid = self._grid(ctx, params)
        numeric = circle.circle_R_numeric(ctx.f, N, s, params.X0, params.X1, grid)
        out["R"] = {"direct": direct, "numeric": numeric, "grid": grid}
        ctx.check("R_agreement", abs(numeric - direct), abs(numeric - direct) <= 1e-6)
        if ctx.params["major_arc"] and s >= 3:
            major = circle.major_arc_report(
                ctx.f,
                params,
                steps=ctx.params["steps"],
                panel_budget=ctx.budgets["panel"],
                workers=ctx.workers,
            )
            out["major_arc"] = major.to_dict()
            ctx.plot(
                "major_arc.dat",
                ("alpha", "|S|", "|T|", "|I|", "|S-T|", "|T-I|"),
                major.rows(),
            )
            ctx.check(
                "major_integral_positive", major.major_integral.real, major.positive
            )
            ctx.check("max_T_minus_I", major.max_T_minus_I)
        if ctx.params["minor_arc"]:
            sigma = ctx.params["sigma"]
            if sigma is None:
                sigma = circle.default_sigma(ctx.profile)
            minor = circle.minor_arc_sup(
                ctx.f, params, sigma, ctx.params["samples"], ctx.workers
            )
            out["minor_arc"] = minor.to_dict()
            ctx.check(
                "minor_arc_exponent", minor.exponent, minor.exponent <= minor.target
            )
        ctx.json("circle.json", out)

    def estimate(self, ctx):
        N, s = ctx.params["N"], ctx.params["s"]
        params = circle.arc_params(ctx.f, ctx.profile, N, s)
        ctx.estimate("convolution_entries", N + 1, ctx.budgets["convolution"])
        ctx.estimate("grid", self._grid(ctx, params))
        ctx.estimate("window_terms", int(params.X1) - int(params.X0))


class ExpsumScan(Experiment):
    """``S`` or ``T`` over a grid of ``alpha``"""

    aliases = {"expsum-scan"}
    params = OrderedDict(
        (
            ("lo", Param(_to_float, description="Sum over lo < n <= hi")),
            ("hi", Param(_to_float, description="Sum over lo < n <= hi")),
            ("alpha_min", Param(_to_float, 0.0, "First alpha")),
            ("alpha_max", Param(_to_float, 0.5, "Last alpha")),
            ("points", Param(_to_int, 1001, "Number of alphas")),
            ("variant", Param(_choice("S", "T"), "S", "S or T")),
        )
    )

    def run(self, ctx):
        p = ctx.params
        alphas = np.linspace(p["alpha_min"], p["alpha_max"], p["points"])
        sums = circle.expsum_scan(
            ctx.f, alphas, p["lo"], p["hi"], p["variant"], ctx.workers
        )
        rows = [x.to_row() for x in sums]
        ctx.csv("expsum.csv", ("alpha", "re", "im", "abs", "terms"), rows)
        ctx.plot(
            "expsum.dat",
            ("alpha", "|{}|".format(p["variant"])),
            ((r[0], r[3]) for r in rows),
        )
        ctx.check("max_abs", max(r[3] for r in rows) if rows else 0.0)

    def estimate(self, ctx):
        ctx.validate()
        terms = max(int(ctx.params["hi"]) - int(ctx.params["lo"]), 0)
        ctx.estimate("terms", terms, config.MAX_SEQUENCE_COUNT)
        ctx.estimate("evaluations", terms * ctx.params["points"])


class VdcScan(Experiment):
    """Exponential sums against derivative bounds on dyadic blocks"""

    aliases = {"vdc-scan"}
    params = OrderedDict(
        (
            ("k", Param(_to_int, 2, "Derivative order")),
            ("beta_min", Param(_to_float, description="Smallest beta")),
            ("beta_max", Param(_to_float, description="Largest beta")),
            ("betas", Param(_to_int, 10, "Number of log-spaced betas")),
            ("P_min", Param(_to_float, description="Smallest block start")),
            ("P_max", Param(_to_float, description="Largest block start")),
            ("Ps", Param(_to_int, 10, "Number of log-spaced block starts")),
        )
    )

    def run(self, ctx):
        p = ctx.params
        betas = np.geomspace(p["beta_min"], p["beta_max"], p["betas"])
        Ps = np.floor(np.geomspace(p["P_min"], p["P_max"], p["Ps"]))
        checks = circle.vdc_scan(ctx.f, p["k"], betas, Ps, ctx.workers)
        rows = [
            (c.params["beta"], c.params["P"], c.lhs, c.rhs_formula, c.ratio)
            for c in checks
        ]
        ctx.csv("vdc.csv", ("beta", "P", "lhs", "rhs", "ratio"), rows)
        ctx.plot("vdc.dat", ("P", "ratio"), ((r[1], r[4]) for r in rows))
        ctx.check("max_ratio", max(r[4] for r in rows))

    def estimate(self, ctx):
        ctx.validate()
        ctx.estimate(
            "terms", int(ctx.params["P_max"]) * ctx.params["betas"] * ctx.params["Ps"]
        )


class HKSolve(Experiment):
    """Solve a Hilbert-Kamke system"""

    aliases = {"hk-solve"}
    needs_function = False
    params = OrderedDict(
        (
            ("k", Param(_to_int, description="Number of equations")),
            ("s", Param(_to_int, description="Number of unknowns")),
            ("targets", Param(_to_int_list, description="N_1, ..., N_k")),
            ("x_max", Param(_to_int, description="Largest unknown")),
        )
    )

    def _instance(self, ctx):
        p = ctx.params
        try:
            return kamke.HKInstance(p["k"], p["s"], p["targets"])
        except ValueError as e:
            raise ConfigError(
                str(e), ctx.config.lines.get((ctx.config.command, "targets"))
            )

    def run(self, ctx):
        inst = self._instance(ctx)
        conditions = kamke.check_conditions(inst)
        solution = kamke.solve_bruteforce(
            inst, ctx.params["x_max"], ctx.budgets["dfs"], ctx.workers
        )
        ctx.json(
            "hk.json",
            {
                "instance": inst.to_dict(),
                "conditions": conditions.to_dict(),
                "solution": None if solution is None else solution.to_list(),
            },
        )
        ctx.check("plausible", conditions.plausible)
        ctx.check(
            "solved",
            solution is not None,
            None if solution is None else solution.solves(inst),
        )

    def estimate(self, ctx):
        inst = self._instance(ctx)
        ctx.estimate("first_level_branches", min(ctx.params["x_max"], inst.targets[0]))
        ctx.estimate("dfs_nodes", ctx.budgets["dfs"])


class Represent(Experiment):
    """Represent one target as a sum of values of ``f``"""

    aliases = {"represent"}
    params = OrderedDict(
        (
            ("N", Param(_to_int, description="Target")),
            ("s", Param(_to_int, description="Number of summands")),
            ("delta", Param(_to_float, represent.DEFAULT_DELTA, "In (0, 1/2)")),
            ("x_max", Param(_to_int, None, "Hilbert-Kamke search cap")),
        )
    )

    def run(self, ctx):
        p = ctx.params
        result = represent.assemble(
            ctx.f,
            ctx.profile,
            p["N"],
            p["s"],
            p["delta"],
            p["x_max"],
            ctx.budgets["dfs"],
            ctx.workers,
        )
        ctx.json("represent.json", result.to_dict())
        ctx.check("residual_int", result.residual_int)
        ctx.check(
            "residual_real",
            result.residual_real,
            abs(result.residual_real) <= result.C_run,
        )
        ctx.check("E_window", result.state.E.tolist(), result.state.E_window)
        ctx.check(
            "ratio_flagged",
            result.ratio_check.flagged,
            not result.ratio_check.flagged,
        )

    def estimate(self, ctx):
        ctx.validate(profile=True)
        ctx.estimate("dfs_nodes", ctx.budgets["dfs"])


class RepresentScan(Experiment):
    """Represent consecutive targets and track the residuals"""

    aliases = {"represent-scan"}
    params = OrderedDict(
        (
            ("N_start", Param(_to_int, description="First target")),
            ("count", Param(_to_int, 100, "Number of targets")),
            ("s", Param(_to_int, None, "Number of summands; suggested if unset")),
            ("s_max", Param(_to_int, 32, "Largest s tried when suggesting")),
            ("delta", Param(_to_float, represent.DEFAULT_DELTA, "In (0, 1/2)")),
            ("x_max", Param(_to_int, None, "Hilbert-Kamke search cap")),
        )
    )

    def run(self, ctx):
        p = ctx.params
        s = p["s"]
        if s is None:
            s = represent.suggest_s(
                ctx.f,
                ctx.profile,
                p["N_start"],
                range(2, p["s_max"] + 1),
                p["delta"],
                p["x_max"],
                ctx.budgets["dfs"],
            )
            if s is None:
                raise DomainError(
                    "no s <= {} represents N={}".format(p["s_max"], p["N_start"])
                )
        rows = represent.representation_scan(
            ctx.f,
            ctx.profile,
            range(p["N_start"], p["N_start"] + p["count"]),
            s,
            p["delta"],
            p["x_max"],
            ctx.budgets["dfs"],
            ctx.workers,
        )
        ctx.csv("represent_scan.csv", represent.SCAN_HEADER, (r.to_row() for r in rows))
        solved = [r for r in rows if r.hk_status == "ok"]
        ctx.plot(
            "represent_scan.dat",
            ("N", "residual_int"),
            ((r.N, r.residual_int) for r in solved),
        )
        ctx.check("s", s)
        ctx.check("solved", len(solved), len(solved) == len(rows))
        outside = [r.N for r in solved if not r.E_window]
        ctx.check("E_window", outside, not outside)
        if solved:
            ctx.check("max_abs_residual_int", max(abs(r.residual_int) for r in solved))

    def estimate(self, ctx):
        ctx.validate(profile=True)
        ctx.estimate("targets", ctx.params["count"])
        ctx.estimate("dfs_nodes_per_target", ctx.budgets["dfs"])


def run(config_: ExperimentConfig, dry_run: bool = False) -> RunReport:
    """Run an experiment

    Parameters
    ----------
    config_ : ExperimentConfig
    dry_run : bool, optional
        If :obj:`True`, only validate the configuration (including the function)
        and estimate the compute it needs. Nothing is written

    Raises
    ------
    ConfigError
    pydrobert.waring.WaringLabError
        From the command
    BudgetExceeded
        If a dry run finds an estimate over budget
    """
    start = time.perf_counter()
    experiment = Experiment.from_alias(config_.command)
    report = RunReport(config_, dry_run)
    ctx = _Context(config_, report)
    if dry_run:
        experiment.estimate(ctx)
        logger.info("estimates for '%s': %s", config_.command, dict(report.estimates))
        report.wall_time = time.perf_counter() - start
        if not report.passed:
            raise BudgetExceeded(
                "estimates exceed the budget: {}".format(dict(report.estimates))
            )
        return report
    os.makedirs(config_.output_dir, exist_ok=True)
    logger.info("running '%s' into '%s'", config_.command, config_.output_dir)
    experiment.run(ctx)
    report.wall_time = time.perf_counter() - start
    write_json(ctx.path(REPORT_NAME), report.to_dict())
    logger.info(
        "'%s' done in %.2fs; %d files, checks %s",
        config_.command,
        report.wall_time,
        len(report.manifest),
        "passed" if report.passed else "FAILED",
    )
    return report
