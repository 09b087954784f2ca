# pylint: skip-file

import json
import os

import pytest

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import circle
from pydrobert.waring import ConfigError
from pydrobert.waring import experiment
from pydrobert.waring.degree import classify
from pydrobert.waring.util import file_sha256


def _write(path, text):
    with open(path, "w") as file_:
        file_.write(text)
    return path


def _ini(temp_dir, out, command, extra_experiment="", **params):
    lines = [
        "[experiment]",
        "function = pow(x, 2)  # squares",
        "command = {}".format(command),
        "output_dir = {}".format(out),
    ]
    if extra_experiment:
        lines.append(extra_experiment)
    lines += ["", "[{}]".format(command)]
    lines += ["{} = {}".format(k, v) for k, v in params.items()]
    return _write(os.path.join(temp_dir, "exp.ini"), "\n".join(lines) + "\n")


def test_load_ini(temp_dir):
    path = _ini(
        temp_dir, os.path.join(temp_dir, "out"), "sumset-gaps", s=5, lo=34, hi=2000
    )
    cfg = experiment.load_config(path)
    assert cfg.command == "sumset-gaps"
    assert cfg.function == "pow(x, 2)"
    assert cfg.workers == 1
    assert cfg.params["s"] == 5
    assert cfg.params["doublings"] == 0
    assert cfg.params["bitmap"] is False
    assert cfg.to_dict()["sumset-gaps"]["hi"] == 2000


def test_load_json(temp_dir):
    path = _write(
        os.path.join(temp_dir, "exp.json"),
        json.dumps(
            {
                "experiment": {"command": "hk-solve", "workers": 2},
                "hk-solve": {"k": 2, "s": 2, "targets": [5, 13], "x_max": 10},
            },
            indent=2,
        ),
    )
    cfg = experiment.load_config(path)
    assert cfg.function is None
    assert cfg.workers == 2
    assert cfg.params["targets"] == [5, 13]


def test_unknown_key_has_line_and_suggestion(temp_dir):
    path = _write(
        os.path.join(temp_dir, "exp.ini"),
        "[experiment]\n"
        "function = pow(x, 2)\n"
        "command = circle-check\n"
        "output_dir = out\n"
        "\n"
        "[circle-check]\n"
        "N = 25\n"
        "sigm = 0.5\n",
    )
    with pytest.raises(ConfigError, match="sigma") as info:
        experiment.load_config(path)
    assert info.value.line == 8
    assert str(info.value).startswith("line 8:")


def test_unknown_command_suggests(temp_dir):
    path = _ini(temp_dir, "out", "sumset-gap", s=5)
    with pytest.raises(ConfigError, match="sumset-gaps") as info:
        experiment.load_config(path)
    assert info.value.line == 3


@pytest.mark.parametrize(
    "text",
    [
        "function = pow(x, 2)\n",
        "[experiment]\nfunction = pow(x, 2)\n",
        "[experiment]\ncommand = hk-solve\n[hk-solve]\nk = 2\n",
        "[experiment]\ncommand = classify\n",
        "[experiment]\ncommand = hk-solve\nworkers = 0\n",
        "[experiment]\ncommand = hk-solve\n[sumset-gaps]\ns = 1\n",
        "[experiment]\ncommand = sequence\nfunction = x\n[sequence]\ncount = 1.5\n",
        "{\"experiment\": [1, 2]}",
    ],
)
def test_bad_configs(temp_dir, text):
    path = _write(os.path.join(temp_dir, "bad.cfg"), text)
    with pytest.raises(ConfigError):
        experiment.load_config(path)


def test_overrides(temp_dir):
    path = _ini(temp_dir, "out", "sumset-gaps", s=5, lo=34, hi=2000)
    cfg = experiment.load_config(
        path, {"workers": "3", "hi": "4000", "output_dir": "elsewhere"}
    )
    assert cfg.workers == 3
    assert cfg.output_dir == "elsewhere"
    assert cfg.params["hi"] == 4000
    with pytest.raises(ConfigError, match="'s'"):
        experiment.load_config(path, {"ss": "3"})


def test_dry_run_writes_nothing(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _ini(temp_dir, out, "sumset-gaps", s=5, lo=34, hi=2000)
    report = experiment.run(experiment.load_config(path), dry_run=True)
    assert report.dry_run
    assert report.estimates["bitset_bits"] == 2001
    assert report.estimates["sequence_terms"] == 44
    assert not os.path.exists(out)
    path = _ini(
        temp_dir,
        out,
        "sumset-gaps",
        extra_experiment="bitset_budget = 1000",
        s=5,
        lo=34,
        hi=2000,
    )
    with pytest.raises(BudgetExceeded):
        experiment.run(experiment.load_config(path), dry_run=True)
    assert not os.path.exists(out)


def test_sumset_gaps_run(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _ini(temp_dir, out, "sumset-gaps", s=5, lo=34, hi=2000, doublings=1)
    report = experiment.run(experiment.load_config(path))
    assert report.passed
    assert report.checks["max_gap"]["value"] == 0
    assert report.checks["gap_stabilized"]["passed"]
    assert set(report.manifest) == {"gaps.json", "gaps.dat"}
    for name, digest in report.manifest.items():
        assert file_sha256(os.path.join(out, name)) == digest
    with open(os.path.join(out, experiment.REPORT_NAME)) as file_:
        written = json.load(file_)
    assert written["manifest"] == dict(report.manifest)
    assert written["passed"]
    with open(os.path.join(out, "gaps.dat")) as file_:
        assert file_.readline().startswith("#")


def test_sumset_gaps_workers_agree(temp_dir):
    manifests = []
    for workers in (1, 3):
        out = os.path.join(temp_dir, "out{}".format(workers))
        path = _ini(
            temp_dir,
            out,
            "sumset-gaps",
            extra_experiment="workers = {}".format(workers),
            s=4,
            lo=200,
            hi=1000,
            bitmap="yes",
        )
        manifests.append(experiment.run(experiment.load_config(path)).manifest)
    assert manifests[0] == manifests[1]
    assert "sumset.bin" in manifests[0]


def test_hk_solve_run(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _write(
        os.path.join(temp_dir, "hk.ini"),
        "[experiment]\n"
        "command = hk-solve\n"
        "output_dir = {}\n"
        "\n"
        "[hk-solve]\n"
        "k = 2\n"
        "s = 2\n"
        "targets = 5, 13\n"
        "x_max = 10\n".format(out),
    )
    report = experiment.run(experiment.load_config(path))
    assert report.checks["solved"]["passed"]
    with open(os.path.join(out, "hk.json")) as file_:
        result = json.load(file_)
    assert result["solution"] == [3, 2]


def test_classify_run(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _ini(temp_dir, out, "classify")
    report = experiment.run(experiment.load_config(path))
    assert report.checks["function_class"]["value"] == "I"
    assert report.checks["degree"]["value"] == 2
    assert "profile.json" in report.manifest


def test_circle_check_run(temp_dir, squares):
    out = os.path.join(temp_dir, "out")
    path = _ini(temp_dir, out, "circle-check", N=25, s=2, minor_arc="no")
    report = experiment.run(experiment.load_config(path))
    assert report.checks["R_agreement"]["passed"]
    with open(os.path.join(out, "circle.json")) as file_:
        result = json.load(file_)
    params = circle.arc_params(squares, classify(squares), 25, 2)
    assert result["R"]["direct"] == circle.count_R_direct(
        squares, 25, 2, params.X0, params.X1
    )
    assert "major_arc" not in result


def test_emit_plotdata(temp_file_1_name):
    experiment.emit_plotdata(temp_file_1_name, ("a", "b"), [(1, 2.5), (2, 3)])
    with open(temp_file_1_name) as file_:
        lines = file_.read().splitlines()
    assert lines[0].startswith("# pydrobert-waring")
    assert lines[-2:] == ["1 2.5", "2 3"]


def test_represent_run_checks_E_window(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _ini(temp_dir, out, "represent", N=1000000, s=8)
    report = experiment.run(experiment.load_config(path))
    assert report.checks["E_window"]["passed"]
    E = report.checks["E_window"]["value"]
    assert E[0] == 0 and all(0 < e <= 2 for e in E[1:])


def test_represent_scan_run_checks_E_window(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _ini(temp_dir, out, "represent-scan", N_start=1000000, count=3, s=8)
    report = experiment.run(experiment.load_config(path))
    assert report.checks["E_window"]["passed"]
    assert report.checks["E_window"]["value"] == []
    with open(os.path.join(out, "represent_scan.csv")) as file_:
        lines = file_.read().splitlines()
    assert lines[0].endswith("E_window")
    assert all(line.endswith(",1") for line in lines[1:])
