# pylint: skip-file

import json
import os

import pytest

from pydrobert.waring import command_line


def _hk_args(*extra):
    return ["--k", "2", "--s", "2", "--targets", "5", "13", "--xmax", "10"] + list(
        extra
    )


def test_hk_solve(temp_dir):
    out = os.path.join(temp_dir, "hk.json")
    assert not command_line.hk_solve(_hk_args("--output", out))
    with open(out) as file_:
        result = json.load(file_)
    assert result["solution"] == [3, 2]
    assert result["conditions"]["plausible"]


def test_hk_solve_stdout(capsys):
    assert not command_line.hk_solve(_hk_args("--workers", "2"))
    result = json.loads(capsys.readouterr().out)
    assert result["solution"] == [3, 2]


def test_hk_solve_no_solution(capsys):
    assert not command_line.hk_solve(
        ["--k", "2", "--s", "2", "--targets", "4", "12", "--xmax", "10"]
    )
    assert json.loads(capsys.readouterr().out)["solution"] is None


@pytest.mark.parametrize(
    "args,code",
    [
        (_hk_args("--budget", "1"), 4),
        (["--k", "2", "--s", "2"], 2),
        (["--k", "2", "--s", "2", "--targets", "5", "--xmax", "10"], 2),
        (["--k", "0", "--s", "2", "--targets", "5", "--xmax", "10"], 2),
    ],
)
def test_hk_solve_failures(args, code):
    assert command_line.hk_solve(args) == code


def _config(temp_dir, text):
    path = os.path.join(temp_dir, "exp.ini")
    with open(path, "w") as file_:
        file_.write(text)
    return path


def test_waring_lab(temp_dir):
    out = os.path.join(temp_dir, "out")
    path = _config(
        temp_dir,
        "[experiment]\n"
        "function = pow(x, 2)\n"
        "command = sumset-gaps\n"
        "\n"
        "[sumset-gaps]\n"
        "s = 5\n"
        "lo = 34\n"
        "hi = 2000\n",
    )
    assert not command_line.waring_lab([path, "--output-dir", out, "--workers", "2"])
    with open(os.path.join(out, "report.json")) as file_:
        report = json.load(file_)
    assert report["checks"]["max_gap"]["value"] == 0
    assert report["config"]["experiment"]["workers"] == 2


def test_waring_lab_dry_run(temp_dir, capsys):
    out = os.path.join(temp_dir, "out")
    path = _config(
        temp_dir,
        "[experiment]\n"
        "function = pow(x, 2)\n"
        "command = sumset-gaps\n"
        "output_dir = {}\n"
        "\n"
        "[sumset-gaps]\n"
        "s = 5\n"
        "lo = 34\n"
        "hi = 2000\n".format(out),
    )
    assert not command_line.waring_lab([path, "--dry-run"])
    estimates = json.loads(capsys.readouterr().out)
    assert estimates["bitset_bits"] == 2001
    assert not os.path.exists(out)
    assert command_line.waring_lab([path, "--dry-run", "--set", "hi=10000000000"]) == 4


def test_waring_lab_failures(temp_dir):
    path = _config(
        temp_dir,
        "[experiment]\n"
        "function = pow(x, 2)\n"
        "command = circle-check\n"
        "\n"
        "[circle-check]\n"
        "N = 25\n"
        "s = 2\n"
        "sigm = 0.5\n",
    )
    assert command_line.waring_lab([path]) == 2
    assert command_line.waring_lab([os.path.join(temp_dir, "missing.ini")]) == 2
    assert command_line.waring_lab([]) == 2
    path = _config(
        temp_dir,
        "[experiment]\n"
        "function = pow(x, 0.5)\n"
        "command = circle-check\n"
        "output_dir = {}\n"
        "\n"
        "[circle-check]\n"
        "N = 25\n"
        "s = 2\n".format(os.path.join(temp_dir, "out")),
    )
    assert command_line.waring_lab([path]) == 3


def test_represent(temp_dir):
    out = os.path.join(temp_dir, "rep.json")
    assert not command_line.represent(
        ["--function", "pow(x, 2)", "--N", "1e6", "--s", "8", "--output", out]
    )
    with open(out) as file_:
        result = json.load(file_)
    assert result["N"] == 10 ** 6
    assert len(result["ys"]) == 8


def test_represent_scan(temp_dir):
    out = os.path.join(temp_dir, "scan.csv")
    assert not command_line.represent(
        [
            "--function",
            "pow(x, 2)",
            "--N",
            "1000000",
            "--s",
            "8",
            "--scan",
            "3",
            "--output",
            out,
        ]
    )
    with open(out) as file_:
        lines = file_.read().splitlines()
    assert len(lines) == 4


@pytest.mark.parametrize(
    "args,code",
    [
        (["--function", "pow(x, 1.5)", "--N", "1000000", "--s", "8"], 3),
        (["--function", "pow(x, ", "--N", "1000000", "--s", "8"], 2),
        (["--function", "pow(x, 2)", "--N", "1.5", "--s", "8"], 2),
        (["--function", "pow(x, 2)", "--s", "8"], 2),
    ],
)
def test_represent_failures(args, code):
    assert command_line.represent(args) == code
