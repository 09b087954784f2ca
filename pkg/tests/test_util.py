# pylint: skip-file

import hashlib
import json
import math
import os

from fractions import Fraction

import numpy as np
import pytest

import pydrobert.waring.util as util

from pydrobert.waring import DomainError
from pydrobert.waring import SolveError


@pytest.mark.parametrize(
    "a,b", [(3, 8), (8, 3), (240, 46), (17, 17), (1, 10 ** 20), (2 ** 61 - 1, 12345)]
)
def test_extended_gcd(a, b):
    g, u, v = util.extended_gcd(a, b)
    assert g == math.gcd(a, b)
    assert u * a + v * b == g


def test_extended_gcd_example():
    assert util.extended_gcd(3, 8) == (1, 3, -1)


@pytest.mark.parametrize("alpha", [0.1234567, math.sqrt(2), -2.75, 1e-9, 0.999999])
def test_frac_product_matches_exact(alpha):
    np.random.seed(4)
    m = np.random.randint(0, 2 ** 50, size=200, dtype=np.int64)
    m[:3] = [0, 1, 2 ** 52 - 1]
    act = util.frac_product(alpha, m)
    assert np.all((act >= 0) & (act < 1))
    exact = Fraction(alpha)
    for mm, x in zip(m.tolist(), act.tolist()):
        exp = exact * mm
        exp = float(exp - math.floor(exp))
        dist = abs(exp - x)
        assert min(dist, 1 - dist) < 1e-9


def test_frac_product_out_of_range():
    with pytest.raises(DomainError):
        util.frac_product(0.5, [2 ** 52])
    with pytest.raises(DomainError):
        util.frac_product(0.5, [-1])


def test_unit_phase_sum():
    assert abs(util.unit_phase_sum(np.arange(8) / 8)) < 1e-12
    assert np.isclose(util.unit_phase_sum(np.zeros(5)), 5)
    assert np.isclose(util.unit_phase_sum([0.25]), 1j)


@pytest.mark.parametrize("order", [3, 7, 20])
def test_gauss_legendre_exact_for_polynomials(order):
    nodes, weights = util.gauss_legendre(order)
    for degree in range(2 * order):
        exp = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert np.isclose(np.sum(weights * nodes ** degree), exp, atol=1e-13)


def test_solve_increasing():
    x = util.solve_increasing(lambda t: t ** 3, 27.0, 1.0)
    assert np.isclose(x, 3.0, rtol=1e-12)
    x = util.solve_increasing(
        lambda t: t * math.log(t), 1e6, 2.0, deriv=lambda t: math.log(t) + 1
    )
    assert np.isclose(x * math.log(x), 1e6, rtol=1e-12)
    with pytest.raises(SolveError):
        util.solve_increasing(lambda t: t, 1.0, 2.0)


@pytest.mark.parametrize("workers", [1, 4])
def test_ordered_map_keeps_order(workers):
    assert util.ordered_map(lambda x: x * x, range(50), workers) == [
        x * x for x in range(50)
    ]


def test_atomic_open_discards_on_error(temp_dir):
    path = os.path.join(temp_dir, "out.txt")
    with pytest.raises(RuntimeError):
        with util.atomic_open(path) as file_:
            file_.write("partial")
            raise RuntimeError()
    assert os.listdir(temp_dir) == []
    with util.atomic_open(path) as file_:
        file_.write("done")
    assert os.listdir(temp_dir) == ["out.txt"]


def test_write_csv(temp_dir):
    path = os.path.join(temp_dir, "a.csv")
    util.write_csv(path, ["n", "a_n"], [(1, np.int64(2)), (3, "x,y")])
    with open(path, "rb") as file_:
        assert file_.read() == b'n,a_n\r\n1,2\r\n3,"x,y"\r\n'


def test_write_json(temp_dir):
    path = os.path.join(temp_dir, "a.json")
    util.write_json(path, {"b": np.arange(2), "a": 1 + 2j})
    with open(path) as file_:
        text = file_.read()
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [1.0, 2.0], "b": [0, 1]}


def test_write_plotdata(temp_dir):
    path = os.path.join(temp_dir, "a.dat")
    util.write_plotdata(path, ["t", "gap"], [(1, 0.5), (2, 3)], ["f = x"])
    with open(path) as file_:
        lines = file_.read().splitlines()
    assert lines == ["# f = x", "# t gap", "1 0.5", "2 3"]


def test_bitmap_layout(temp_dir):
    path = os.path.join(temp_dir, "a.bin")
    bits = np.zeros(13, dtype=bool)
    bits[[0, 2, 9, 12]] = True
    util.write_bitmap(path, bits, 5)
    with open(path, "rb") as file_:
        raw = file_.read()
    assert raw[:4] == b"WRNG"
    assert raw[4:8] == (5).to_bytes(4, "little")
    assert raw[8:16] == (12).to_bytes(8, "little")
    assert raw[16:] == bytes([0b00000101, 0b00010010])
    bits_, s = util.read_bitmap(path)
    assert s == 5
    assert np.array_equal(bits, bits_)


def test_file_sha256(temp_dir):
    path = os.path.join(temp_dir, "abc")
    with open(path, "wb") as file_:
        file_.write(b"abc")
    assert util.file_sha256(path) == hashlib.sha256(b"abc").hexdigest()
