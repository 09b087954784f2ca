# pylint: skip-file

import math

import mpmath
import numpy as np
import pytest

from pydrobert.waring import DomainError
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.functions import Li
from pydrobert.waring.functions import li
from pydrobert.waring.functions import loggamma
from pydrobert.waring.functions import polygamma

FUNCTIONS = [
    "add(pow(x, 2), log(x))",
    "pow(x, 1.5)",
    "li(x)",
    "loggamma(x)",
    "div(pow(x, 2), log(x))",
    "add(mul(pi, pow(x, 3)), div(pow(x, 1.4142135623730951), log(log(x))))",
]


@pytest.fixture(params=FUNCTIONS)
def function(request):
    return FunctionExpr.parse(request.param)


def test_eval_square(squares):
    assert squares.shift == 0
    assert squares.eval(3) == 9.0
    assert np.allclose(squares.eval([1, 2, 3]), [1, 4, 9])


def test_eval_mixed():
    f = FunctionExpr.parse(FUNCTIONS[-1])
    assert f.shift == 1
    t = 101.0
    exp = math.pi * t ** 3 + t ** math.sqrt(2) / math.log(math.log(t))
    assert np.isclose(f.eval(100), exp, rtol=1e-12)


def test_extended_agrees_with_double(function):
    for x in (1.0, 7.5, 1e3, 1e8):
        double = function.eval(x)
        extended = function.eval(x, "extended")
        assert isinstance(extended, mpmath.mpf)
        assert np.isclose(float(extended), double, rtol=1e-12)


def test_eval_below_one(squares):
    with pytest.raises(DomainError):
        squares.eval(0.5)
    with pytest.raises(DomainError):
        squares.eval(0.5, "extended")


@pytest.mark.parametrize("x", [1.5, 2.0, 10.0, 1e3, 1e6])
def test_li(x):
    assert np.isclose(li(x), float(mpmath.li(x)), rtol=1e-10)


def test_li_values():
    assert abs(li(2.0) - 1.045163780117493) < 1e-12
    assert abs(li(10.0) - 6.165599504787297) < 1e-10
    with pytest.raises(DomainError):
        li(1.0)


@pytest.mark.parametrize("x", [0.5, 1.0, 3.7, 25.0, 1e5])
def test_loggamma(x):
    assert np.isclose(loggamma(x), math.lgamma(x), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("x", [0.75, 2.5, 40.0])
def test_polygamma(m, x):
    assert np.isclose(polygamma(m, x), float(mpmath.psi(m, x)), rtol=1e-10)


def test_jets():
    f = FunctionExpr.parse("pow(x, 2)")
    assert np.allclose(f.eval_jet(3, 2).derivatives, [9, 6, 2])
    f = FunctionExpr.parse("pow(x, 1.5)")
    jet = f.eval_jet(4, 1)
    assert np.allclose(jet.derivatives, [8, 3])
    assert np.allclose(jet.coefficients, [8, 3])
    f = FunctionExpr.parse("add(pow(x, 2), log(x))")
    x = 10.0
    exp = [x * x + math.log(x), 2 * x + 1 / x, 2 - 1 / x ** 2, 2 / x ** 3]
    assert np.allclose(f.eval_jet(x, 3).derivatives, exp, rtol=1e-13)


def test_jet_matches_finite_differences(function):
    for x in np.geomspace(2, 1e4, 20):
        jet = function.eval_jet(x, 2)
        h = 1e-5 * x
        first = (function.eval(x + h) - function.eval(x - h)) / (2 * h)
        assert abs(jet[1] - first) / max(1, abs(jet[1])) < 1e-6
        h = 1e-4 * x
        second = (
            function.eval(x + h) - 2 * function.eval(x) + function.eval(x - h)
        ) / (h * h)
        assert abs(jet[2] - second) / max(1, abs(jet[2])) < 1e-6


def test_jet_order_too_high(squares):
    with pytest.raises(DomainError):
        squares.eval_jet(2, 13)


@pytest.mark.parametrize(
    "text", ["add(x", "foo(x)", "pow(x)", "add(x, 1) x", "pow(x, 2); shift=-1", ""]
)
def test_syntax_errors(text):
    with pytest.raises(ValueError):
        FunctionExpr.parse(text)


def test_shift_chosen_and_declared():
    f = FunctionExpr.parse("log(log(x))")
    assert f.shift == 1
    assert not f.shift_declared
    with pytest.raises(DomainError):
        FunctionExpr.parse("log(log(x))", shift=0)
    f = FunctionExpr.parse("log(log(x)); shift=3")
    assert f.shift == 3
    assert f.shift_declared
    with pytest.raises(ValueError):
        FunctionExpr.parse("log(log(x)); shift=3", shift=3)
    assert FunctionExpr.parse("li(x)").shift == 1


def test_str_parses_back(function):
    assert FunctionExpr.parse(str(function)) == function


def test_polynomial_split():
    f = FunctionExpr.parse("add(mul(2, pow(x, 3)), mul(5, x), li(add(x, 1)))")
    coeffs, rest = f.polynomial_split()
    assert coeffs == [0, 5, 0, 2]
    assert isinstance(rest, Li)
    # the shift is expanded into the coefficients
    coeffs, rest = FunctionExpr.parse("pow(x, 2); shift=1").polynomial_split()
    assert coeffs == [1, 2, 1]
    assert rest is None
    assert FunctionExpr.parse("li(x)").polynomial_split() is None


def test_is_increasing():
    assert FunctionExpr.parse("pow(x, 1.5)").is_increasing(1)
    assert not FunctionExpr.parse("neg(x)").is_increasing(1)
