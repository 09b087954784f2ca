# pylint: skip-file

import math

import numpy as np
import pytest

from pydrobert.waring import ClassificationError
from pydrobert.waring.degree import classify
from pydrobert.waring.degree import DegreeProfile
from pydrobert.waring.degree import doubling_slopes
from pydrobert.waring.degree import extrapolate_exponent
from pydrobert.waring.degree import polynomial_part
from pydrobert.waring.functions import FunctionExpr


def test_classify_square(squares):
    profile = classify(squares)
    assert profile.function_class == "I"
    assert profile.d_f == 2
    assert profile.c_f == 0
    assert profile.subpolynomial_remainder
    assert np.allclose(profile.poly_part, [0, 1])
    assert abs(profile.c_real - 2) < 1e-6


def test_classify_square_plus_log():
    f = FunctionExpr.parse("add(pow(x, 2), log(x))")
    profile = classify(f)
    assert profile.function_class == "III"
    assert profile.d_f == 2
    assert profile.subpolynomial_remainder
    assert np.allclose(profile.poly_part, [0, 1])
    again = classify(profile.reconstruct())
    assert again.function_class == profile.function_class
    assert again.d_f == profile.d_f


def test_classify_mixed():
    f = FunctionExpr.parse(
        "add(mul(pi, pow(x, 3)), div(pow(x, 1.4142135623730951), log(log(x))))"
    )
    profile = classify(f)
    assert profile.function_class == "III"
    assert profile.d_f == 3
    assert abs(profile.c_f - math.sqrt(2)) < 0.1
    assert not profile.subpolynomial_remainder
    assert np.isclose(profile.poly_part[-1], math.pi)


def test_classify_non_polynomial():
    f = FunctionExpr.parse("div(pow(x, 2), log(x))")
    profile = classify(f)
    assert profile.function_class == "II"
    assert profile.d_f == 2
    assert abs(profile.degree - 2) < 0.05
    assert not len(profile.poly_part)
    with pytest.raises(ValueError):
        polynomial_part(f, profile)


def test_classify_three_halves(three_halves):
    profile = classify(three_halves)
    assert profile.function_class == "II"
    assert abs(profile.degree - 1.5) < 1e-3


def test_declared(squares):
    profile = classify(squares, DegreeProfile("I", 2))
    assert np.allclose(profile.poly_part, [0, 1])
    assert abs(profile.c_real - 2) < 1e-6
    with pytest.raises(ClassificationError) as excinfo:
        classify(squares, DegreeProfile("I", 3))
    assert excinfo.value.reason == "declared"


def test_declared_remainder():
    f = FunctionExpr.parse("add(pow(x, 2), log(x))")
    profile = classify(f, DegreeProfile("III", 2, 0.0))
    assert profile.function_class == "III"
    assert np.allclose(profile.poly_part, [0, 1])
    with pytest.raises(ClassificationError) as excinfo:
        classify(f, DegreeProfile("I", 2))
    assert excinfo.value.reason == "declared"
    with pytest.raises(ClassificationError) as excinfo:
        classify(f, DegreeProfile("III", 2, 1.0))
    assert excinfo.value.reason == "declared"


def test_declared_polynomial_as_class_iii(squares):
    with pytest.raises(ClassificationError) as excinfo:
        classify(squares, DegreeProfile("III", 2, 0.5))
    assert excinfo.value.reason == "declared"


@pytest.mark.parametrize("text", ["pow(x, 40)", "neg(x)"])
def test_bad_growth(text):
    with pytest.raises(ClassificationError) as excinfo:
        classify(FunctionExpr.parse(text))
    assert excinfo.value.reason == "growth"


def test_polynomial_part_exact():
    f = FunctionExpr.parse("add(mul(2, pow(x, 3)), mul(5, x), li(add(x, 1)))")
    alpha = polynomial_part(f, DegreeProfile("III", 3, 1.0))
    assert alpha.tolist() == [5, 0, 2]
    # the constant belongs to the remainder
    f = FunctionExpr.parse("pow(add(x, 1), 2)")
    assert polynomial_part(f, DegreeProfile("I", 2)).tolist() == [2, 1]


def test_polynomial_part_fit():
    f = FunctionExpr.parse("exp(mul(2, log(x)))")
    alpha = polynomial_part(f, DegreeProfile("I", 2))
    assert np.allclose(alpha, [0, 1], atol=1e-9)


def test_doubling_slopes_and_extrapolation():
    x = 1e3 * 2.0 ** np.arange(21)
    _, slopes = doubling_slopes(x ** 2.5, x)
    assert np.allclose(slopes, 2.5)
    x_mid = np.sqrt(x[1:] * x[:-1])
    assert np.isclose(extrapolate_exponent(x_mid, 2 - 1 / np.log(x_mid)), 2)
    with pytest.raises(ClassificationError):
        doubling_slopes([1, 0, 2])


@pytest.mark.parametrize(
    "args",
    [("IV", 1), ("I", 2, 0.5), ("II", 2, 1.5, np.nan, None, [1, 1]), ("III", 2, 3.0)],
)
def test_invalid_profiles(args):
    with pytest.raises(ValueError):
        DegreeProfile(*args)


def test_reconstruct():
    f = DegreeProfile("III", 2, 0.5, poly_part=[1, 3]).reconstruct()
    assert np.isclose(f.eval(4), 3 * 16 + 4 + 2)
    with pytest.raises(ValueError):
        DegreeProfile("I", 2).reconstruct()
