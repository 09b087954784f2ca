# pylint: skip-file

import cmath
import itertools
import math

import numpy as np
import pytest

import pydrobert.waring.circle as circle

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import DomainError
from pydrobert.waring.degree import DegreeProfile
from pydrobert.waring.functions import FunctionExpr

SQUARE_PROFILE = DegreeProfile("I", 2, poly_part=[0, 1])
THREE_HALVES_PROFILE = DegreeProfile("II", 2, 1.5)


def _direct(values, s, N):
    return sum(1 for combo in itertools.product(values, repeat=s) if sum(combo) == N)


def test_arc_params(squares, three_halves):
    params = circle.arc_params(squares, SQUARE_PROFILE, 10 ** 4, 3)
    assert np.isclose(params.X0, 50, rtol=1e-10)
    assert np.isclose(params.X1, math.sqrt(5000), rtol=1e-10)
    assert np.isclose(params.X, 100)
    assert np.isclose(params.omega, 100 ** -1.5)
    params = circle.arc_params(three_halves, THREE_HALVES_PROFILE, 10 ** 6, 4)
    assert np.isclose(params.X0, 2e5 ** (2 / 3), rtol=1e-10)
    assert np.isclose(params.X1, 4e5 ** (2 / 3), rtol=1e-10)


def test_exp_sum_at_zero(three_halves):
    result = circle.exp_sum(three_halves, 0.0, 0, 10)
    assert result.value == 10
    assert result.terms == 10


def test_exp_sum_cancels():
    assert abs(circle.exp_sum(FunctionExpr.parse("x"), 0.5, 0, 20)) < 1e-12


def test_exp_sum_matches_direct(squares):
    exp = sum(cmath.exp(2j * math.pi * ((n * n) % 8) / 8) for n in range(1, 17))
    assert abs(circle.exp_sum(squares, 0.125, 0, 16).value - exp) < 1e-9


def test_exp_sum_symmetry_and_size(three_halves):
    pos = circle.exp_sum(three_halves, 0.123, 10, 200)
    neg = circle.exp_sum(three_halves, -0.123, 10, 200)
    assert abs(pos.value.conjugate() - neg.value) < 1e-9
    assert abs(pos) <= pos.terms
    t = circle.exp_sum(three_halves, 0.123, 10, 200, "T")
    w = circle.exp_sum(three_halves, 0.123, 10, 200, "W")
    assert t.variant == w.variant == "T"
    assert abs(t.value - w.value) < 1e-12
    with pytest.raises(ValueError):
        circle.exp_sum(three_halves, 0.123, 10, 200, "U")


def test_expsum_scan(three_halves):
    alphas = [0.0, 0.1, 0.25, 0.5]
    exp = [circle.exp_sum(three_halves, a, 0, 300).value for a in alphas]
    for workers in (1, 3):
        act = circle.expsum_scan(three_halves, alphas, 0, 300, workers=workers)
        assert [r.value for r in act] == exp


def test_integral_I_linear():
    f = FunctionExpr.parse("x")
    alpha, X0, X1 = 0.37, 1.5, 20.0
    exp = (cmath.exp(2j * math.pi * alpha * X1) - cmath.exp(2j * math.pi * alpha * X0))
    exp /= 2j * math.pi * alpha
    assert abs(circle.integral_I(f, alpha, X0, X1) - exp) < 1e-8
    assert circle.integral_I(f, 0, X0, X1) == X1 - X0


def test_integral_I_quadratic(squares):
    integrate = pytest.importorskip("scipy.integrate")
    alpha, X0, X1 = 1e-3, 50.0, 70.0
    re, _ = integrate.quad(
        lambda t: math.cos(2 * math.pi * alpha * t * t), X0, X1, limit=200
    )
    im, _ = integrate.quad(
        lambda t: math.sin(2 * math.pi * alpha * t * t), X0, X1, limit=200
    )
    assert abs(circle.integral_I(squares, alpha, X0, X1) - complex(re, im)) < 1e-6


def test_integral_I_budget(squares):
    with pytest.raises(BudgetExceeded):
        circle.integral_I(squares, 0.4, 1, 1000, panel_budget=100)


def test_count_R_direct(squares, three_halves):
    assert circle.count_R_direct(squares, 25, 2, 0, 5) == 2
    assert circle.count_R_direct(squares, 2, 2, 0, 5) == 1
    values = [math.floor(n ** 1.5) for n in range(1, 9)]
    assert circle.count_R_direct(three_halves, 24, 3, 0, 8) == _direct(values, 3, 24)
    with pytest.raises(BudgetExceeded):
        circle.count_R_direct(squares, 10 ** 6, 2, 0, 5, budget=1000)


def test_circle_R_numeric(squares, three_halves):
    assert abs(circle.circle_R_numeric(squares, 25, 2, 0, 5, 128) - 2) < 1e-6
    assert abs(circle.circle_R_numeric(squares, 60, 2, 0, 5, 128)) < 1e-6
    exp = circle.count_R_direct(three_halves, 24, 3, 0, 8)
    assert abs(circle.circle_R_numeric(three_halves, 24, 3, 0, 8, 512) - exp) < 1e-6
    with pytest.raises(DomainError):
        circle.circle_R_numeric(squares, 25, 2, 0, 5, 64)


SQUARE_PLUS_LOG = FunctionExpr.parse("add(pow(x, 2), log(x))")


def _triples():
    np.random.seed(11)
    for i in range(100):
        which, s = i % 3, 2 + (i // 3) % 2
        m = np.random.randint(3, 13)
        vmax = math.floor((m ** 2, m ** 1.5, m ** 2 + math.log(m))[which])
        N = np.random.randint(1, s * vmax + 6)
        yield which, s, int(m), int(N), 2 * s * (vmax + 1) + int(N) + 1


@pytest.mark.parametrize("which,s,m,N,grid", list(_triples()))
def test_numeric_matches_direct(squares, three_halves, which, s, m, N, grid):
    f = (squares, three_halves, SQUARE_PLUS_LOG)[which]
    exp = circle.count_R_direct(f, N, s, 0, m)
    assert abs(circle.circle_R_numeric(f, N, s, 0, m, grid) - exp) < 1e-6


def test_major_arc_report(squares):
    params = circle.arc_params(squares, SQUARE_PROFILE, 10 ** 4, 3)
    report = circle.major_arc_report(squares, params, steps=64)
    assert len(report.alphas) == 129
    zero = report.zero_row
    assert zero["S"] == zero["T"]
    assert zero["S"] in (20, 21)
    assert abs(zero["I"] - (params.X1 - params.X0)) < 1e-9
    assert report.max_T_minus_I <= 5
    assert set(report.to_dict()) >= {"major_integral", "max_T_minus_I", "zero_row"}
    with pytest.raises(ValueError):
        circle.major_arc_report(squares, params, s=2)


def test_vdc_second_derivative(squares):
    pos = circle.vdc_bound_check(squares, 2, 1e-3, 1e3, 2e3)
    neg = circle.vdc_bound_check(squares, 2, -1e-3, 1e3, 2e3)
    assert np.isclose(pos.ratio, neg.ratio, rtol=1e-9)
    # a full period of a quadratic Gauss sum modulo 1000
    assert np.isclose(pos.lhs, math.sqrt(2000), rtol=1e-6)
    assert pos.ratio < 1
    assert pos.params["h"] >= 1


def test_vdc_first_derivative(squares):
    check = circle.vdc_bound_check(FunctionExpr.parse("x"), 1, 0.3, 10, 110)
    assert np.isclose(check.params["theta"], 0.3)
    assert check.ratio < 1
    with pytest.raises(DomainError):
        circle.vdc_bound_check(squares, 1, 0.01, 10, 200)
    with pytest.raises(DomainError):
        circle.vdc_bound_check(squares, 2, 0.0, 10, 200)
    # f'' = 1 / x - 1 / 50 changes sign at 50 while f' stays in (3, 4)
    inflected = FunctionExpr.parse("sub(mul(x, log(x)), mul(0.01, pow(x, 2)))")
    with pytest.raises(DomainError, match="monotone"):
        circle.vdc_bound_check(inflected, 1, 1.0, 10, 110)
    check = circle.vdc_bound_check(FunctionExpr.parse("mul(x, log(x))"), 1, 0.2, 10, 20)
    assert check.ratio <= 1


def test_vdc_scan(squares):
    checks = circle.vdc_scan(squares, 2, [1e-3, 2e-3], [100, 200], workers=2)
    assert [(c.params["beta"], c.params["P"]) for c in checks] == [
        (1e-3, 100),
        (1e-3, 200),
        (2e-3, 100),
        (2e-3, 200),
    ]


def test_fourier_expansion():
    alpha = 0.21
    xs = [0.05 + 0.9 * ((i * 0.6180339887498949) % 1.0) for i in range(1, 11)]
    c = abs(circle.fourier_c(alpha))
    maxes = []
    for K in (4, 16, 64, 256):
        residuals = [circle.fourier_expansion_check(x, alpha, K).residual for x in xs]
        for x, residual in zip(xs, residuals):
            # the tails past +-K are Abel sums of e(kx) / (k + alpha)
            tail = 2 * c / ((K + 1 - alpha) * math.sin(math.pi * min(x, 1 - x)))
            assert residual <= tail + 1e-12
        maxes.append(max(residuals))
    assert maxes[0] > maxes[1] > maxes[2] > maxes[3]
    for K in (16, 64, 256):
        check = circle.fourier_expansion_check(0.3, alpha, K)
        ratio = check.coefficients[0] * K / (2 * math.log(K))
        assert 0.5 < ratio < 1.2
    assert abs(circle.fourier_c(alpha)) <= alpha
    with pytest.raises(DomainError):
        circle.fourier_expansion_check(2.0, 0.21, 16)
    with pytest.raises(DomainError):
        circle.fourier_expansion_check(0.3, 1.0, 16)
    with pytest.raises(ValueError):
        circle.fourier_expansion_check(0.3, 0.21, 1)


def test_default_sigma():
    assert circle.default_sigma(DegreeProfile("III", 3, math.sqrt(2))) == 2.0 ** -5
    assert circle.default_sigma(DegreeProfile("II", 2, 2.0)) == 2.0 ** -4
    assert circle.default_sigma(SQUARE_PROFILE) == 2.0 ** -4
    assert circle.default_sigma(DegreeProfile("III", 2, 0.5)) == 2.0 ** -5


def test_minor_arc_samples():
    alphas = circle.minor_arc_samples(1e-3, 1000)
    assert 0.5 in alphas
    assert 1 / 3 in alphas
    assert alphas.min() >= 1e-3
    assert len(alphas) >= 1000


def test_minor_arc_sup(three_halves):
    params = circle.arc_params(three_halves, THREE_HALVES_PROFILE, 10 ** 6, 4)
    sigma = circle.default_sigma(THREE_HALVES_PROFILE)
    report = circle.minor_arc_sup(three_halves, params, sigma)
    assert report.exponent < 1
    assert report.argsup >= params.omega
    assert report.target == 1 - sigma
    with pytest.raises(ValueError):
        circle.minor_arc_sup(three_halves, params, sigma, samples=10)
