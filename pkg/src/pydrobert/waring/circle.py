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

r"""Exponential sums and the circle method at desk scale

The number :math:`R_s(N)` of ordered solutions of
:math:`[f(n_1)] + \cdots + [f(n_s)] = N` with :math:`X_0 < n_i \le X_1` is

.. math::

    R_s(N) = \int_{-1/2}^{1/2} S(\alpha)^s e(-\alpha N) d\alpha, \qquad
    S(\alpha) = \sum_{X_0 < n \le X_1} e(\alpha [f(n)])

where :math:`e(x) = \exp(2 \pi i x)`. The interval is split into a major arc
:math:`|\alpha| \le \omega`, on which :math:`S` is close to
:math:`T(\alpha) = \sum e(\alpha f(n))` and to the integral
:math:`I(\alpha) = \int_{X_0}^{X_1} e(\alpha f(t)) dt`, and minor arcs on which
:math:`S` is small. This module computes every one of these objects and checks the
approximations and bounds numerically, with constants fitted rather than proven.
"""

import logging
import math

from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import config
from pydrobert.waring import DomainError
from pydrobert.waring import SolveError
from pydrobert.waring.basis import floors_and_fractions
from pydrobert.waring.degree import DegreeProfile
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.util import frac_product
from pydrobert.waring.util import gauss_legendre
from pydrobert.waring.util import ordered_map
from pydrobert.waring.util import solve_increasing
from pydrobert.waring.util import unit_phase_sum

__all__ = [
    "arc_params",
    "ArcParams",
    "BoundCheck",
    "circle_R_numeric",
    "count_R_direct",
    "default_sigma",
    "exp_sum",
    "expsum_scan",
    "ExpSum",
    "fourier_c",
    "fourier_expansion_check",
    "FourierCheck",
    "integral_I",
    "major_arc_report",
    "MajorArcReport",
    "minor_arc_samples",
    "minor_arc_sup",
    "MinorArcReport",
    "vdc_bound_check",
    "vdc_scan",
]

QUADRATURE_ORDER = 7
MIN_PANELS = 16
DERIVATIVE_PROBES = 33
MAJOR_ARC_STEPS = 1024
MAX_RATIONAL_DENOMINATOR = 20

logger = logging.getLogger(__name__)


def _e(phase):
    return np.exp(2j * np.pi * phase)


def _window(lo: float, hi: float):
    # integers n in (lo, hi] with n >= 1, as (n_start, count)
    n_start = max(int(math.floor(lo)) + 1, 1)
    count = max(int(math.floor(hi)) - n_start + 1, 0)
    if count > config.MAX_SEQUENCE_COUNT:
        raise BudgetExceeded(
            "window ({}, {}] has more than {} terms".format(
                lo, hi, config.MAX_SEQUENCE_COUNT
            )
        )
    return n_start, count


def _int_phases(alpha: float, m: np.ndarray) -> np.ndarray:
    # {alpha * m} for 64-bit integers of either sign
    m = np.asarray(m, dtype=np.int64)
    neg = m < 0
    out = frac_product(alpha, np.abs(m))
    out[neg] = -out[neg]
    return out


class ArcParams(object):
    """Scales of the circle method for a target `N`

    Attributes
    ----------
    N : int
    s : int
    d : float
        The degree of `f` (``d_f`` for classes I and III, ``c`` for class II)
    X : float
        ``N ** (1 / d)``
    N_s : float
        ``N / (s + 1)``
    X0, X1 : float
        ``f(X0) = N_s`` and ``f(X1) = 2 N_s``
    omega : float
        ``X ** (1 / 2 - d)``, the radius of the major arc
    """

    def __init__(self, N: int, s: int, d: float, X0: float, X1: float):
        self.N, self.s, self.d = int(N), int(s), float(d)
        self.X = self.N ** (1 / self.d)
        self.N_s = self.N / (self.s + 1)
        self.X0, self.X1 = X0, X1
        self.omega = self.X ** (0.5 - self.d)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "s": self.s,
            "d": self.d,
            "X": self.X,
            "N_s": self.N_s,
            "X0": self.X0,
            "X1": self.X1,
            "omega": self.omega,
        }


def arc_params(f: FunctionExpr, profile: DegreeProfile, N: int, s: int) -> ArcParams:
    """Solve ``f(X0) = N / (s + 1)`` and ``f(X1) = 2 N / (s + 1)``

    Roots are bracketed on ``[1, inf)``, bisected, and polished with Newton steps

    Raises
    ------
    SolveError
        If `f` is not increasing on the probes above 1 or ``f(1)`` already exceeds
        ``N / (s + 1)``
    """
    if s < 1:
        raise ValueError("s must be positive")
    d = profile.degree
    if not d >= 1:
        raise DomainError("the circle method needs degree at least 1, got {}".format(d))
    if not f.is_increasing(1.0):
        raise SolveError("'{}' is not increasing above 1".format(f))
    N_s = N / (s + 1)

    def _deriv(x):
        return f.eval_jet(x, 1)[1]

    X0 = solve_increasing(f.eval, N_s, 1.0, deriv=_deriv)
    X1 = solve_increasing(f.eval, 2 * N_s, X0, deriv=_deriv)
    params = ArcParams(N, s, d, X0, X1)
    logger.info(
        "arcs for N=%d, s=%d: X0=%.6g X1=%.6g omega=%.3g", N, s, X0, X1, params.omega
    )
    return params


class ExpSum(object):
    """A computed exponential sum

    Attributes
    ----------
    value : complex
    terms : int
    alpha : float
    variant : {'S', 'T'}
        ``'S'`` sums ``e(alpha [f(n)])`` and ``'T'`` sums ``e(alpha f(n))``
    """

    def __init__(self, value: complex, terms: int, alpha: float, variant: str):
        self.value = complex(value)
        self.terms = int(terms)
        self.alpha = float(alpha)
        self.variant = variant

    def __abs__(self) -> float:
        return abs(self.value)

    def to_row(self) -> list:
        return [
            self.alpha,
            self.value.real,
            self.value.imag,
            abs(self.value),
            self.terms,
        ]


class _Window(object):
    # floors and fractional parts of f on a window, shared by many alphas

    def __init__(self, f: FunctionExpr, lo: float, hi: float, workers: int = 1):
        n_start, count = _window(lo, hi)
        self.floors, self.fracs = floors_and_fractions(f, n_start, count, workers)

    def __len__(self) -> int:
        return len(self.floors)

    def phases(self, alpha: float, variant: str) -> np.ndarray:
        out = _int_phases(alpha, self.floors)
        if variant in ("T", "W"):
            out = out + alpha * self.fracs
        elif variant != "S":
            raise ValueError("variant must be 'S' or 'T', got '{}'".format(variant))
        return out - np.floor(out)

    def sum(self, alpha: float, variant: str) -> ExpSum:
        value = complex(0)
        if len(self):
            parts = [
                unit_phase_sum(self.phases(alpha, variant)[i : i + config.SUM_CHUNK])
                for i in range(0, len(self), config.SUM_CHUNK)
            ]
            value = complex(
                math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts)
            )
        return ExpSum(value, len(self), alpha, "T" if variant == "W" else variant)


def exp_sum(
    f: FunctionExpr, alpha: float, lo: float, hi: float, variant: str = "S"
) -> ExpSum:
    """Sum ``e(alpha [f(n)])`` (``'S'``) or ``e(alpha f(n))`` (``'T'``) over
    ``lo < n <= hi``

    Phases are reduced mod 1 before they are exponentiated: ``alpha [f(n)]`` with an
    exact splitting of the product, and ``alpha f(n)`` as
    ``alpha [f(n)] + alpha {f(n)}``. Terms are accumulated with
    :func:`math.fsum`. ``'W'`` is accepted as an alias of ``'T'``.

    Raises
    ------
    DomainError
        If some ``[f(n)]`` does not fit in 52 bits
    """
    return _Window(f, lo, hi).sum(alpha, variant)


def expsum_scan(
    f: FunctionExpr,
    alphas: Sequence[float],
    lo: float,
    hi: float,
    variant: str = "S",
    workers: int = 1,
) -> List[ExpSum]:
    """:func:`exp_sum` at many `alphas`, evaluated in parallel but returned in order"""
    window = _Window(f, lo, hi, workers)
    return ordered_map(lambda a: window.sum(float(a), variant), alphas, workers)


def _max_derivative(f: FunctionExpr, X0: float, X1: float) -> float:
    xs = np.linspace(X0, X1, DERIVATIVE_PROBES)
    return max(abs(f.eval_jet(x, 1)[1]) for x in xs)


def integral_I(
    f: FunctionExpr,
    alpha: float,
    X0: float,
    X1: float,
    panel_budget: int = config.PANEL_BUDGET,
    fprime_max: Optional[float] = None,
) -> complex:
    """Integrate ``e(alpha f(t))`` over ``[X0, X1]``

    The interval is split into equal panels no wider than a quarter period of the
    local phase, ``1 / (4 |alpha| max |f'|)``, and no wider than
    ``(X1 - X0) / 16``. Each panel uses 7-point Gauss-Legendre.

    Parameters
    ----------
    f : FunctionExpr
    alpha : float
    X0, X1 : float
    panel_budget : int, optional
    fprime_max : float, optional
        A bound on ``|f'|`` over the interval. Estimated from jets if unset (with a
        25% margin)

    Raises
    ------
    BudgetExceeded
        If more than `panel_budget` panels are needed
    """
    if X1 < X0:
        raise ValueError("X1 must be at least X0")
    if alpha == 0 or X1 == X0:
        return complex(X1 - X0)
    if fprime_max is None:
        fprime_max = 1.25 * _max_derivative(f, X0, X1)
    panels = max(MIN_PANELS, int(math.ceil(4 * abs(alpha) * fprime_max * (X1 - X0))))
    if panels > panel_budget:
        raise BudgetExceeded(
            "integral at alpha={} needs {} panels (budget {})".format(
                alpha, panels, panel_budget
            )
        )
    nodes, weights = gauss_legendre(QUADRATURE_ORDER)
    width = (X1 - X0) / panels
    total_re, total_im = [], []
    step = max(1, (1 << 16) // QUADRATURE_ORDER)
    for start in range(0, panels, step):
        left = X0 + width * np.arange(start, min(start + step, panels))
        t = (left[:, None] + 0.5 * width * (nodes[None, :] + 1)).ravel()
        t = np.minimum(t, X1)
        vals = _e(alpha * f.eval(t)) * np.tile(weights, len(left))
        total_re.append(vals.real.sum())
        total_im.append(vals.imag.sum())
    return 0.5 * width * complex(math.fsum(total_re), math.fsum(total_im))


def count_R_direct(
    f: FunctionExpr,
    N: int,
    s: int,
    X0: float,
    X1: float,
    budget: int = config.CONVOLUTION_BUDGET,
) -> int:
    """Count ordered ``(n_1, ..., n_s)`` in ``(X0, X1]`` with ``sum [f(n_i)] = N``

    The histogram of values is convolved with itself ``s - 1`` times, truncated at
    `N`, in exact integer arithmetic

    Raises
    ------
    BudgetExceeded
        If the table (of ``N + 1`` entries) exceeds `budget`
    """
    N, s = int(N), int(s)
    if s < 1:
        raise ValueError("s must be positive")
    if N < 0:
        return 0
    if N + 1 > budget:
        raise BudgetExceeded(
            "a table of {} entries exceeds the budget of {}".format(N + 1, budget)
        )
    n_start, count = _window(X0, X1)
    values, _ = floors_and_fractions(f, n_start, count)
    if np.any(values < 0):
        raise DomainError("counting needs non-negative values")
    values = values[values <= N]
    hist = np.bincount(values, minlength=N + 1).astype(object)
    table = hist
    for _ in range(s - 1):
        table = np.convolve(table, hist)[: N + 1]
    return int(table[N]) if len(table) > N else 0


def circle_R_numeric(
    f: FunctionExpr, N: int, s: int, X0: float, X1: float, grid: int
) -> float:
    """Evaluate the circle-method integral for ``R_s(N)`` with a trapezoidal sum

    With ``alpha_j = -1/2 + j / grid``, the integrand is a trigonometric polynomial
    whose frequencies ``s m - N`` are integers, so the sum is exact as long as no
    nonzero frequency is a multiple of `grid`. That is guaranteed when
    ``grid > 2 s max [f(n)]`` and ``grid > |N - s min [f(n)]|``. ``S(alpha_j)`` is
    computed for all ``j`` at once with an FFT of the value histogram.

    Raises
    ------
    DomainError
        If `grid` violates the aliasing condition or some value is negative
    """
    N, s, grid = int(N), int(s), int(grid)
    n_start, count = _window(X0, X1)
    values, _ = floors_and_fractions(f, n_start, count)
    if not len(values):
        return 0.0
    vmin, vmax = int(values.min()), int(values.max())
    if vmin < 0:
        raise DomainError("the circle method needs non-negative values")
    if not (grid > 2 * s * vmax and grid > abs(N - s * vmin)):
        raise DomainError(
            "grid {} aliases: need more than 2 s max = {} and |N - s min| = {}".format(
                grid, 2 * s * vmax, abs(N - s * vmin)
            )
        )
    # e(alpha_j v) = (-1)^v e(j v / grid)
    folded = np.zeros(grid, dtype=np.complex128)
    np.add.at(folded, values % grid, np.where(values % 2, -1.0, 1.0))
    S = np.fft.ifft(folded) * grid
    j = np.arange(grid)
    twist = _e(-((j / grid - 0.5) * N % 1.0))
    return float(np.real(np.sum(S ** s * twist)) / grid)


class MajorArcReport(object):
    """Comparisons of ``S``, ``T`` and ``I`` on the major arc

    Attributes
    ----------
    alphas : numpy.ndarray
    S, T, I : numpy.ndarray
        Complex values at `alphas`
    major_integral : complex
        Trapezoidal ``int S(alpha)^s e(-alpha N)`` over ``|alpha| <= omega``
    positive : bool
        Whether the real part of `major_integral` is positive
    predicted : float
        ``X ** (s - d)``, the predicted order of `major_integral`
    singular_lower : float
        A lower bound on the real-line integral of ``I^s e(-alpha N)``: the volume
        of the box ``N / (s + 1) <= u_i <= N / s`` times ``(min g')^s``, where ``g``
        inverts ``f``
    max_S_minus_T : float
    S_T_scale : float
        ``omega * X1``
    max_T_minus_I : float
    I_decay_constant : float
        ``max |I(alpha)| (1 + X^d |alpha|) / X``
    zero_row : dict
        ``S``, ``T`` and ``I`` at ``alpha = 0``
    """

    def to_dict(self) -> dict:
        return {
            "major_integral": self.major_integral,
            "positive": self.positive,
            "predicted": self.predicted,
            "singular_lower": self.singular_lower,
            "max_S_minus_T": self.max_S_minus_T,
            "S_T_scale": self.S_T_scale,
            "max_T_minus_I": self.max_T_minus_I,
            "I_decay_constant": self.I_decay_constant,
            "zero_row": self.zero_row,
        }

    def rows(self):
        for a, S, T, I in zip(self.alphas, self.S, self.T, self.I):
            yield a, abs(S), abs(T), abs(I), abs(S - T), abs(T - I)


def major_arc_report(
    f: FunctionExpr,
    params: ArcParams,
    s: Optional[int] = None,
    steps: int = MAJOR_ARC_STEPS,
    panel_budget: int = config.PANEL_BUDGET,
    workers: int = 1,
) -> MajorArcReport:
    """Evaluate the major arc with a trapezoid of step ``omega / steps``

    Raises
    ------
    ValueError
        If ``s < 3``
    """
    s = params.s if s is None else int(s)
    if s < 3:
        raise ValueError("the major arc analysis needs s >= 3")
    omega, X, d = params.omega, params.X, params.d
    alphas = np.linspace(-omega, omega, 2 * steps + 1)
    window = _Window(f, params.X0, params.X1, workers)
    fprime_max = _max_derivative(f, params.X0, params.X1)

    def _row(a):
        a = float(a)
        return (
            window.sum(a, "S").value,
            window.sum(a, "T").value,
            integral_I(f, a, params.X0, params.X1, panel_budget, 1.25 * fprime_max),
        )

    rows = ordered_map(_row, alphas, workers)
    report = MajorArcReport()
    report.alphas = alphas
    report.S, report.T, report.I = (np.array(x) for x in zip(*rows))
    integrand = report.S ** s * _e(-((alphas * params.N) % 1.0))
    h = alphas[1] - alphas[0]
    report.major_integral = complex(
        h * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1]))
    )
    report.positive = report.major_integral.real > 0
    if not report.positive:
        logger.warning(
            "N=%d, s=%d: major arc integral %s is not positive",
            params.N,
            s,
            report.major_integral,
        )
    report.predicted = X ** (s - d)
    report.singular_lower = (params.N / (s * (s + 1))) ** (s - 1) * fprime_max ** -s
    report.max_S_minus_T = float(np.abs(report.S - report.T).max())
    report.S_T_scale = omega * params.X1
    report.max_T_minus_I = float(np.abs(report.T - report.I).max())
    report.I_decay_constant = float(
        (np.abs(report.I) * (1 + X ** d * np.abs(alphas)) / X).max()
    )
    mid = steps
    report.zero_row = {
        "S": report.S[mid].real,
        "T": report.T[mid].real,
        "I": report.I[mid].real,
    }
    logger.info(
        "major arc for N=%d: integral %.6g (predicted order %.6g), |S-T| <= %.3g, "
        "|T-I| <= %.3g",
        params.N,
        report.major_integral.real,
        report.predicted,
        report.max_S_minus_T,
        report.max_T_minus_I,
    )
    return report


class BoundCheck(object):
    """An exponential sum against a bound formula

    Attributes
    ----------
    lhs : float
    rhs_formula : float
    ratio : float
        ``lhs / rhs_formula``
    params : dict
    """

    def __init__(self, lhs: float, rhs_formula: float, params: dict):
        self.lhs = float(lhs)
        self.rhs_formula = float(rhs_formula)
        self.ratio = self.lhs / self.rhs_formula if self.rhs_formula else math.inf
        self.params = params

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs_formula": self.rhs_formula,
            "ratio": self.ratio,
            "params": self.params,
        }


def vdc_bound_check(
    f: FunctionExpr, k: int, beta: float, P: float, P1: float
) -> BoundCheck:
    r"""Compare ``W(beta) = sum_{P < n <= P1} e(beta f(n))`` with a derivative bound

    With ``lambda = min |beta f^{(k)}|`` and ``h = max / min`` over probes of
    ``[P, P1]``, ``N = P1 - P`` and ``K = 2 ** k``, the bound for ``k >= 2`` is

    .. math::

        h N (\lambda^{1 / (K - 2)} + N^{-2 / K} + (N^k \lambda)^{-2 / K})

    For ``k = 1`` the Kuzmin-Landau bound ``cot(pi theta / 2)`` is used instead,
    where ``theta`` is the distance from ``beta f'`` to the nearest integer, which
    must not be crossed on the block, and ``beta f'`` must be monotone there.

    Raises
    ------
    DomainError
        If ``beta f^{(k)}`` changes sign on the block. When ``k = 1``, also if
        ``beta f'`` crosses an integer or ``beta f''`` changes sign
    """
    k = int(k)
    if not 1 <= k < config.MAX_JET_ORDER:
        raise ValueError("k must lie in 1..{}".format(config.MAX_JET_ORDER - 1))
    if not P1 > P >= 1:
        raise ValueError("need 1 <= P < P1")
    xs = np.linspace(P, P1, DERIVATIVE_PROBES)
    deriv = np.array([beta * f.eval_jet(x, k)[k] for x in xs])
    if not (np.all(deriv > 0) or np.all(deriv < 0)):
        raise DomainError(
            "beta f^({}) changes sign (or vanishes) on [{}, {}]".format(k, P, P1)
        )
    lam = float(np.abs(deriv).min())
    h = float(np.abs(deriv).max()) / lam
    lhs = abs(exp_sum(f, beta, P, P1, "T"))
    terms = int(math.floor(P1)) - int(math.floor(P))
    params = {"k": k, "beta": beta, "P": P, "P1": P1, "N": terms, "lambda": lam, "h": h}
    if k == 1:
        curvature = np.array([beta * f.eval_jet(x, 2)[2] for x in xs])
        if np.any(curvature > 0) and np.any(curvature < 0):
            raise DomainError("beta f' is not monotone on [{}, {}]".format(P, P1))
        if np.floor(deriv.min()) != np.floor(deriv.max()):
            raise DomainError("beta f' crosses an integer on [{}, {}]".format(P, P1))
        theta = float(
            min(
                deriv.min() - np.floor(deriv.min()),
                np.floor(deriv.min()) + 1 - deriv.max(),
            )
        )
        params["theta"] = theta
        rhs = 1 / math.tan(math.pi * theta / 2) if theta > 0 else math.inf
    else:
        K = 2 ** k
        rhs = (
            h
            * terms
            * (
                lam ** (1 / (K - 2))
                + terms ** (-2 / K)
                + (terms ** k * lam) ** (-2 / K)
            )
        )
    return BoundCheck(lhs, rhs, params)


def vdc_scan(
    f: FunctionExpr,
    k: int,
    betas: Sequence[float],
    Ps: Sequence[float],
    workers: int = 1,
) -> List[BoundCheck]:
    """:func:`vdc_bound_check` on dyadic blocks ``(P, 2P]`` over a grid

    Checks are ordered by `betas`, then `Ps`, regardless of `workers`
    """
    pairs = [(b, p) for b in betas for p in Ps]
    return ordered_map(
        lambda bp: vdc_bound_check(f, k, bp[0], bp[1], 2 * bp[1]), pairs, workers
    )


def fourier_c(alpha: float) -> complex:
    """``c(alpha) = (1 - e(-alpha)) / (2 pi i)``, with ``|c(alpha)| <= ||alpha||``"""
    return complex((1 - np.exp(-2j * np.pi * alpha)) / (2j * np.pi))


class FourierCheck(object):
    """The truncated Fourier expansion of ``e(-alpha {x})``

    Attributes
    ----------
    lhs : complex
        ``e(-alpha {x})``
    truncated_sum : complex
        ``c(alpha) sum_{|k| <= K} e(k x) / (k + alpha)``
    residual : float
        ``|lhs - truncated_sum|``
    phi : float
        ``Phi(x; K) = 1 / (1 + K ||x||)``
    bound : float
        ``Phi(x; K) log K``
    fitted_constant : float
        ``residual / bound``
    coefficients : numpy.ndarray
        ``|b_k|`` of ``Phi(.; K)`` for ``k = 0, ..., 2K``, from a ``4K``-point DFT
    coefficient_constant : float
        ``max_k |b_k| (K^2 + k^2) / (K log K)``
    """

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "truncated_sum": self.truncated_sum,
            "residual": self.residual,
            "phi": self.phi,
            "bound": self.bound,
            "fitted_constant": self.fitted_constant,
            "b0": float(self.coefficients[0]),
            "coefficient_constant": self.coefficient_constant,
        }


def _dist(x):
    return np.abs(x - np.round(x))


def fourier_expansion_check(x: float, alpha: float, K: int) -> FourierCheck:
    """Truncate the Fourier expansion of ``e(-alpha {x})`` at ``|k| <= K``

    Raises
    ------
    DomainError
        If `x` or `alpha` is an integer
    ValueError
        If ``K < 2``
    """
    x, alpha, K = float(x), float(alpha), int(K)
    if x == math.floor(x) or alpha == math.floor(alpha):
        raise DomainError("x and alpha must not be integers")
    if K < 2:
        raise ValueError("K must be at least 2")
    check = FourierCheck()
    check.lhs = complex(_e(-alpha * (x - math.floor(x))))
    ks = np.arange(-K, K + 1)
    terms = _e((ks * x) % 1.0) / (ks + alpha)
    check.truncated_sum = fourier_c(alpha) * complex(
        math.fsum(terms.real), math.fsum(terms.imag)
    )
    check.residual = abs(check.lhs - check.truncated_sum)
    check.phi = float(1 / (1 + K * _dist(x)))
    check.bound = check.phi * math.log(K)
    check.fitted_constant = check.residual / check.bound
    grid = np.arange(4 * K) / (4 * K)
    b = np.fft.fft(1 / (1 + K * _dist(grid))) / (4 * K)
    check.coefficients = np.abs(b[: 2 * K + 1])
    kk = np.arange(2 * K + 1)
    check.coefficient_constant = float(
        (check.coefficients * (K ** 2 + kk ** 2) / (K * math.log(K))).max()
    )
    return check


def default_sigma(profile: DegreeProfile) -> float:
    """The minor-arc saving exponent

    ``2 ** (-d - 2) * min(c, 1)`` for class III, ``2 ** (-ceil(c + 1) - 1)`` for
    class II. Class I functions are treated as class III with ``c >= 1``
    """
    if profile.function_class == "II":
        return 2.0 ** (-math.ceil(profile.c_f + 1) - 1)
    c = 1.0 if profile.function_class == "I" else min(profile.c_f, 1.0)
    return 2.0 ** (-profile.d_f - 2) * c


def minor_arc_samples(omega: float, samples: int) -> np.ndarray:
    """Sample ``[omega, 1/2]``: half log-spaced, half linear, plus every ``a / q``
    with ``q <= 20`` in the interval and ``1/2`` itself
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    half = samples // 2
    rationals = sorted(
        {
            Fraction(a, q)
            for q in range(1, MAX_RATIONAL_DENOMINATOR + 1)
            for a in range(1, q // 2 + 1)
        }
    )
    rationals = [float(r) for r in rationals if r >= omega]
    alphas = np.concatenate(
        [
            np.geomspace(omega, 0.5, half),
            np.linspace(omega, 0.5, samples - half),
            rationals,
            [0.5],
        ]
    )
    return np.unique(alphas)


class MinorArcReport(object):
    """The largest ``|S(alpha)|`` found on the minor arcs

    Attributes
    ----------
    sup : float
    argsup : float
    exponent : float
        ``log(sup) / log(X)``
    sigma : float
    target : float
        ``1 - sigma``
    samples : int
    """

    def to_dict(self) -> dict:
        return {
            "sup": self.sup,
            "argsup": self.argsup,
            "exponent": self.exponent,
            "sigma": self.sigma,
            "target": self.target,
            "samples": self.samples,
        }


def minor_arc_sup(
    f: FunctionExpr,
    params: ArcParams,
    sigma: float,
    samples: int = 1000,
    workers: int = 1,
) -> MinorArcReport:
    """Estimate ``sup |S(alpha)|`` over ``omega <= |alpha| <= 1/2`` by sampling

    ``|S(-alpha)| = |S(alpha)|``, so only positive `alphas` are sampled.

    Raises
    ------
    ValueError
        If ``samples < 1000``
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    alphas = minor_arc_samples(params.omega, samples)
    window = _Window(f, params.X0, params.X1, workers)
    sums = ordered_map(lambda a: abs(window.sum(float(a), "S")), alphas, workers)
    i = int(np.argmax(sums))
    report = MinorArcReport()
    report.sup = float(sums[i])
    report.argsup = float(alphas[i])
    report.exponent = math.log(report.sup) / math.log(params.X)
    report.sigma = float(sigma)
    report.target = 1 - report.sigma
    report.samples = len(alphas)
    logger.info(
        "minor arc sup for N=%d: |S(%.6g)| = %.6g (exponent %.4f vs 1 - sigma = %.4f)",
        params.N,
        report.argsup,
        report.sup,
        report.exponent,
        report.target,
    )
    return report
