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

r"""Explicit representations of large integers as sums of values of `f`

For `f` of class I, or of class III with a slowly growing remainder, write
:math:`f(x) = \alpha_k x^k + \cdots + \alpha_1 x + r(x)`. Given :math:`N` and
:math:`s`, the pipeline

1. solves :math:`N = s f(U + V) + s \alpha_k V^k` with :math:`V = U^{1 - \delta}`,
   and sets :math:`X = [U]`, :math:`Y = V + \{U\}`;
2. replaces each :math:`s Y^j` in the Taylor expansion of :math:`s f(X + Y)` by a
   multiple :math:`\Delta_0 M_j` of the Hilbert-Kamke determinant, carrying the
   error :math:`E_j \in (0, \Delta_0]` into the next power;
3. solves the Hilbert-Kamke system :math:`\sum_i y_i^j = \Delta_0 M_j`;
4. reports how far :math:`N` is from :math:`\sum_i f(X + y_i)`.

The distance stays bounded as :math:`N` grows.
"""

import logging
import math

from typing import List, Optional, Sequence

import numpy as np

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import config
from pydrobert.waring import DomainError
from pydrobert.waring import RepresentationError
from pydrobert.waring import SolveError
from pydrobert.waring.basis import floors_and_fractions
from pydrobert.waring.degree import DegreeProfile
from pydrobert.waring.degree import polynomial_part
from pydrobert.waring.functions import _mp
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.kamke import _iroot
from pydrobert.waring.kamke import delta0
from pydrobert.waring.kamke import HKInstance
from pydrobert.waring.kamke import check_conditions
from pydrobert.waring.kamke import solve_bruteforce
from pydrobert.waring.util import ordered_map
from pydrobert.waring.util import solve_increasing

__all__ = [
    "assemble",
    "build_MEj",
    "carry_identity_residuals",
    "CarryState",
    "default_x_max",
    "DEFAULT_DELTA",
    "hk_ratio_check",
    "RatioCheck",
    "representation_scan",
    "RepresentationResult",
    "SCAN_HEADER",
    "ScanRow",
    "solve_UV",
    "suggest_s",
    "taylor_remainder_check",
]

DEFAULT_DELTA = 0.25
"""The exponent in ``V = U ** (1 - delta)``; any value in ``(0, 1/2)`` works"""

SOLVE_RTOL = 1e-6
RATIO_FLAG_FACTOR = 10.0
CONSERVATION_RTOL = 1e-6
CARRY_RTOL = 1e-6

logger = logging.getLogger(__name__)


def solve_UV(
    f: FunctionExpr,
    poly: Sequence[float],
    N: int,
    s: int,
    delta: float = DEFAULT_DELTA,
):
    """Solve ``N = s f(U + V) + s alpha_k V ** k`` with ``V = U ** (1 - delta)``

    Parameters
    ----------
    f : FunctionExpr
    poly : sequence of float
        ``alpha_1, ..., alpha_k``, the polynomial part of `f`
    N : int
    s : int
    delta : float, optional

    Returns
    -------
    U, V : float

    Raises
    ------
    SolveError
        If `N` is too small for a root above 1 or the equation is not increasing
        near the root
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2), got {}".format(delta))
    if s < 1:
        raise ValueError("s must be positive")
    k = len(poly)
    if not k:
        raise ValueError("poly must have at least one coefficient")
    alpha_k = float(poly[-1])
    e = 1 - delta

    def _g(u):
        return s * f.eval(u + u ** e) + s * alpha_k * u ** (k * e)

    def _dg(u):
        return s * f.eval_jet(u + u ** e, 1)[1] * (
            1 + e * u ** -delta
        ) + s * alpha_k * k * e * u ** (k * e - 1)

    U = solve_increasing(_g, float(N), 1.0, deriv=_dg)
    for u in np.geomspace(max(1.0, U / 16), U, 17):
        if not _dg(u) > 0:
            raise SolveError(
                "N = s f(U + V) + s alpha_k V^k is not increasing near U={}".format(u)
            )
    if abs(_g(U) - N) > SOLVE_RTOL * N:
        raise SolveError(
            "could not solve for U to relative tolerance {} (N={})".format(
                SOLVE_RTOL, N
            )
        )
    return U, U ** e


class CarryState(object):
    """The quantities built on the way from `N` to a Hilbert-Kamke system

    Attributes
    ----------
    N, s, k : int
    delta : float
    U, V : float
    X : int
        ``[U]``
    Y : float
        ``V + {U}``, so that ``X + Y = U + V``
    poly : numpy.ndarray
        ``alpha_1, ..., alpha_k``
    delta0 : int
    E : numpy.ndarray
        ``E_0, ..., E_k`` with ``E_0 = 0`` and ``0 < E_j <= delta0`` otherwise.
        Empty until :func:`build_MEj` is called
    M : list of int
        ``M_1, ..., M_k``, all positive
    derivatives : numpy.ndarray
        ``f^{(j)}(X)`` for ``j = 0, ..., k``
    """

    def __init__(
        self,
        N: int,
        s: int,
        poly: Sequence[float],
        delta: float,
        U: float,
        V: float,
    ):
        self.N, self.s = int(N), int(s)
        self.poly = np.asarray(poly, dtype=np.float64)
        self.k = len(self.poly)
        self.delta = float(delta)
        self.U, self.V = float(U), float(V)
        self.X = int(math.floor(self.U))
        self.Y = self.V + (self.U - self.X)
        self.delta0 = delta0(self.k)
        self.E = np.zeros(0)
        self.M = []
        self.derivatives = np.zeros(0)

    @property
    def targets(self) -> List[int]:
        """``delta0 * M_j`` for ``j = 1, ..., k``"""
        return [self.delta0 * m for m in self.M]

    @property
    def E_window(self) -> bool:
        """Whether ``0 < E_j <= delta0`` for ``j = 1, ..., k``"""
        E = self.E[1:]
        return bool(len(E) and np.all((E > 0) & (E <= self.delta0)))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "s": self.s,
            "k": self.k,
            "delta": self.delta,
            "U": self.U,
            "V": self.V,
            "X": self.X,
            "Y": self.Y,
            "poly": self.poly.tolist(),
            "delta0": self.delta0,
            "E": self.E.tolist(),
            "M": list(self.M),
            "derivatives": self.derivatives.tolist(),
        }


def build_MEj(f: FunctionExpr, state: CarryState) -> CarryState:
    """Fill in ``M_1, ..., M_k`` and the carried errors ``E_0, ..., E_k``

    With ``E_0 = 0`` and ``q_j = s Y^j + j f^{(j-1)}(X) / f^{(j)}(X) E_{j-1}``
    (plus ``s V^k`` when ``j = k``), ``M_j`` is the integer with
    ``0 < E_j = q_j - delta0 M_j <= delta0``. An exact multiple of `delta0` gets
    ``E_j = delta0``.

    Raises
    ------
    DomainError
        If some ``f^{(j)}(X)`` vanishes for ``1 <= j <= k``
    SolveError
        If some ``M_j`` is not positive (`N` is too small)
    RuntimeError
        If the carry identity fails by more than a relative 1e-6 when
        recomputed in extended precision
    """
    k, s, d0 = state.k, state.s, state.delta0
    jet = f.eval_jet(float(state.X), k)
    derivs = np.asarray(jet.derivatives, dtype=np.float64)
    for j in range(1, k + 1):
        if derivs[j] == 0 or not np.isfinite(derivs[j]):
            raise DomainError(
                "f^({}) vanishes at X={}; cannot carry errors".format(j, state.X)
            )
    E, M = [0.0], []
    for j in range(1, k + 1):
        q = s * state.Y ** j + j * derivs[j - 1] / derivs[j] * E[-1]
        if j == k:
            q += s * state.V ** k
        m = int(math.ceil(q / d0)) - 1
        e = q - d0 * m
        # rounding near multiples of delta0
        while e <= 0:
            m -= 1
            e = q - d0 * m
        while e > d0:
            m += 1
            e = q - d0 * m
        if m < 1:
            raise SolveError(
                "M_{} = {} is not positive; N={} is too small".format(j, m, state.N)
            )
        E.append(e)
        M.append(m)
    state.E = np.array(E)
    state.M = M
    state.derivatives = derivs
    logger.log(9, "N=%d: X=%d Y=%.6g M=%s", state.N, state.X, state.Y, M)
    residuals = carry_identity_residuals(state)
    if np.any(residuals > CARRY_RTOL):
        raise RuntimeError(
            "carried errors for N={} break the Taylor identity (relative "
            "residuals {})".format(state.N, residuals.tolist())
        )
    return state


def carry_identity_residuals(state: CarryState) -> np.ndarray:
    """Relative residuals of the carry identity, in extended precision

    For ``j = 1, ..., k``, the left side ``s Y^j + j f^{(j-1)}(X) / f^{(j)}(X)
    E_{j-1}`` (plus ``s V^k`` when ``j = k``) is recomputed from ``state.Y``,
    ``state.derivatives`` and ``state.E`` and compared with
    ``delta0 M_j + E_j``. Entry ``j - 1`` is the difference over ``s Y^j``.
    """
    s, k, d0 = state.s, state.k, state.delta0
    Y, V = _mp.mpf(state.Y), _mp.mpf(state.V)
    derivs = [_mp.mpf(float(x)) for x in state.derivatives]
    E = [_mp.mpf(float(x)) for x in state.E]
    residuals = []
    for j in range(1, k + 1):
        lhs = s * Y ** j + j * derivs[j - 1] / derivs[j] * E[j - 1]
        if j == k:
            lhs += s * V ** k
        rhs = d0 * _mp.mpf(state.M[j - 1]) + E[j]
        residuals.append(float(abs(lhs - rhs) / (s * Y ** j)))
    return np.array(residuals)


class RatioCheck(object):
    """How close the targets ``delta0 M_j`` are to their predicted proportions

    Attributes
    ----------
    ratios : numpy.ndarray
        ``delta0 M_j / (2^{-j/k} s^{1-j/k} (delta0 M_k)^{j/k})`` for
        ``j = 1, ..., k - 1``
    deviations : numpy.ndarray
        ``|ratios - 1|``
    leading_ratio : float
        ``delta0 M_k / (2 s Y^k)``
    error_scale : float
        ``X / Y^2``
    flagged : bool
        Whether some deviation exceeds ten times `error_scale`
    """

    def __init__(self, ratios, leading_ratio: float, error_scale: float):
        self.ratios = np.asarray(ratios, dtype=np.float64)
        self.deviations = np.abs(self.ratios - 1)
        self.leading_ratio = float(leading_ratio)
        self.error_scale = float(error_scale)
        self.flagged = bool(
            np.any(self.deviations > RATIO_FLAG_FACTOR * self.error_scale)
        )

    def to_dict(self) -> dict:
        return {
            "ratios": self.ratios.tolist(),
            "deviations": self.deviations.tolist(),
            "leading_ratio": self.leading_ratio,
            "error_scale": self.error_scale,
            "flagged": self.flagged,
        }


def hk_ratio_check(state: CarryState) -> RatioCheck:
    """Compare the targets with the proportions that make the system solvable"""
    if not state.M:
        raise ValueError("state has not been built")
    k, s = state.k, state.s
    top = state.delta0 * state.M[-1]
    ratios = [
        state.delta0
        * state.M[j - 1]
        / (2 ** (-j / k) * s ** (1 - j / k) * top ** (j / k))
        for j in range(1, k)
    ]
    check = RatioCheck(
        ratios, top / (2 * s * state.Y ** k), state.X / state.Y ** 2
    )
    if check.flagged:
        logger.warning(
            "N=%d: target ratios %s deviate more than %g X/Y^2",
            state.N,
            check.ratios.tolist(),
            RATIO_FLAG_FACTOR,
        )
    return check


def _taylor_remainder(f: FunctionExpr, X: int, derivs: np.ndarray, y: float):
    # f(X + y) - sum_{j<=k} f^(j)(X) / j! y^j, in extended precision
    exact = f.eval(X + y, "extended")
    y = _mp.mpf(y)
    approx = _mp.fsum(
        _mp.mpf(float(d)) / math.factorial(j) * y ** j for j, d in enumerate(derivs)
    )
    return exact - approx


def taylor_remainder_check(f: FunctionExpr, X: int, Y: float, k: int) -> float:
    """``|f(X + Y) - T_k(X, Y)|``, where ``T_k`` is the order-`k` Taylor polynomial

    Polynomials of degree at most `k` (with exactly representable coefficients)
    give exactly zero
    """
    derivs = f.eval_jet(float(X), k).derivatives
    return float(abs(_taylor_remainder(f, X, derivs, Y)))


def default_x_max(state: CarryState) -> int:
    """``ceil((2 delta0 M_k / s) ** (1 / k)) + 2``, where solutions should live"""
    k = state.k
    return int(math.ceil((2 * state.delta0 * state.M[-1] / state.s) ** (1 / k))) + 2


class RepresentationResult(object):
    """An explicit representation of `N` by values of `f`

    Attributes
    ----------
    N : int
    X : int
    ys : list of int
        ``y_1 >= ... >= y_s >= 1``
    sum_f : float
        ``sum_i f(X + y_i)``
    residual_real : float
        ``N - sum_f``
    residual_int : int
        ``N - sum_i [f(X + y_i)]``
    hk_used : HKInstance
    x_max : int
        The search cap that succeeded
    state : CarryState
    ratio_check : RatioCheck
    conditions : HKConditions
    taylor_remainder : float
        ``|f(X + Y) - T_k(X, Y)|``
    taylor_scale : float
        ``X ** -delta``
    identity_gap : float
        ``|sum_j f^{(j)}(X) / j! sum_i y_i^j - (sum_f - s f(X))|``, which is the
        summed Taylor remainder over the ``y_i``
    C_run : float
        The bound on ``|residual_real|`` that the construction guarantees for this
        run
    """

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "X": self.X,
            "ys": list(self.ys),
            "sum_f": self.sum_f,
            "residual_real": self.residual_real,
            "residual_int": self.residual_int,
            "hk_used": self.hk_used.to_dict(),
            "x_max": self.x_max,
            "state": self.state.to_dict(),
            "ratio_check": self.ratio_check.to_dict(),
            "conditions": self.conditions.to_dict(),
            "taylor_remainder": self.taylor_remainder,
            "taylor_scale": self.taylor_scale,
            "identity_gap": self.identity_gap,
            "C_run": self.C_run,
        }


def _check_profile(profile: DegreeProfile):
    if profile.function_class == "II":
        raise DomainError("class II functions have no polynomial part to represent")
    if not profile.subpolynomial_remainder:
        raise DomainError(
            "the remainder grows like x^{:.3g}; representations need a "
            "subpolynomial remainder".format(profile.c_f)
        )


def _hk_solve(inst, state, x_max, budget, workers):
    if x_max is not None:
        return solve_bruteforce(inst, x_max, budget, workers), int(x_max)
    x_max = default_x_max(state)
    solution = solve_bruteforce(inst, x_max, budget, workers)
    if solution is None:
        wide = _iroot(inst.targets[-1] - (inst.s - 1), inst.k)
        if wide > x_max:
            logger.log(
                9, "%s unsolved with x_max=%d, widening to %d", inst, x_max, wide
            )
            x_max = wide
            solution = solve_bruteforce(inst, x_max, budget, workers)
    return solution, x_max


def assemble(
    f: FunctionExpr,
    profile: DegreeProfile,
    N: int,
    s: int,
    delta: float = DEFAULT_DELTA,
    x_max: Optional[int] = None,
    budget: int = config.DFS_NODE_BUDGET,
    workers: int = 1,
) -> RepresentationResult:
    """Write `N` as ``f(X + y_1) + ... + f(X + y_s)`` up to a bounded residual

    Parameters
    ----------
    f : FunctionExpr
    profile : DegreeProfile
        Of class I or III with a subpolynomial remainder. The polynomial part is
        extracted if `profile` lacks it
    N : int
    s : int
    delta : float, optional
    x_max : int, optional
        The Hilbert-Kamke search cap. If unset, :func:`default_x_max` is tried
        first, then the largest value the ``k``-th target allows
    budget : int, optional
        Search nodes for the Hilbert-Kamke solver
    workers : int, optional

    Raises
    ------
    DomainError
        If `profile` is of class II or its remainder is not subpolynomial
    RepresentationError
        If the Hilbert-Kamke system has no solution under the cap. The instance is
        stored in its `instance` attribute
    BudgetExceeded
        If the search is inconclusive within `budget`
    """
    _check_profile(profile)
    poly = profile.poly_part
    if len(poly) != profile.d_f:
        poly = polynomial_part(f, profile)
    N, s = int(N), int(s)
    U, V = solve_UV(f, poly, N, s, delta)
    state = build_MEj(f, CarryState(N, s, poly, delta, U, V))
    ratio_check = hk_ratio_check(state)
    inst = HKInstance(state.k, s, state.targets)
    conditions = check_conditions(inst)
    solution, x_max = _hk_solve(inst, state, x_max, budget, workers)
    if solution is None:
        raise RepresentationError(
            "{} has no solution with x_max={}".format(inst, x_max), inst
        )
    X, k, derivs = state.X, state.k, state.derivatives
    ys = solution.to_list()

    values = [f.eval(X + y, "extended") for y in ys]
    sum_f = _mp.fsum(values)
    residual_real = float(_mp.mpf(N) - sum_f)
    residual_int = N - sum(
        int(floors_and_fractions(f, X + y, 1)[0][0]) for y in ys
    )

    # the same residual along a double-precision path
    xs = np.array([X + y for y in ys], dtype=np.float64)
    check = N - math.fsum(float(v) for v in np.atleast_1d(f.eval(xs)))
    if abs(check - residual_real) > CONSERVATION_RTOL * max(N, 1):
        raise RuntimeError(
            "residuals disagree: {} (extended) vs {} (double)".format(
                residual_real, check
            )
        )

    fX = f.eval(X, "extended")
    power_sums = solution.power_sums(k)
    taylor_sum = _mp.fsum(
        _mp.mpf(float(derivs[j])) / math.factorial(j) * power_sums[j - 1]
        for j in range(1, k + 1)
    )
    identity_gap = float(abs(taylor_sum - (sum_f - s * fX)))
    r_y = [abs(_taylor_remainder(f, X, derivs, y)) for y in ys]
    r_Y = abs(_taylor_remainder(f, X, derivs, state.Y))
    c_k = float(derivs[k]) / math.factorial(k)
    g = abs(
        _mp.mpf(N)
        - s * f.eval(U + V, "extended")
        - s * _mp.mpf(float(poly[-1])) * _mp.mpf(V) ** k
    )
    C_run = float(
        g
        + s * r_Y
        + s * abs(float(poly[-1]) - c_k) * _mp.mpf(V) ** k
        + abs(c_k) * state.delta0
        + _mp.fsum(r_y)
    ) + 1e-9 * N
    if abs(residual_real) > C_run:
        raise RuntimeError(
            "residual {} exceeds the bound {} of the construction".format(
                residual_real, C_run
            )
        )

    result = RepresentationResult()
    result.N, result.X, result.ys = N, X, ys
    result.sum_f = float(sum_f)
    result.residual_real = residual_real
    result.residual_int = residual_int
    result.hk_used = inst
    result.x_max = x_max
    result.state = state
    result.ratio_check = ratio_check
    result.conditions = conditions
    result.taylor_remainder = float(r_Y)
    result.taylor_scale = X ** -state.delta
    result.identity_gap = identity_gap
    result.C_run = C_run
    logger.log(
        9,
        "N=%d = sum f(%d + y), y=%s, residual %.6g (int %d)",
        N,
        X,
        ys,
        residual_real,
        residual_int,
    )
    return result


class ScanRow(object):
    """One target of a representation scan

    Attributes
    ----------
    N : int
    X : int or None
    residual_int : int or None
    residual_real : float or None
    hk_status : {'ok', 'unsolved', 'budget'}
    result : RepresentationResult or None
    E_window : bool or None
        Whether the carried errors of `result` lie in ``(0, delta0]``
    """

    def __init__(
        self,
        N: int,
        X: Optional[int] = None,
        residual_int: Optional[int] = None,
        residual_real: Optional[float] = None,
        hk_status: str = "ok",
        result: Optional["RepresentationResult"] = None,
    ):
        self.N = N
        self.X = X
        self.residual_int = residual_int
        self.residual_real = residual_real
        self.hk_status = hk_status
        self.result = result
        self.E_window = None if result is None else result.state.E_window

    def to_row(self) -> list:
        return [
            self.N,
            "" if self.X is None else self.X,
            "" if self.residual_int is None else self.residual_int,
            "" if self.residual_real is None else self.residual_real,
            self.hk_status,
            "" if self.E_window is None else int(self.E_window),
        ]


SCAN_HEADER = ("N", "X", "residual_int", "residual_real", "hk_status", "E_window")


def _scan_one(f, profile, N, s, delta, x_max, budget):
    try:
        result = assemble(f, profile, N, s, delta, x_max, budget)
    except RepresentationError:
        return ScanRow(N, hk_status="unsolved")
    except BudgetExceeded:
        return ScanRow(N, hk_status="budget")
    return ScanRow(
        N, result.X, result.residual_int, result.residual_real, "ok", result
    )


def representation_scan(
    f: FunctionExpr,
    profile: DegreeProfile,
    Ns: Sequence[int],
    s: int,
    delta: float = DEFAULT_DELTA,
    x_max: Optional[int] = None,
    budget: int = config.DFS_NODE_BUDGET,
    workers: int = 1,
) -> List[ScanRow]:
    """Run :func:`assemble` on every target in `Ns`

    Targets run in parallel; rows come back in the order of `Ns`. A target whose
    Hilbert-Kamke system is unsolved or over budget gets a row without a result.
    """
    _check_profile(profile)
    if len(profile.poly_part) != profile.d_f:
        profile = profile.replace(poly_part=polynomial_part(f, profile))
    rows = ordered_map(
        lambda N: _scan_one(f, profile, int(N), s, delta, x_max, budget), Ns, workers
    )
    solved = [r for r in rows if r.hk_status == "ok"]
    if solved:
        logger.info(
            "represented %d of %d targets; max |residual_int| = %d",
            len(solved),
            len(rows),
            max(abs(r.residual_int) for r in solved),
        )
    return rows


def suggest_s(
    f: FunctionExpr,
    profile: DegreeProfile,
    N: int,
    s_values: Sequence[int] = range(2, 33),
    delta: float = DEFAULT_DELTA,
    x_max: Optional[int] = None,
    budget: int = config.DFS_NODE_BUDGET,
) -> Optional[int]:
    """The smallest `s` in `s_values` for which :func:`assemble` succeeds on `N`

    Returns :obj:`None` if none does
    """
    for s in s_values:
        try:
            assemble(f, profile, N, s, delta, x_max, budget)
        except (RepresentationError, BudgetExceeded, SolveError) as e:
            logger.log(9, "s=%d fails on N=%d: %s", s, N, e)
            continue
        logger.info("s=%d suffices for N=%d", s, N)
        return s
    return None
