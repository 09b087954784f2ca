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

r"""Classification of functions by growth

Every function of polynomial growth falls into one of three classes:

I
    :math:`f(x) = p(x)` for a real polynomial :math:`p` of degree :math:`d_f`
II
    :math:`f` is non-polynomial, with derivatives growing like
    :math:`f^{(j)}(x) \approx x^{c - j}` for a real degree :math:`c`
III
    :math:`f(x) = p(x) + r(x)` where :math:`p` has degree :math:`d_f` and the
    non-polynomial :math:`r` has a smaller degree :math:`c_f`

Degrees are estimated numerically from growth slopes of :math:`\log |f|` over
doubling windows :math:`[x, 2x]`. The slopes are extrapolated to
:math:`x = \infty` with a linear regression against :math:`1 / \log x`, so that
logarithmic factors such as :math:`x^2 / \log x` report the degree 2. The degree of
the non-polynomial part of a class III function comes from the growth of
:math:`f^{(d_f + 1)}`, in which the polynomial part vanishes.
"""

import logging

from typing import Optional, Sequence, Tuple

import numpy as np

from pydrobert.waring import ClassificationError
from pydrobert.waring import config
from pydrobert.waring import DomainError
from pydrobert.waring.functions import _mp
from pydrobert.waring.functions import Add
from pydrobert.waring.functions import Constant
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.functions import Log
from pydrobert.waring.functions import Mul
from pydrobert.waring.functions import Pow
from pydrobert.waring.functions import Variable

__all__ = [
    "classify",
    "DegreeProfile",
    "doubling_slopes",
    "extrapolate_exponent",
    "FUNCTION_CLASSES",
    "polynomial_part",
]

FUNCTION_CLASSES = ("I", "II", "III")

GROWTH_PROBES = (1e3, 1e4, 1e5, 1e6)
"""Points at which ``log f(x) / log x`` must be bounded"""

WINDOW_START = 1e3
WINDOW_DOUBLINGS = 20
REGRESSION_WINDOWS = 8
DECLARED_TOL = 0.1
ZERO_REMAINDER_ULPS = 1e3

logger = logging.getLogger(__name__)


class DegreeProfile(object):
    """The class and degrees of a function

    Parameters
    ----------
    function_class : {'I', 'II', 'III'}
    d_f : int
        The degree of the polynomial part for classes I and III. For class II, the
        real degree rounded to the nearest integer
    c_f : float, optional
        The degree of the non-polynomial part (classes II and III). Must be 0 for
        class I and less than `d_f` for class III
    c_real : float, optional
        The raw growth exponent estimated from probes (:obj:`numpy.nan` if never
        estimated)
    subpolynomial_remainder : bool, optional
        Whether the non-polynomial part grows slower than every positive power of
        x. Always :obj:`True` for class I and :obj:`False` for class II
    poly_part : sequence of float, optional
        The coefficients ``alpha_1, ..., alpha_k`` of the polynomial part. Empty
        for class II. Can be left empty for classes I and III (e.g. when declared by
        the user), in which case :func:`classify` fills it in

    Attributes
    ----------
    function_class : str
    d_f : int
    c_f : float
    c_real : float
    subpolynomial_remainder : bool
    poly_part : numpy.ndarray

    Raises
    ------
    ValueError
        If the arguments violate the invariants of the class
    """

    def __init__(
        self,
        function_class: str,
        d_f: int,
        c_f: float = 0.0,
        c_real: float = float("nan"),
        subpolynomial_remainder: Optional[bool] = None,
        poly_part: Sequence[float] = tuple(),
    ):
        if function_class not in FUNCTION_CLASSES:
            raise ValueError(
                "function_class must be one of {}, got '{}'".format(
                    FUNCTION_CLASSES, function_class
                )
            )
        d_f, c_f = int(d_f), float(c_f)
        if d_f < 0:
            raise ValueError("d_f must be non-negative")
        poly_part = np.asarray(poly_part, dtype=np.float64).ravel()
        if function_class == "I":
            if c_f:
                raise ValueError("c_f must be 0 for class I")
            if subpolynomial_remainder is False:
                raise ValueError("class I remainders are trivially subpolynomial")
            subpolynomial_remainder = True
        elif function_class == "II":
            if len(poly_part):
                raise ValueError("class II functions have no polynomial part")
            if subpolynomial_remainder:
                raise ValueError("class II functions are entirely non-polynomial")
            subpolynomial_remainder = False
        else:
            if not c_f < d_f:
                raise ValueError("class III requires c_f < d_f")
            if subpolynomial_remainder is None:
                subpolynomial_remainder = c_f < config.SUBPOLYNOMIAL_TOL
        if len(poly_part) and len(poly_part) != d_f:
            raise ValueError(
                "poly_part should have d_f = {} coefficients, got {}".format(
                    d_f, len(poly_part)
                )
            )
        self.function_class = function_class
        self.d_f = d_f
        self.c_f = c_f
        self.c_real = float(c_real)
        self.subpolynomial_remainder = bool(subpolynomial_remainder)
        self.poly_part = poly_part

    @property
    def degree(self) -> float:
        """The degree of the function: `c_f` for class II, `d_f` otherwise"""
        return self.c_f if self.function_class == "II" else float(self.d_f)

    def replace(self, **kwargs) -> "DegreeProfile":
        """A copy of this profile with some fields replaced"""
        fields = self.to_dict()
        fields.update(kwargs)
        return DegreeProfile(**fields)

    def to_dict(self) -> dict:
        return {
            "function_class": self.function_class,
            "d_f": self.d_f,
            "c_f": self.c_f,
            "c_real": self.c_real,
            "subpolynomial_remainder": self.subpolynomial_remainder,
            "poly_part": self.poly_part.tolist(),
        }

    def reconstruct(self) -> FunctionExpr:
        """A simple function with this profile

        The polynomial part is rebuilt from `poly_part`. The non-polynomial part
        is ``pow(x, c_f)``, or ``log(x)`` when subpolynomial.
        """
        terms = []
        if self.function_class != "II":
            if len(self.poly_part) != self.d_f:
                raise ValueError("poly_part has not been filled in")
            for j, alpha in enumerate(self.poly_part, 1):
                if alpha:
                    mono = Variable() if j == 1 else Pow(Variable(), j)
                    terms.append(mono if alpha == 1 else Mul(Constant(alpha), mono))
        if self.function_class == "II":
            terms.append(Pow(Variable(), self.c_f))
        elif self.function_class == "III":
            terms.append(
                Log(Variable())
                if self.subpolynomial_remainder
                else Pow(Variable(), self.c_f)
            )
        if not terms:
            raise ValueError("profile describes the zero function")
        return FunctionExpr(terms[0] if len(terms) == 1 else Add(*terms))

    def __eq__(self, other) -> bool:
        return isinstance(other, DegreeProfile) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return "DegreeProfile({})".format(
            ", ".join("{}={!r}".format(k, v) for k, v in self.to_dict().items())
        )


def doubling_slopes(
    values: np.ndarray, x: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Growth slopes of positive values sampled at doubling points

    Parameters
    ----------
    values : array-like
        ``values[i]`` sampled at ``x[i]``, where each ``x[i + 1] = 2 x[i]``
    x : array-like, optional
        Defaults to ``WINDOW_START * 2 ** arange(len(values))``

    Returns
    -------
    x_mid, slopes : numpy.ndarray
        The geometric midpoint of each window and the slope of ``log values``
        against ``log x`` on it
    """
    values = np.asarray(values, dtype=np.float64)
    if x is None:
        x = WINDOW_START * 2.0 ** np.arange(len(values))
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(values > 0)):
        raise ClassificationError("growth slopes need positive values")
    slopes = np.diff(np.log(values)) / np.diff(np.log(x))
    return np.sqrt(x[1:] * x[:-1]), slopes


def extrapolate_exponent(
    x_mid: np.ndarray, slopes: np.ndarray, windows: int = REGRESSION_WINDOWS
) -> float:
    """Extrapolate growth slopes to infinity

    Fits ``slope = c + b / log x`` over the last `windows` slopes and returns ``c``
    """
    x_mid, slopes = np.asarray(x_mid)[-windows:], np.asarray(slopes)[-windows:]
    if len(slopes) < 2 or np.ptp(slopes) == 0:
        return float(slopes[-1])
    _, intercept = np.polyfit(1 / np.log(x_mid), slopes, 1)
    return float(intercept)


def _stable(slopes: np.ndarray) -> bool:
    last = slopes[-3:]
    return bool(np.ptp(last) < config.SLOPE_STABILITY_TOL)


def _window_points() -> np.ndarray:
    return WINDOW_START * 2.0 ** np.arange(WINDOW_DOUBLINGS + 1)


def _growth(f: FunctionExpr) -> Tuple[np.ndarray, np.ndarray, float]:
    # returns window points, f at them, and the extrapolated exponent
    try:
        probe = f.eval(np.asarray(GROWTH_PROBES))
        x = _window_points()
        fx = f.eval(x)
    except DomainError as e:
        raise ClassificationError("'{}' could not be probed: {}".format(f, e))
    if np.any(~(probe > 0)) or np.any(~(fx > 0)):
        raise ClassificationError(
            "'{}' must be positive at large x to measure its growth".format(f)
        )
    ratios = np.log(probe) / np.log(GROWTH_PROBES)
    if np.any(ratios > config.MAX_GROWTH_DEGREE):
        raise ClassificationError(
            "'{}' grows faster than x^{} (log f / log x up to {:.3g})".format(
                f, config.MAX_GROWTH_DEGREE, ratios.max()
            )
        )
    x_mid, slopes = doubling_slopes(fx, x)
    for xm, slope in zip(x_mid, slopes):
        logger.log(9, "growth slope of '%s' near %.3g: %.6f", f, xm, slope)
    if not _stable(slopes) or slopes[-1] > config.MAX_GROWTH_DEGREE:
        raise ClassificationError(
            "growth slopes of '{}' did not stabilize below {} (last three: "
            "{})".format(f, config.MAX_GROWTH_DEGREE, slopes[-3:].tolist())
        )
    return x, fx, extrapolate_exponent(x_mid, slopes)


def _nonpolynomial_exponent(f: FunctionExpr, d: int, x: np.ndarray, fx: np.ndarray):
    # degree of the non-polynomial part from the (d + 1)-th normalized derivative,
    # or None if it vanishes
    if d + 1 > config.MAX_JET_ORDER:
        raise ClassificationError(
            "degree {} is too large to isolate the polynomial part".format(d),
            "extraction",
        )
    coeffs = np.array([abs(f.eval_jet(y, d + 1).coefficients[-1]) for y in x])
    scaled = coeffs * x ** (d + 1)
    if not np.any(scaled):
        return None
    noise = ZERO_REMAINDER_ULPS * np.finfo(np.float64).eps * np.abs(fx)
    if np.all(scaled > 0):
        x_mid, slopes = doubling_slopes(scaled, x)
        if _stable(slopes):
            return extrapolate_exponent(x_mid, slopes)
    if np.all(scaled <= noise):
        return None
    raise ClassificationError(
        "the growth of the non-polynomial part of '{}' could not be "
        "measured".format(f),
        "ambiguous",
    )


def _check_declared_remainder(
    f: FunctionExpr, declared: DegreeProfile, x: np.ndarray, fx: np.ndarray
):
    # class I needs a vanishing remainder, class III one of degree c_f
    try:
        c_f = _nonpolynomial_exponent(f, declared.d_f, x, fx)
    except ClassificationError as e:
        if declared.function_class == "I":
            raise ClassificationError(
                "declared class I of '{}' but its remainder does not vanish: "
                "{}".format(f, e),
                "declared",
            )
        logger.warning(
            "could not measure the remainder of '%s'; keeping the declared "
            "c_f = %g",
            f,
            declared.c_f,
        )
        return
    if declared.function_class == "I":
        if c_f is not None:
            raise ClassificationError(
                "declared class I of '{}' but its remainder grows like "
                "x^{:.4f}".format(f, c_f),
                "declared",
            )
    elif c_f is None:
        raise ClassificationError(
            "declared class III of '{}' but it is a polynomial".format(f),
            "declared",
        )
    elif abs(c_f - declared.c_f) > DECLARED_TOL:
        raise ClassificationError(
            "declared c_f {} of '{}' disagrees with the estimated {:.4f}".format(
                declared.c_f, f, c_f
            ),
            "declared",
        )
    else:
        logger.log(9, "declared c_f of '%s' matches estimate %.6f", f, c_f)


def classify(
    f: FunctionExpr, declared: Optional[DegreeProfile] = None
) -> DegreeProfile:
    """Classify a function and estimate its degrees

    Parameters
    ----------
    f : FunctionExpr
    declared : DegreeProfile, optional
        A profile known from symbolic reasoning. If set, it is validated against
        the estimated degree (within 0.1) and, for classes I and III, against the
        growth of the remainder (vanishing for class I, of degree `c_f` within
        0.1 for class III), and returned with `c_real` and, for
        classes I and III, `poly_part` filled in

    Returns
    -------
    profile : DegreeProfile

    Raises
    ------
    ClassificationError
        With `reason` ``'growth'`` if `f` is not positive or does not have
        stable polynomial growth on the probe range, ``'ambiguous'`` if the probes
        cannot separate classes II and III, ``'extraction'`` if the polynomial part
        cannot be extracted, and ``'declared'`` if `declared` disagrees with the
        probes
    """
    x, fx, c_real = _growth(f)
    logger.info("extrapolated growth exponent of '%s': %.6f", f, c_real)

    if declared is not None:
        if abs(declared.degree - c_real) > DECLARED_TOL:
            raise ClassificationError(
                "declared degree {} of '{}' disagrees with the estimated {:.4f}".format(
                    declared.degree, f, c_real
                ),
                "declared",
            )
        if declared.function_class != "II":
            _check_declared_remainder(f, declared, x, fx)
        profile = declared.replace(c_real=c_real)
        if profile.function_class != "II" and not len(profile.poly_part):
            profile = profile.replace(poly_part=polynomial_part(f, profile))
        return profile

    d = int(np.floor(c_real + 0.5))
    if d < 1 or abs(c_real - d) >= config.DEGREE_ROUND_TOL:
        return DegreeProfile("II", d, c_f=c_real, c_real=c_real)

    lead = fx / x ** d
    drift = abs(lead[-1] / lead[-5] - 1)
    logger.log(9, "drift of f / x^%d for '%s': %.3g", d, f, drift)
    if drift > config.LEADING_DRIFT_TOL:
        return DegreeProfile("II", d, c_f=c_real, c_real=c_real)

    c_f = _nonpolynomial_exponent(f, d, x, fx)
    if c_f is None:
        profile = DegreeProfile("I", d, c_real=c_real)
    elif c_f < d - (0 if drift < config.LEADING_STABLE_TOL else DECLARED_TOL):
        c_f = max(c_f, 0.0)
        profile = DegreeProfile("III", d, c_f=c_f, c_real=c_real)
    else:
        raise ClassificationError(
            "cannot tell whether '{}' is of class II or III on the probe range "
            "(drift of f / x^{} is {:.3g}, non-polynomial degree {:.4f}); declare its "
            "profile instead".format(f, d, drift, d, c_f),
            "ambiguous",
        )
    return profile.replace(poly_part=polynomial_part(f, profile))


def _fit_polynomial(f: FunctionExpr, k: int, first: int) -> list:
    # scaled Vandermonde fit of degree k at base * (first, ..., first + k)
    base = 10.0 ** min(8, 26 // (k + 1))
    u = [first + i for i in range(k + 1)]
    a = _mp.matrix([[_mp.mpf(ui) ** j for j in range(k + 1)] for ui in u])
    b = _mp.matrix([f.eval(base * ui, "extended") for ui in u])
    beta = _mp.lu_solve(a, b)
    return [beta[j] / _mp.mpf(base) ** j for j in range(k + 1)], base


def polynomial_part(f: FunctionExpr, profile: DegreeProfile) -> np.ndarray:
    """Coefficients of the polynomial part of a class I or III function

    If `f` is syntactically a sum of polynomial terms plus a rest, the exact
    polynomial part (after expanding the shift) is returned. Otherwise the
    coefficients are fit with a scaled Vandermonde system in extended precision at
    two disjoint sets of ``k + 1`` large probes. Constant terms belong to the
    remainder, never to the polynomial part.

    Parameters
    ----------
    f : FunctionExpr
    profile : DegreeProfile
        Of class I or III; ``profile.d_f`` is the degree ``k``

    Returns
    -------
    alpha : numpy.ndarray
        ``alpha[j - 1]`` is the coefficient of ``x ** j`` for ``j = 1, ..., k``

    Raises
    ------
    ValueError
        If `profile` is of class II
    ClassificationError
        With `reason` ``'extraction'`` if fitted coefficients drift by more than
        :obj:`pydrobert.waring.config.COEFFICIENT_DRIFT_TOL` (relative to the
        leading term) between probe sets, or if the remainder is not small next to
        the polynomial part
    """
    if profile.function_class == "II":
        raise ValueError("class II functions have no polynomial part")
    k = profile.d_f
    split = f.polynomial_split()
    if split is not None and len(split[0]) - 1 == k:
        coeffs, rest = split
        alpha = np.array([float(c) for c in coeffs[1:]])
        if rest is not None:
            x = np.asarray(_window_points()[-1:]) + f.shift
            with np.errstate(all="ignore"):
                r = np.abs(rest.eval_double(x))[0]
            _check_remainder(f, r, abs(alpha[-1]) * x[0] ** k)
        return alpha
    first, base = _fit_polynomial(f, k, 1)
    second, _ = _fit_polynomial(f, k, k + 2)
    scale = abs(first[k]) * _mp.mpf(base) ** k
    if not scale:
        raise ClassificationError(
            "fitted leading coefficient of '{}' vanishes".format(f), "extraction"
        )
    drift = max(
        abs(first[j] - second[j]) * _mp.mpf(base) ** j for j in range(1, k + 1)
    ) / scale
    logger.log(9, "polynomial part drift of '%s': %.3g", f, float(drift))
    if drift > config.COEFFICIENT_DRIFT_TOL:
        raise ClassificationError(
            "polynomial part of '{}' did not stabilize across probe sets (relative "
            "drift {:.3g})".format(f, float(drift)),
            "extraction",
        )
    x = base * (2 * k + 2)
    r = f.eval(x, "extended") - _mp.fsum(
        first[j] * _mp.mpf(x) ** j for j in range(1, k + 1)
    )
    _check_remainder(f, abs(float(r)), float(scale) * (2 * k + 2) ** k)
    return np.array([float(first[j]) for j in range(1, k + 1)])


def _check_remainder(f: FunctionExpr, r: float, p: float):
    # the remainder must be o(p) at the largest probe
    if not r < 1e-3 * p:
        raise ClassificationError(
            "remainder of '{}' ({:.3g}) is not small next to its polynomial part "
            "({:.3g})".format(f, r, p),
            "extraction",
        )
