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

"""Hardy-field-style functions

A function is an expression tree of :class:`Node` objects wrapped in a
:class:`FunctionExpr`, which also records the shift :math:`k_0` applied as
:math:`x \\mapsto x + k_0` so that the function is defined on :math:`[1, \\infty)`.
Expressions are written in a prefix notation, e.g.

.. code-block:: none

    add(mul(pi, pow(x, 3)), div(pow(x, 1.4142135623730951), log(log(x)))); shift=2

See :ref:`grammar` for the full grammar. Every node can be evaluated in double
precision (vectorized over :mod:`numpy` arrays), in extended precision (34
significant digits through :mod:`mpmath`), or as a Taylor jet of normalized
derivatives.

Numeric literals and the named constants ``pi`` and ``e`` denote their nearest
double. The extended and exact evaluation paths use that same dyadic value, so
every path evaluates the same function.
"""

import abc
import math
import re

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from pydrobert.waring import AliasedFactory
from pydrobert.waring import config
from pydrobert.waring import DomainError
from pydrobert.waring.util import gauss_legendre

__all__ = [
    "Add",
    "Constant",
    "Div",
    "Exp",
    "FunctionExpr",
    "Jet",
    "Li",
    "li",
    "Log",
    "LogGamma",
    "loggamma",
    "Mul",
    "Neg",
    "Node",
    "polygamma",
    "Pow",
    "Sub",
    "Variable",
]

LI2 = "1.04516378011749278484458888919461313652261557815120157583290914407501320521"
"""li(2), to 75 significant digits"""

NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}

# B_2, B_4, ..., B_20
_BERNOULLI = tuple(
    Fraction(*x)
    for x in (
        (1, 6),
        (-1, 30),
        (1, 42),
        (-1, 30),
        (5, 66),
        (-691, 2730),
        (7, 6),
        (-3617, 510),
        (43867, 798),
        (-174611, 330),
    )
)

_mp = mpmath.MPContext()
_mp.dps = config.EXTENDED_DPS

_LN2 = math.log(2.0)
_LI2_DOUBLE = float(LI2)
_LI_PANEL = 4.0
_LI_ORDER = 20
_STIRLING_MIN = 30.0
_STIRLING_TERMS = 8
_STIRLING_MIN_EXTENDED = 40
_STIRLING_TERMS_EXTENDED = 20
_MAX_POLY_POWER = 64


def _fmt(value: float) -> str:
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def _li_integrand(t: np.ndarray) -> np.ndarray:
    return np.expm1(t) / t


def li(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    r"""Logarithmic integral in double precision, for :math:`x > 1`

    Computed as

    .. math::

        \mathrm{li}(x) = \mathrm{li}(2) + \int_2^x \frac{dt}{\log t}
            = \mathrm{li}(2) + \log\frac{\log x}{\log 2}
              + \int_{\log 2}^{\log x} \frac{e^u - 1}{u} du

    where the last integrand is entire and is integrated with composite
    Gauss-Legendre quadrature on panels of width at most 4.

    Raises
    ------
    DomainError
        If some `x` is not greater than 1
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(x > 1)):
        raise DomainError("li is only defined here for arguments greater than 1")
    u = np.log(x)
    lo, hi = np.minimum(u, _LN2), np.maximum(u, _LN2)
    sign = np.where(u < _LN2, -1.0, 1.0)
    nodes, weights = gauss_legendre(_LI_ORDER)
    total = np.zeros_like(u)
    while np.any(lo < hi):
        top = np.minimum(lo + _LI_PANEL, hi)
        mid, half = (top + lo) / 2, (top - lo) / 2
        t = mid[..., None] + half[..., None] * nodes
        t = np.where(half[..., None] > 0, t, 1.0)
        total += half * (_li_integrand(t) @ weights)
        lo = top
    out = _LI2_DOUBLE + np.log(u / _LN2) + sign * total
    return out if out.ndim else float(out)


def _li_extended(x: mpmath.mpf) -> mpmath.mpf:
    if not x > 1:
        raise DomainError("li is only defined here for arguments greater than 1")
    u, ln2 = _mp.log(x), _mp.ln2
    points = [ln2]
    if u > ln2:
        edge = ln2 + _LI_PANEL
        while edge < u:
            points.append(edge)
            edge += _LI_PANEL
    points.append(u)
    integral = _mp.quad(lambda t: _mp.expm1(t) / t, points, method="gauss-legendre")
    return _mp.mpf(LI2) + _mp.log(u / ln2) + integral


def loggamma(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    r"""Log-gamma function in double precision, for :math:`x > 0`

    Arguments are pushed above 30 with :math:`\log\Gamma(x) = \log\Gamma(x + m) -
    \sum_{i < m} \log(x + i)`, then evaluated with 8 correction terms of the
    Stirling series

    .. math::

        \log\Gamma(z) \approx (z - 1/2)\log z - z + \frac{1}{2}\log 2\pi
            + \sum_k \frac{B_{2k}}{2k(2k - 1)z^{2k - 1}}

    Raises
    ------
    DomainError
        If some `x` is non-positive
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(~(x > 0)):
        raise DomainError("loggamma is only defined for positive arguments")
    steps = np.maximum(0.0, np.ceil(_STIRLING_MIN - x))
    correction = np.zeros_like(x)
    for i in range(int(steps.max()) if x.size else 0):
        correction += np.where(i < steps, np.log(x + i), 0.0)
    z = x + steps
    inv, inv2 = 1 / z, 1 / (z * z)
    series = np.zeros_like(z)
    for k in range(_STIRLING_TERMS, 0, -1):
        b = _BERNOULLI[k - 1]
        series = series * inv2 + float(b) / ((2 * k) * (2 * k - 1))
    series *= inv
    out = (z - 0.5) * np.log(z) - z + 0.5 * math.log(2 * math.pi) + series
    out = out - correction
    return out if out.ndim else float(out)


def _loggamma_extended(x: mpmath.mpf) -> mpmath.mpf:
    if not x > 0:
        raise DomainError("loggamma is only defined for positive arguments")
    correction = _mp.mpf(0)
    while x < _STIRLING_MIN_EXTENDED:
        correction += _mp.log(x)
        x += 1
    inv2, power = 1 / (x * x), 1 / x
    series = _mp.mpf(0)
    for k in range(1, _STIRLING_TERMS_EXTENDED + 1):
        series += _mp.bernoulli(2 * k) / ((2 * k) * (2 * k - 1)) * power
        power *= inv2
    return (
        (x - _mp.mpf(0.5)) * _mp.log(x)
        - x
        + _mp.log(2 * _mp.pi) / 2
        + series
        - correction
    )


def polygamma(m: int, x: float) -> float:
    r"""The polygamma function :math:`\psi^{(m)}(x)` for :math:`x > 0`

    The argument is raised with :math:`\psi^{(m)}(x) = \psi^{(m)}(x + 1) -
    (-1)^m m! x^{-m-1}` until it is large enough for the asymptotic series,
    truncated after :math:`B_{20}`.
    """
    if not x > 0:
        raise DomainError("polygamma is only defined for positive arguments")
    x, correction = float(x), 0.0
    sign_m, fact_m = (-1.0) ** m, float(math.factorial(m))
    while x < _STIRLING_MIN + m:
        correction -= sign_m * fact_m / x ** (m + 1)
        x += 1.0
    if m == 0:
        series = math.log(x) - 0.5 / x
        for k, b in enumerate(_BERNOULLI, 1):
            series -= float(b) / (2 * k * x ** (2 * k))
    else:
        series = math.factorial(m - 1) / x ** m + fact_m / (2 * x ** (m + 1))
        for k, b in enumerate(_BERNOULLI, 1):
            series += (
                float(b)
                * math.factorial(2 * k + m - 1)
                / math.factorial(2 * k)
                / x ** (2 * k + m)
            )
        series *= -sign_m
    return series + correction


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)[: len(a)]


def _jet_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if b[0] == 0:
        raise DomainError("division by zero")
    c = np.empty_like(a)
    for n in range(len(a)):
        c[n] = (a[n] - np.dot(b[1 : n + 1], c[:n][::-1])) / b[0]
    return c


def _jet_exp(a: np.ndarray) -> np.ndarray:
    e = np.empty_like(a)
    e[0] = math.exp(a[0])
    i = np.arange(len(a), dtype=np.float64)
    for n in range(1, len(a)):
        e[n] = np.dot(i[1 : n + 1] * a[1 : n + 1], e[:n][::-1]) / n
    return e


def _jet_log(a: np.ndarray) -> np.ndarray:
    if not a[0] > 0:
        raise DomainError("log of a non-positive value {}".format(a[0]))
    out = np.empty_like(a)
    out[0] = math.log(a[0])
    i = np.arange(len(a), dtype=np.float64)
    for n in range(1, len(a)):
        carry = np.dot(i[1:n] * out[1:n], a[1:n][::-1]) if n > 1 else 0.0
        out[n] = (a[n] - carry / n) / a[0]
    return out


def _jet_pow(a: np.ndarray, p: float) -> np.ndarray:
    if float(p).is_integer() and abs(p) <= _MAX_POLY_POWER:
        p = int(p)
        y = np.zeros_like(a)
        y[0] = 1.0
        for _ in range(abs(p)):
            y = _jet_mul(y, a)
        if p < 0:
            one = np.zeros_like(a)
            one[0] = 1.0
            y = _jet_div(one, y)
        return y
    if not a[0] > 0:
        raise DomainError(
            "non-integer power {} of a non-positive value {}".format(p, a[0])
        )
    y = np.empty_like(a)
    y[0] = a[0] ** p
    i = np.arange(len(a), dtype=np.float64)
    for n in range(1, len(a)):
        coef = (p + 1) * i[1 : n + 1] - n
        y[n] = np.dot(coef * a[1 : n + 1], y[:n][::-1]) / (n * a[0])
    return y


def _jet_compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    # sum_m outer[m] * (inner - inner[0]) ** m, outer holding normalized derivatives
    delta = inner.copy()
    delta[0] = 0.0
    out = np.zeros_like(inner)
    out[0] = outer[0]
    power = np.zeros_like(inner)
    power[0] = 1.0
    for m in range(1, len(inner)):
        power = _jet_mul(power, delta)
        out += outer[m] * power
    return out


def _poly_mul(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: List[Fraction], b: List[Fraction], sign: int = 1) -> List[Fraction]:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] += sign * y
    return out


def _poly_trim(a: List[Fraction]) -> List[Fraction]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _check_double(node: "Node", out: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(out)):
        raise DomainError(
            "{} did not evaluate to a finite real (is the shift large enough?)".format(
                node
            )
        )
    return out


def _check_extended(node: "Node", out) -> mpmath.mpf:
    if isinstance(out, _mp.mpc) or not _mp.isfinite(out):
        raise DomainError(
            "{} did not evaluate to a finite real (is the shift large enough?)".format(
                node
            )
        )
    return out


class Node(AliasedFactory):
    """A node in a function's expression tree

    Nodes are immutable. Their arguments are child nodes and, for some kinds, real
    numbers. Subclasses are built by name with :func:`Node.from_alias`, the name
    being the node's name in the prefix notation.
    """

    signature = ""
    """Argument kinds, in order: ``'e'`` an expression, ``'n'`` a number, ``'+'``
    one or more further expressions"""

    children = tuple()

    @abc.abstractmethod
    def eval_double(self, t: np.ndarray) -> np.ndarray:
        """Evaluate at (already shifted) points `t` in double precision"""
        pass

    @abc.abstractmethod
    def eval_extended(self, t: mpmath.mpf) -> mpmath.mpf:
        """Evaluate at an (already shifted) point `t` with :mod:`mpmath`"""
        pass

    @abc.abstractmethod
    def jet(self, t: np.ndarray) -> np.ndarray:
        """Normalized Taylor coefficients given those of the variable, `t`

        Entry ``j`` of the return value is the ``j``-th derivative divided by
        ``j!``.
        """
        pass

    def as_polynomial(self) -> Optional[List[Fraction]]:
        """Exact polynomial coefficients in the (shifted) variable, if syntactically
        a polynomial, otherwise :obj:`None`"""
        return None

    _name = None

    @property
    def name(self) -> str:
        """The name used in the prefix notation"""
        return self._name or next(iter(self.aliases))

    def __str__(self) -> str:
        return "{}({})".format(self.name, ", ".join(str(c) for c in self.children))

    def __repr__(self) -> str:
        return "Node({!r})".format(str(self))

    def __eq__(self, other) -> bool:
        return isinstance(other, Node) and str(self) == str(other)

    def __hash__(self) -> int:
        return hash(str(self))


class Constant(Node):
    """A real constant

    Parameters
    ----------
    value : float
    label : str, optional
        The name of a named constant (``'pi'`` or ``'e'``), used when printing
    """

    aliases = {"const"}
    signature = "n"

    def __init__(self, value: float, label: Optional[str] = None):
        self.value = float(value)
        if not math.isfinite(self.value):
            raise ValueError("constants must be finite")
        self.label = label

    def eval_double(self, t):
        return np.full_like(t, self.value)

    def eval_extended(self, t):
        return _mp.mpf(self.value)

    def jet(self, t):
        out = np.zeros_like(t)
        out[0] = self.value
        return out

    def as_polynomial(self):
        return [Fraction(self.value)]

    def __str__(self):
        if self.label is not None:
            return self.label
        return "const({})".format(_fmt(self.value))


class Variable(Node):
    """The (shifted) variable x"""

    aliases = {"x"}

    def eval_double(self, t):
        return t

    def eval_extended(self, t):
        return t

    def jet(self, t):
        return t.copy()

    def as_polynomial(self):
        return [Fraction(0), Fraction(1)]

    def __str__(self):
        return "x"


class _Unary(Node):
    signature = "e"

    def __init__(self, child: Node):
        self.children = (child,)

    @property
    def child(self) -> Node:
        return self.children[0]


class _Binary(Node):
    signature = "ee"

    def __init__(self, left: Node, right: Node):
        self.children = (left, right)


class Add(Node):
    """Sum of two or more expressions"""

    aliases = {"add"}
    signature = "e+"

    def __init__(self, *children: Node):
        if len(children) < 2:
            raise ValueError("add takes at least two arguments")
        self.children = tuple(children)

    def eval_double(self, t):
        out = self.children[0].eval_double(t)
        for child in self.children[1:]:
            out = out + child.eval_double(t)
        return _check_double(self, out)

    def eval_extended(self, t):
        return _check_extended(
            self, _mp.fsum(c.eval_extended(t) for c in self.children)
        )

    def jet(self, t):
        return sum(c.jet(t) for c in self.children)

    def as_polynomial(self):
        polys = [c.as_polynomial() for c in self.children]
        if any(p is None for p in polys):
            return None
        out = polys[0]
        for p in polys[1:]:
            out = _poly_add(out, p)
        return _poly_trim(out)


class Sub(_Binary):
    """Difference of two expressions"""

    aliases = {"sub"}

    def eval_double(self, t):
        left, right = self.children
        return _check_double(self, left.eval_double(t) - right.eval_double(t))

    def eval_extended(self, t):
        left, right = self.children
        return left.eval_extended(t) - right.eval_extended(t)

    def jet(self, t):
        left, right = self.children
        return left.jet(t) - right.jet(t)

    def as_polynomial(self):
        left, right = (c.as_polynomial() for c in self.children)
        if left is None or right is None:
            return None
        return _poly_trim(_poly_add(left, right, -1))


class Neg(_Unary):
    """Negation"""

    aliases = {"neg"}

    def eval_double(self, t):
        return -self.child.eval_double(t)

    def eval_extended(self, t):
        return -self.child.eval_extended(t)

    def jet(self, t):
        return -self.child.jet(t)

    def as_polynomial(self):
        p = self.child.as_polynomial()
        return None if p is None else [-x for x in p]


class Mul(Node):
    """Product of two or more expressions"""

    aliases = {"mul"}
    signature = "e+"

    def __init__(self, *children: Node):
        if len(children) < 2:
            raise ValueError("mul takes at least two arguments")
        self.children = tuple(children)

    def eval_double(self, t):
        out = self.children[0].eval_double(t)
        for child in self.children[1:]:
            out = out * child.eval_double(t)
        return _check_double(self, out)

    def eval_extended(self, t):
        out = self.children[0].eval_extended(t)
        for child in self.children[1:]:
            out *= child.eval_extended(t)
        return _check_extended(self, out)

    def jet(self, t):
        out = self.children[0].jet(t)
        for child in self.children[1:]:
            out = _jet_mul(out, child.jet(t))
        return out

    def as_polynomial(self):
        polys = [c.as_polynomial() for c in self.children]
        if any(p is None for p in polys):
            return None
        out = polys[0]
        for p in polys[1:]:
            out = _poly_mul(out, p)
        return _poly_trim(out)


class Div(_Binary):
    """Quotient of two expressions"""

    aliases = {"div"}

    def eval_double(self, t):
        num, den = (c.eval_double(t) for c in self.children)
        if np.any(den == 0):
            raise DomainError("{} divides by zero".format(self))
        return _check_double(self, num / den)

    def eval_extended(self, t):
        num, den = (c.eval_extended(t) for c in self.children)
        if not den:
            raise DomainError("{} divides by zero".format(self))
        return _check_extended(self, num / den)

    def jet(self, t):
        num, den = (c.jet(t) for c in self.children)
        return _jet_div(num, den)

    def as_polynomial(self):
        num, den = (c.as_polynomial() for c in self.children)
        if num is None or den is None or len(den) != 1 or den[0] == 0:
            return None
        return [x / den[0] for x in num]


class Pow(Node):
    """An expression raised to a real exponent

    Parameters
    ----------
    base : Node
    exponent : float
    """

    aliases = {"pow"}
    signature = "en"

    def __init__(self, base: Node, exponent: float):
        self.exponent = float(exponent)
        if not math.isfinite(self.exponent):
            raise ValueError("power exponents must be finite")
        self.children = (base,)

    @property
    def integral(self) -> bool:
        return self.exponent.is_integer()

    def eval_double(self, t):
        base = self.children[0].eval_double(t)
        if not self.integral and np.any(base < 0):
            raise DomainError(
                "{} raises a negative value to a non-integer power".format(self)
            )
        if self.exponent <= 0 and np.any(base == 0):
            raise DomainError("{} raises zero to a non-positive power".format(self))
        return _check_double(self, np.power(base, self.exponent))

    def eval_extended(self, t):
        base = self.children[0].eval_extended(t)
        if self.integral:
            if self.exponent <= 0 and not base:
                raise DomainError("{} raises zero to a non-positive power".format(self))
            return _check_extended(self, base ** int(self.exponent))
        if base < 0 or (self.exponent <= 0 and not base):
            raise DomainError("{} is outside its domain".format(self))
        return _check_extended(self, base ** _mp.mpf(self.exponent))

    def jet(self, t):
        return _jet_pow(self.children[0].jet(t), self.exponent)

    def as_polynomial(self):
        if not self.integral or not 0 <= self.exponent <= _MAX_POLY_POWER:
            return None
        base = self.children[0].as_polynomial()
        if base is None:
            return None
        out = [Fraction(1)]
        for _ in range(int(self.exponent)):
            out = _poly_mul(out, base)
        return _poly_trim(out)

    def __str__(self):
        return "pow({}, {})".format(self.children[0], _fmt(self.exponent))


class Log(_Unary):
    """Natural logarithm"""

    aliases = {"log"}

    def eval_double(self, t):
        arg = self.child.eval_double(t)
        if np.any(~(arg > 0)):
            raise DomainError(
                "{} takes the log of a non-positive value (is the shift large "
                "enough?)".format(self)
            )
        return np.log(arg)

    def eval_extended(self, t):
        arg = self.child.eval_extended(t)
        if not arg > 0:
            raise DomainError("{} takes the log of a non-positive value".format(self))
        return _mp.log(arg)

    def jet(self, t):
        return _jet_log(self.child.jet(t))


class Exp(_Unary):
    """Exponential function"""

    aliases = {"exp"}

    def eval_double(self, t):
        return _check_double(self, np.exp(self.child.eval_double(t)))

    def eval_extended(self, t):
        return _check_extended(self, _mp.exp(self.child.eval_extended(t)))

    def jet(self, t):
        return _check_double(self, _jet_exp(self.child.jet(t)))


class Li(_Unary):
    """Logarithmic integral, normalized so that li(2) is the principal value"""

    aliases = {"li"}

    def eval_double(self, t):
        try:
            return np.asarray(li(self.child.eval_double(t)))
        except DomainError as e:
            raise DomainError("{}: {}".format(self, e))

    def eval_extended(self, t):
        return _li_extended(self.child.eval_extended(t))

    def jet(self, t):
        a = self.child.jet(t)
        if not a[0] > 1:
            raise DomainError("{}: argument must be greater than 1".format(self))
        # li' = 1 / log, so expand 1 / log(u) about u = a[0] and integrate
        u = np.zeros_like(a)
        u[0] = a[0]
        if len(u) > 1:
            u[1] = 1.0
        one = np.zeros_like(a)
        one[0] = 1.0
        inv_log = _jet_div(one, _jet_log(u))
        outer = np.empty_like(a)
        outer[0] = li(a[0])
        outer[1:] = inv_log[:-1] / np.arange(1, len(a))
        return _jet_compose(outer, a)


class LogGamma(_Unary):
    """Logarithm of the gamma function"""

    aliases = {"loggamma", "logGamma", "lgamma"}
    _name = "loggamma"

    def eval_double(self, t):
        try:
            return np.asarray(loggamma(self.child.eval_double(t)))
        except DomainError as e:
            raise DomainError("{}: {}".format(self, e))

    def eval_extended(self, t):
        return _loggamma_extended(self.child.eval_extended(t))

    def jet(self, t):
        a = self.child.jet(t)
        if not a[0] > 0:
            raise DomainError("{}: argument must be positive".format(self))
        outer = np.empty_like(a)
        outer[0] = loggamma(a[0])
        for m in range(1, len(a)):
            outer[m] = polygamma(m - 1, a[0]) / math.factorial(m)
        return _jet_compose(outer, a)


class Jet(object):
    """Derivatives of a function at a point

    Parameters
    ----------
    x : float
        The (unshifted) base point
    derivatives : array-like
        ``derivatives[j]`` is the ``j``-th derivative of the function at `x`

    Attributes
    ----------
    x : float
    order : int
    derivatives : numpy.ndarray
    """

    def __init__(self, x: float, derivatives: np.ndarray):
        self.x = float(x)
        self.derivatives = np.asarray(derivatives, dtype=np.float64)
        self.order = len(self.derivatives) - 1

    @property
    def coefficients(self) -> np.ndarray:
        """Taylor coefficients, ``derivatives[j] / j!``"""
        fact = np.array([math.factorial(j) for j in range(self.order + 1)], float)
        return self.derivatives / fact

    def taylor(self, h: float, order: Optional[int] = None) -> float:
        """Value of the Taylor polynomial at ``x + h``, truncated after `order`"""
        coeffs = self.coefficients[: (self.order if order is None else order) + 1]
        return float(np.polyval(coeffs[::-1], h))

    def __len__(self) -> int:
        return self.order + 1

    def __getitem__(self, j):
        return self.derivatives[j]

    def __iter__(self):
        return iter(self.derivatives)

    def __repr__(self) -> str:
        return "Jet(x={!r}, derivatives={!r})".format(self.x, self.derivatives.tolist())


_TOKENS = re.compile(
    r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),;=])|(?P<bad>\S))"
)


class _Parser(object):
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        for match in _TOKENS.finditer(text):
            kind = match.lastgroup
            if kind is None:
                continue
            if kind == "bad":
                self.error("unexpected character", match.start(kind))
            self.tokens.append((kind, match.group(kind), match.start(kind)))
        self.idx = 0

    def error(self, msg: str, pos: Optional[int] = None):
        if pos is None:
            pos = self.tokens[self.idx][2] if self.idx < len(self.tokens) else len(
                self.text
            )
        raise ValueError(
            "Could not parse function '{}': {} at position {}".format(
                self.text, msg, pos
            )
        )

    def peek(self) -> Tuple[str, str, int]:
        if self.idx < len(self.tokens):
            return self.tokens[self.idx]
        return ("end", "", len(self.text))

    def next(self) -> Tuple[str, str, int]:
        token = self.peek()
        if token[0] == "end":
            self.error("unexpected end of input")
        self.idx += 1
        return token

    def expect(self, punct: str):
        kind, value, pos = self.next()
        if value != punct:
            self.error("expected '{}', got '{}'".format(punct, value), pos)

    def number(self) -> Tuple[float, Optional[str]]:
        kind, value, pos = self.next()
        if kind == "num":
            return float(value), None
        if kind == "name" and value in NAMED_CONSTANTS:
            return NAMED_CONSTANTS[value], value
        if kind == "name" and value == "const":
            self.expect("(")
            number = self.number()
            self.expect(")")
            return number
        self.error("expected a number, got '{}'".format(value), pos)

    def expr(self) -> Node:
        kind, value, pos = self.next()
        if kind == "num":
            return Constant(float(value))
        if kind != "name":
            self.error("expected an expression, got '{}'".format(value), pos)
        if value in NAMED_CONSTANTS:
            return Constant(NAMED_CONSTANTS[value], value)
        if value == "x":
            return Variable()
        try:
            cls = Node.subclass_from_alias(value)
        except ValueError:
            self.error("unknown function '{}'".format(value), pos)
        self.expect("(")
        args = []
        for i, arg_kind in enumerate(cls.signature):
            if i:
                self.expect(",")
            if arg_kind == "n":
                args.extend(self.number() if cls is Constant else self.number()[:1])
            elif arg_kind == "e":
                args.append(self.expr())
            else:
                args.append(self.expr())
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self.expr())
        self.expect(")")
        try:
            return cls(*args)
        except ValueError as e:
            self.error(str(e), pos)

    def function(self) -> Tuple[Node, Optional[float]]:
        root, shift = self.expr(), None
        if self.peek()[1] == ";":
            self.next()
            kind, value, pos = self.next()
            if value != "shift":
                self.error("expected 'shift', got '{}'".format(value), pos)
            self.expect("=")
            shift = self.number()[0]
        kind, value, pos = self.peek()
        if kind != "end":
            self.error("trailing input '{}'".format(value), pos)
        return root, shift


def _probe(root: Node, shift: float) -> bool:
    t = np.asarray(config.PROBE_POINTS, dtype=np.float64) + shift
    try:
        with np.errstate(all="ignore"):
            out = root.eval_double(t)
    except DomainError:
        return False
    return bool(np.all(np.isfinite(out)))


class FunctionExpr(object):
    """A function of one variable, defined on :math:`[1, \\infty)`

    Parameters
    ----------
    root : Node
        The expression tree
    shift : float or None, optional
        The non-negative shift :math:`k_0`, so that ``f(x) = root(x + k0)``. If
        unset, the smallest integer in ``0, ..., config.MAX_SHIFT`` for which the
        expression evaluates to a finite real at every point of
        :obj:`pydrobert.waring.config.PROBE_POINTS` is used.

    Attributes
    ----------
    root : Node
    shift : float
    shift_declared : bool
        Whether `shift` was given rather than chosen

    Raises
    ------
    DomainError
        If the expression fails to evaluate at a probe point with the given shift,
        or with every candidate shift
    """

    def __init__(self, root: Node, shift: Optional[float] = None):
        self.root = root
        self.shift_declared = shift is not None
        if shift is None:
            for k in range(config.MAX_SHIFT + 1):
                if _probe(root, float(k)):
                    shift = float(k)
                    break
            else:
                raise DomainError(
                    "'{}' is not defined at every probe point for any shift in "
                    "0..{}".format(root, config.MAX_SHIFT)
                )
        else:
            shift = float(shift)
            if not (math.isfinite(shift) and shift >= 0):
                raise ValueError("shift must be finite and non-negative")
            if not _probe(root, shift):
                raise DomainError(
                    "'{}' is not defined at every probe point {} with shift {}".format(
                        root, config.PROBE_POINTS, _fmt(shift)
                    )
                )
        self.shift = shift
        self._split = self._polynomial_split()

    @classmethod
    def parse(cls, text: str, shift: Optional[float] = None) -> "FunctionExpr":
        """Build a function from its prefix notation

        A shift in `text` (``...; shift=2``) and the `shift` argument are mutually
        exclusive.

        Raises
        ------
        ValueError
            On a syntax error
        DomainError
            If the shift is too small
        """
        root, text_shift = _Parser(text).function()
        if text_shift is not None and shift is not None:
            raise ValueError("shift specified twice")
        return cls(root, text_shift if shift is None else shift)

    def eval(self, x, precision: str = "double"):
        """Evaluate ``f(x) = root(x + shift)``

        Parameters
        ----------
        x : float or array-like
            Points no less than 1
        precision : {'double', 'extended'}, optional
            ``'double'`` is vectorized over `x` and returns floats.
            ``'extended'`` returns :class:`mpmath.mpf` values carrying
            :obj:`pydrobert.waring.config.EXTENDED_DPS` digits (an object array
            when `x` is an array).

        Raises
        ------
        DomainError
            If some `x` is less than 1 or some subexpression is evaluated outside
            its domain
        """
        if precision == "double":
            x = np.asarray(x, dtype=np.float64)
            if np.any(~(x >= 1)):
                raise DomainError("functions are only evaluated at x >= 1")
            with np.errstate(all="ignore"):
                out = _check_double(self.root, self.root.eval_double(x + self.shift))
            return out if out.ndim else float(out)
        elif precision == "extended":
            if np.ndim(x):
                return np.array(
                    [self.eval(y, "extended") for y in np.ravel(x)], dtype=object
                ).reshape(np.shape(x))
            if isinstance(x, np.generic):
                x = x.item()
            if not x >= 1:
                raise DomainError("functions are only evaluated at x >= 1")
            t = _mp.mpf(x) + _mp.mpf(self.shift)
            return _check_extended(self.root, self.root.eval_extended(t))
        raise ValueError("precision must be 'double' or 'extended'")

    def eval_jet(self, x: float, k: int) -> Jet:
        """Derivatives up to order `k` by Taylor-mode automatic differentiation

        Raises
        ------
        DomainError
            If ``k`` is outside ``0..config.MAX_JET_ORDER``, `x` is less than 1, or
            a subexpression is evaluated outside its domain
        """
        if not 0 <= k <= config.MAX_JET_ORDER:
            raise DomainError(
                "jet order {} is outside 0..{}".format(k, config.MAX_JET_ORDER)
            )
        x = float(x)
        if not x >= 1:
            raise DomainError("functions are only evaluated at x >= 1")
        t = np.zeros(k + 1)
        t[0] = x + self.shift
        if k:
            t[1] = 1.0
        with np.errstate(all="ignore"):
            coeffs = _check_double(self.root, self.root.jet(t))
        fact = np.array([math.factorial(j) for j in range(k + 1)], dtype=np.float64)
        return Jet(x, coeffs * fact)

    def is_increasing(
        self, x0: float, probes: Optional[Sequence[float]] = None
    ) -> bool:
        """Whether the first derivative is positive at every probe no less than `x0`

        By default the probes are 25 log-spaced points in ``[x0, 1e6 x0]``.
        """
        if probes is None:
            probes = x0 * np.geomspace(1.0, 1e6, 25)
        for x in probes:
            if x < x0:
                continue
            try:
                if not self.eval_jet(x, 1)[1] > 0:
                    return False
            except DomainError:
                return False
        return True

    def _polynomial_split(self):
        terms = []

        def _collect(node, sign):
            if isinstance(node, Add):
                for child in node.children:
                    _collect(child, sign)
            elif isinstance(node, Sub):
                _collect(node.children[0], sign)
                _collect(node.children[1], -sign)
            elif isinstance(node, Neg):
                _collect(node.child, -sign)
            else:
                terms.append((node, sign))

        _collect(self.root, 1)
        poly, rest, found = [Fraction(0)], [], False
        for node, sign in terms:
            p = node.as_polynomial()
            if p is None:
                rest.append(node if sign > 0 else Neg(node))
            else:
                poly, found = _poly_add(poly, p, sign), True
        if not found:
            return None
        # expand p(x + k0) in x
        shift = Fraction(self.shift)
        expanded = [Fraction(0)] * len(poly)
        for j, coef in enumerate(poly):
            if coef:
                for i in range(j + 1):
                    expanded[i] += coef * math.comb(j, i) * shift ** (j - i)
        if not rest:
            rest = None
        elif len(rest) == 1:
            rest = rest[0]
        else:
            rest = Add(*rest)
        return _poly_trim(expanded), rest

    def polynomial_split(self) -> Optional[Tuple[List[Fraction], Optional[Node]]]:
        """Split a top-level sum into an exact polynomial part plus the rest

        Returns
        -------
        split : tuple or None
            :obj:`None` if no term of the top-level sum is syntactically a
            polynomial. Otherwise a pair ``(coeffs, rest)``, where ``coeffs[j]`` is
            the exact rational coefficient of ``x ** j`` after the shift has been
            expanded (including the constant ``coeffs[0]``), and ``rest`` is the
            remaining :class:`Node` (evaluated at ``x + shift``) or :obj:`None`
        """
        return self._split

    def __str__(self) -> str:
        if self.shift:
            return "{}; shift={}".format(self.root, _fmt(self.shift))
        return str(self.root)

    def __repr__(self) -> str:
        return "FunctionExpr.parse({!r})".format(str(self))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FunctionExpr)
            and self.root == other.root
            and self.shift == other.shift
        )

    def __hash__(self) -> int:
        return hash((str(self.root), self.shift))
