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

"""Package constants used throughout pydrobert.waring"""

EXTENDED_DPS = 34
"""
Decimal digits carried by "extended" evaluations (through :mod:`mpmath`). 34
digits is a little more than a double-double (106 bits)
"""

PROBE_POINTS = (1.0, 2.0, 10.0, 1e3, 1e6)
"""Points at which an expression must evaluate to a finite real number"""

MAX_SHIFT = 64
"""The largest integer shift tried when choosing a shift automatically"""

MAX_JET_ORDER = 12
"""The highest derivative order :func:`FunctionExpr.eval_jet` will compute"""

JET_FD_TOL = 1e-6
"""Relative tolerance between jets and central finite differences"""

NEAR_INTEGER_TOL = 1e-6
"""
When a double evaluation lies this close to an integer, the value is
re-evaluated in extended precision before taking its floor
"""

AMBIGUOUS_TOL = 1e-25
"""
An extended evaluation strictly this close to (but not on) an integer has an
ambiguous floor. Such entries are flagged and left out of exact counts
"""

SLOPE_STABILITY_TOL = 0.005
"""The last three doubling-window growth slopes must agree pairwise this well"""

DEGREE_ROUND_TOL = 0.01
"""A growth exponent this close to an integer is a candidate polynomial degree"""

SUBPOLYNOMIAL_TOL = 0.05
"""A remainder whose growth exponent is below this is treated as subpolynomial"""

LEADING_STABLE_TOL = 1e-6
"""Relative drift of ``f(x) / x^d`` under which the leading term is polynomial"""

LEADING_DRIFT_TOL = 1e-2
"""
Relative drift of ``f(x) / x^d`` over which the function is non-polynomial.
Drifts between this and :obj:`LEADING_STABLE_TOL` are ambiguous
"""

COEFFICIENT_DRIFT_TOL = 1e-6
"""Allowed drift of fitted polynomial coefficients between two probe sets"""

MAX_GROWTH_DEGREE = 32.0
"""Growth exponents above this violate the polynomial growth condition"""

MAX_SEQUENCE_COUNT = 10 ** 8
"""The longest sequence window that may be generated"""

MAX_SEQUENCE_VALUE = 2 ** 62
"""Sequence values must stay below this to fit a signed 64-bit integer"""

GCD_PREFIX_CAP = 10 ** 4
"""The longest prefix searched for a gcd-one certificate"""

BITSET_BUDGET = 10 ** 8
"""The largest sumset limit (in bits) a bitmap may track"""

CONVOLUTION_BUDGET = 10 ** 7
"""The largest target a representation-count convolution table may hold"""

PANEL_BUDGET = 10 ** 7
"""The most quadrature panels an oscillatory integral may use"""

DFS_NODE_BUDGET = 10 ** 7
"""The most search nodes a Hilbert-Kamke brute-force search may visit"""

SUM_CHUNK = 2 ** 20
"""Terms per chunk in exponential sums and sequence generation"""
