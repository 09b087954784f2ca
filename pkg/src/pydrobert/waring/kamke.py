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

r"""Hilbert-Kamke systems

A Hilbert-Kamke system asks for positive integers :math:`x_1, \ldots, x_s` with

.. math::

    x_1^j + x_2^j + \cdots + x_s^j = N_j \qquad j = 1, \ldots, k

For large :math:`s` it is solvable when the targets are in the right proportions
and satisfy the congruences :math:`\Delta_j(N_1, \ldots, N_k) \equiv 0 \pmod
{\Delta_0}`. Here :math:`\Delta_0` is the determinant of the :math:`k \times k`
matrix with entries :math:`c^r` (row :math:`r`, column :math:`c`) and
:math:`\Delta_j` is the same determinant with column :math:`j` replaced by the
targets.

All determinants are computed in exact (Python) integer arithmetic.
"""

import logging
import math

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import config
from pydrobert.waring import DomainError
from pydrobert.waring.util import ordered_map

__all__ = [
    "bareiss_det",
    "check_conditions",
    "cramer_solution",
    "delta0",
    "delta_j",
    "HKConditions",
    "HKInstance",
    "HKSolution",
    "power_matrix",
    "solve_bruteforce",
]

MAX_DELTA_ORDER = 10

logger = logging.getLogger(__name__)


class HKInstance(object):
    """Targets of a Hilbert-Kamke system

    Parameters
    ----------
    k : int
    s : int
    targets : sequence of int
        ``N_1, ..., N_k``
    """

    def __init__(self, k: int, s: int, targets: Sequence[int]):
        k, s, targets = int(k), int(s), [int(n) for n in targets]
        if k < 1 or s < 1:
            raise ValueError("k and s must be positive")
        if len(targets) != k:
            raise ValueError("expected {} targets, got {}".format(k, len(targets)))
        if min(targets) < 1:
            raise ValueError("targets must be positive")
        self.k, self.s, self.targets = k, s, targets

    def to_dict(self) -> dict:
        return {"k": self.k, "s": self.s, "targets": list(self.targets)}

    @classmethod
    def from_dict(cls, dict_: dict) -> "HKInstance":
        return cls(dict_["k"], dict_["s"], dict_["targets"])

    def __eq__(self, other) -> bool:
        return isinstance(other, HKInstance) and self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        return "HKInstance(k={}, s={}, targets={})".format(self.k, self.s, self.targets)


class HKSolution(object):
    """Positive integers solving a Hilbert-Kamke system, in non-increasing order"""

    def __init__(self, values: Sequence[int]):
        self.values = tuple(sorted((int(x) for x in values), reverse=True))
        if self.values and self.values[-1] < 1:
            raise ValueError("solutions are positive")

    def power_sums(self, k: int) -> List[int]:
        return [sum(x ** j for x in self.values) for j in range(1, k + 1)]

    def solves(self, inst: HKInstance) -> bool:
        """Whether every power sum matches exactly"""
        return len(self.values) == inst.s and self.power_sums(inst.k) == inst.targets

    def to_list(self) -> List[int]:
        return list(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other) -> bool:
        if isinstance(other, HKSolution):
            return self.values == other.values
        return self.values == tuple(other)

    def __repr__(self) -> str:
        return "HKSolution({})".format(list(self.values))


def power_matrix(k: int) -> List[List[int]]:
    """The ``k x k`` matrix whose row ``r``, column ``c`` entry is ``c ** r``

    Rows and columns are 1-indexed in the formula
    """
    return [[c ** r for c in range(1, k + 1)] for r in range(1, k + 1)]


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free elimination"""
    a = [[int(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if not n:
        return 1
    sign, prev = 1, 1
    for i in range(n - 1):
        if a[i][i] == 0:
            for r in range(i + 1, n):
                if a[r][i]:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[n - 1][n - 1]


def _check_order(k: int):
    if not 1 <= k <= MAX_DELTA_ORDER:
        raise DomainError("k must lie in 1..{}, got {}".format(MAX_DELTA_ORDER, k))


def delta0(k: int) -> int:
    """The determinant of :func:`power_matrix`, which equals ``1! 2! ... k!``

    Both sides are computed and compared.
    """
    _check_order(k)
    det = bareiss_det(power_matrix(k))
    prod = math.prod(math.factorial(j) for j in range(1, k + 1))
    if det != prod:
        raise RuntimeError(
            "determinant {} disagrees with the factorial product {}".format(det, prod)
        )
    return det


def delta_j(k: int, j: int, targets: Sequence[int]) -> int:
    """The determinant of :func:`power_matrix` with column `j` replaced by `targets`"""
    _check_order(k)
    if not 1 <= j <= k:
        raise ValueError("j must lie in 1..{}".format(k))
    if len(targets) != k:
        raise ValueError("expected {} targets".format(k))
    matrix = power_matrix(k)
    for r, n in enumerate(targets):
        matrix[r][j - 1] = int(n)
    return bareiss_det(matrix)


def cramer_solution(k: int, targets: Sequence[int]) -> List[Fraction]:
    """``Delta_j / Delta_0`` for ``j = 1, ..., k``

    This is the solution ``c`` of ``sum_col c_col col ** r = N_r``: if a solution
    of the system only takes values in ``1..k``, ``c_j`` is how many times it
    takes the value ``j``
    """
    d0 = delta0(k)
    return [Fraction(delta_j(k, j, targets), d0) for j in range(1, k + 1)]


class HKConditions(object):
    """Necessary-looking conditions for a Hilbert-Kamke system to be solvable

    Attributes
    ----------
    ratios_low : list of float
        ``N_j / N_k ** (j / k)``
    ratios_high : list of float
        ``N_j / (s ** (1 - j / k) * N_k ** (j / k))``
    delta0 : int
    delta_j : list of int
    congruences_ok : list of bool
        ``Delta_j % Delta_0 == 0``
    """

    def __init__(self, inst: HKInstance):
        k, s, targets = inst.k, inst.s, inst.targets
        log_nk = math.log(targets[-1])
        self.ratios_low, self.ratios_high = [], []
        for j, n in enumerate(targets, 1):
            scale = math.exp(j / k * log_nk)
            self.ratios_low.append(n / scale)
            self.ratios_high.append(n / (s ** (1 - j / k) * scale))
        self.delta0 = delta0(k)
        self.delta_j = [delta_j(k, j, targets) for j in range(1, k + 1)]
        self.congruences_ok = [d % self.delta0 == 0 for d in self.delta_j]

    @property
    def plausible(self) -> bool:
        """Ratios strictly inside ``(1, 1)`` bounds for ``j < k``, and congruences"""
        return (
            all(r > 1 for r in self.ratios_low[:-1])
            and all(r < 1 for r in self.ratios_high[:-1])
            and all(self.congruences_ok)
        )

    def to_dict(self) -> dict:
        return {
            "ratios_low": self.ratios_low,
            "ratios_high": self.ratios_high,
            "delta0": self.delta0,
            "delta_j": self.delta_j,
            "congruences_ok": self.congruences_ok,
            "plausible": self.plausible,
        }


def check_conditions(inst: HKInstance) -> HKConditions:
    return HKConditions(inst)


def _iroot(n: int, k: int) -> int:
    # largest x with x ** k <= n
    if n < 1:
        return 0
    x = int(round(n ** (1.0 / k))) if n < 2 ** 1000 else 1 << (n.bit_length() // k)
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def _feasible(rest: List[int], r: int, cap: int) -> bool:
    # can r values in [1, cap] have power sums rest?
    if r == 0:
        return not any(rest)
    total = rest[0]
    if cap == 1:
        return all(x == r for x in rest)
    for j, x in enumerate(rest, 1):
        if not r <= x <= r * cap ** j:
            return False
        # power mean and chord (convexity) bounds at fixed sum
        if x * r ** (j - 1) < total ** j:
            return False
        if (x - r) * (cap - 1) > (total - r) * (cap ** j - 1):
            return False
    return True


class _Search(object):
    def __init__(self, k: int, budget: int):
        self.k = k
        self.budget = budget
        self.nodes = 0

    def run(self, rest: List[int], r: int, cap: int, prefix: List[int]):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(
                "search visited more than {} nodes".format(self.budget)
            )
        if r == 0:
            return list(prefix) if not any(rest) else None
        k = self.k
        hi = min(cap, _iroot(rest[-1] - (r - 1), k))
        # smallest x with r * x ** k >= N_k
        lo = max(1, _iroot(rest[-1] // r, k))
        while lo ** k * r < rest[-1]:
            lo += 1
        for x in range(hi, lo - 1, -1):
            nxt = [n - x ** j for j, n in enumerate(rest, 1)]
            if not _feasible(nxt, r - 1, x):
                continue
            prefix.append(x)
            out = self.run(nxt, r - 1, x, prefix)
            prefix.pop()
            if out is not None:
                return out
        return None


def _branch(inst: HKInstance, x1: int, budget: int) -> Tuple[Optional[List[int]], int]:
    k = inst.k
    search = _Search(k, budget)
    rest = [n - x1 ** j for j, n in enumerate(inst.targets, 1)]
    if not _feasible(rest, inst.s - 1, x1):
        return None, 1
    try:
        out = search.run(rest, inst.s - 1, x1, [x1])
    except BudgetExceeded:
        return "budget", search.nodes
    return out, search.nodes


def solve_bruteforce(
    inst: HKInstance,
    x_max: int,
    budget: int = config.DFS_NODE_BUDGET,
    workers: int = 1,
) -> Optional[HKSolution]:
    """Search for a solution with ``x_max >= x_1 >= x_2 >= ... >= x_s >= 1``

    Branches are tried from the largest ``x_1`` down, and within a branch
    depth-first in the same order, so the first solution in lexicographically
    descending order is returned. A branch is pruned as soon as the remaining
    targets cannot be met by the remaining values: each remaining power sum must
    lie between the counts of all-ones and all-maximal values, respect the power
    mean inequality, and lie under the chord of ``x ** j`` for the remaining sum.

    Top-level branches are split over `workers` threads. The result, including
    whether the budget is exceeded, does not depend on `workers`.

    Returns
    -------
    solution : HKSolution or None
        :obj:`None` if the search was exhaustive and found nothing

    Raises
    ------
    BudgetExceeded
        If more than `budget` search nodes are needed before the answer is known
    """
    x_max = int(x_max)
    if x_max < 1:
        raise ValueError("x_max must be positive")
    hi = min(x_max, _iroot(inst.targets[-1] - (inst.s - 1), inst.k))
    candidates = list(range(hi, 0, -1))
    batch = max(workers, 1)
    used = 0
    for i in range(0, len(candidates), batch):
        results = ordered_map(
            lambda x1: _branch(inst, x1, budget), candidates[i : i + batch], workers
        )
        for x1, (out, nodes) in zip(candidates[i : i + batch], results):
            used += nodes
            if out == "budget" or used > budget:
                raise BudgetExceeded(
                    "search for {} needed more than {} nodes".format(inst, budget)
                )
            if out is not None:
                solution = HKSolution(out)
                assert solution.solves(inst)
                logger.log(9, "solved %s with %s after %d nodes", inst, out, used)
                return solution
    logger.log(9, "%s has no solution with x_max=%d (%d nodes)", inst, x_max, used)
    return None
