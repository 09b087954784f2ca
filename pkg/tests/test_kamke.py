# pylint: skip-file

import itertools
import math

from fractions import Fraction

import numpy as np
import pytest

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import DomainError
from pydrobert.waring import kamke


@pytest.mark.parametrize("k", list(range(1, 11)))
def test_delta0_is_factorial_product(k):
    assert kamke.delta0(k) == math.prod(math.factorial(j) for j in range(1, k + 1))


def test_delta0_values():
    assert kamke.delta0(3) == 12
    assert kamke.delta0(5) == 34560
    with pytest.raises(DomainError):
        kamke.delta0(11)


def test_delta_j_values():
    assert kamke.delta_j(2, 1, [5, 13]) == -6
    assert kamke.delta_j(2, 2, [5, 13]) == 8


@pytest.mark.parametrize("k", [2, 3, 4])
def test_delta_j_of_column_is_delta0(k):
    for j in range(1, k + 1):
        column = [j ** r for r in range(1, k + 1)]
        assert kamke.delta_j(k, j, column) == kamke.delta0(k)


def test_cramer_counts_small_values():
    # 3, 3, 1, 2 takes 1 once, 2 once, 3 twice
    targets = kamke.HKSolution([3, 3, 1, 2]).power_sums(3)
    assert kamke.cramer_solution(3, targets) == [1, 1, 2]
    assert kamke.cramer_solution(2, [5, 13]) == [Fraction(-3), Fraction(4)]


def test_bareiss_det():
    assert kamke.bareiss_det([[2, 0, 1], [1, 3, 2], [1, 1, 2]]) == 6
    assert kamke.bareiss_det([[0, 1], [1, 0]]) == -1
    assert kamke.bareiss_det([[1, 2], [2, 4]]) == 0


def test_check_conditions():
    conditions = kamke.check_conditions(kamke.HKInstance(2, 2, [5, 13]))
    assert conditions.delta0 == 2
    assert conditions.delta_j == [-6, 8]
    assert conditions.congruences_ok == [True, True]
    assert set(conditions.to_dict()) == {
        "ratios_low",
        "ratios_high",
        "delta0",
        "delta_j",
        "congruences_ok",
        "plausible",
    }


@pytest.mark.parametrize(
    "k,s,targets,x_max,exp",
    [
        (2, 2, [5, 13], 3, (3, 2)),
        (2, 2, [4, 10], 3, (3, 1)),
        (2, 2, [4, 12], 3, None),
        (1, 3, [7], 5, (5, 1, 1)),
    ],
)
def test_solve_examples(k, s, targets, x_max, exp):
    inst = kamke.HKInstance(k, s, targets)
    solution = kamke.solve_bruteforce(inst, x_max)
    if exp is None:
        assert solution is None
    else:
        assert solution == exp
        assert solution.solves(inst)


def _oracle(inst, x_max):
    best = None
    for values in itertools.combinations_with_replacement(range(1, x_max + 1), inst.s):
        if kamke.HKSolution(values).power_sums(inst.k) == inst.targets:
            values = tuple(sorted(values, reverse=True))
            best = values if best is None else max(best, values)
    return best


def _instances():
    np.random.seed(3)
    for _ in range(40):
        k = np.random.randint(1, 4)
        s = np.random.randint(1, 5)
        values = np.random.randint(1, 7, size=s).tolist()
        targets = kamke.HKSolution(values).power_sums(k)
        if np.random.rand() < 0.5:
            targets[0] += 1
        yield kamke.HKInstance(k, s, targets)


@pytest.mark.parametrize("inst", list(_instances()), ids=repr)
def test_solve_matches_exhaustive_search(inst):
    x_max = 8
    exp = _oracle(inst, x_max)
    solution = kamke.solve_bruteforce(inst, x_max)
    if exp is None:
        assert solution is None
    else:
        assert solution == exp


def test_solve_workers_agree():
    inst = kamke.HKInstance(3, 5, kamke.HKSolution([9, 7, 4, 4, 1]).power_sums(3))
    assert kamke.solve_bruteforce(inst, 12) == kamke.solve_bruteforce(
        inst, 12, workers=4
    )


def test_solve_budget():
    with pytest.raises(BudgetExceeded):
        kamke.solve_bruteforce(kamke.HKInstance(2, 2, [5, 13]), 3, budget=1)
    with pytest.raises(ValueError):
        kamke.solve_bruteforce(kamke.HKInstance(2, 2, [5, 13]), 0)


@pytest.mark.parametrize(
    "args", [(0, 2, []), (2, 0, [1, 1]), (2, 2, [5]), (2, 2, [5, 0])]
)
def test_invalid_instances(args):
    with pytest.raises(ValueError):
        kamke.HKInstance(*args)


def test_instance_dict():
    inst = kamke.HKInstance(2, 2, [5, 13])
    assert kamke.HKInstance.from_dict(inst.to_dict()) == inst
