# pylint: skip-file

import math
import os

import mpmath
import numpy as np
import pytest

import pydrobert.waring.basis as basis

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import CertificateError
from pydrobert.waring import DomainError
from pydrobert.waring.functions import FunctionExpr

SQUARE_PAIRS_TO_50 = {2, 5, 8, 10, 13, 17, 18, 20, 25, 26, 29, 32, 34, 37}
SQUARE_PAIRS_TO_50 |= {40, 41, 45, 50}


def _window(values):
    return basis.SequenceWindow(None, 1, values)


def _naive_sumset(values, s, limit):
    values = set(int(v) for v in values if 0 <= v <= limit)
    level = set(values)
    for _ in range(s - 1):
        level = {b + a for b in level for a in values if b + a <= limit}
    return level


def test_gen_sequence_three_halves(three_halves):
    seq = basis.gen_sequence(three_halves, 1, 5)
    assert seq.values.tolist() == [1, 2, 5, 8, 11]
    assert seq.n.tolist() == [1, 2, 3, 4, 5]
    assert seq.precision_flags[0] and seq.precision_flags[3]
    assert not seq.ambiguous.any()
    assert seq.increasing and seq.monotone


def test_gen_sequence_squares(squares):
    seq = basis.gen_sequence(squares, 1, 5)
    assert seq.values.tolist() == [1, 4, 9, 16, 25]
    assert not seq.precision_flags.any()


def test_gen_sequence_matches_extended():
    f = FunctionExpr.parse("div(pow(x, 2), log(x))")
    seq = basis.gen_sequence(f, 2, 300, chunk=64)
    exp = [int(mpmath.floor(f.eval(n, "extended"))) for n in range(2, 302)]
    assert seq.values.tolist() == exp


@pytest.mark.parametrize("workers", [1, 3])
def test_gen_sequence_workers_agree(three_halves, workers):
    exp = basis.gen_sequence(three_halves, 10, 1000, chunk=1000)
    act = basis.gen_sequence(three_halves, 10, 1000, workers, chunk=37)
    assert np.array_equal(exp.values, act.values)
    assert np.array_equal(exp.precision_flags, act.precision_flags)


def test_gen_sequence_errors(squares):
    with pytest.raises(DomainError):
        basis.gen_sequence(squares, 0, 5)
    with pytest.raises(BudgetExceeded):
        basis.gen_sequence(squares, 1, 10 ** 9)


def test_gen_sequence_upto(squares):
    seq = basis.gen_sequence_upto(squares, 2000)
    assert seq.values[-1] == 44 ** 2
    assert len(seq) == 44


def test_floors_and_fractions(three_halves):
    floors, fracs = basis.floors_and_fractions(three_halves, 1, 100)
    exact = [n ** 1.5 for n in range(1, 101)]
    assert np.allclose(floors + fracs, exact)
    assert np.all((fracs >= 0) & (fracs < 1))


def test_sequence_csv(temp_dir, three_halves):
    path = os.path.join(temp_dir, "seq.csv")
    basis.gen_sequence(three_halves, 1, 3).to_csv(path)
    with open(path, "rb") as file_:
        assert file_.read() == b"n,a_n,flag\r\n1,1,1\r\n2,2,0\r\n3,5,0\r\n"


def test_sumset_of_squares(squares):
    seq = basis.gen_sequence(squares, 1, 31)
    bm = basis.sumset_fold(seq, 2, 50)
    assert set(bm.members().tolist()) == SQUARE_PAIRS_TO_50
    assert bm.level(1).nonzero()[0].tolist() == [1, 4, 9, 16, 25, 36, 49]
    with pytest.raises(ValueError):
        bm.level(3)


@pytest.mark.parametrize("s", [1, 2, 3, 4])
@pytest.mark.parametrize("workers", [1, 4])
def test_sumset_matches_naive(s, workers):
    np.random.seed(s)
    values = np.sort(np.random.choice(np.arange(1, 400), size=30, replace=False))
    bm = basis.sumset_fold(_window(values), s, 2000, workers=workers)
    assert set(bm.members().tolist()) == _naive_sumset(values, s, 2000)
    # the t-fold sumset shifted by the least element lies in the (t+1)-fold one
    for t in range(1, s):
        lower = np.flatnonzero(bm.level(t)) + values[0]
        lower = lower[lower <= 2000]
        assert bm.level(t + 1)[lower].all()


def test_sumset_fft_path():
    f = FunctionExpr.parse("x")
    limit = 200000
    seq = basis.gen_sequence(f, 1, limit)
    assert basis._use_fft(limit, limit)
    bits = basis.sumset_fold(seq, 2, limit).bits
    assert not bits[:2].any()
    assert bits[2:].all()


def test_sumset_errors(squares):
    seq = basis.gen_sequence(squares, 1, 10)
    with pytest.raises(ValueError):
        basis.sumset_fold(seq, 0, 10)
    with pytest.raises(BudgetExceeded):
        basis.sumset_fold(seq, 2, 1000, budget=100)


def test_decompose(squares):
    seq = basis.gen_sequence(squares, 1, 31)
    bm = basis.sumset_fold(seq, 3, 300)
    for m in bm.members():
        parts = bm.decompose(int(m))
        assert len(parts) == 3
        assert sum(parts) == m
        assert all(math.isqrt(p) ** 2 == p for p in parts)
    with pytest.raises(ValueError):
        bm.decompose(4)


def test_bitmap_dump_and_load(temp_dir, squares):
    path = os.path.join(temp_dir, "sumset.bin")
    seq = basis.gen_sequence(squares, 1, 31)
    bm = basis.sumset_fold(seq, 2, 50)
    bm.dump(path)
    loaded = basis.SumsetBitmap.load(path)
    assert loaded.s == 2 and loaded.limit == 50
    assert np.array_equal(loaded.bits, bm.bits)


def test_gap_report():
    bm = basis.sumset_fold(_window([10, 11, 15]), 1, 20)
    report = basis.gap_report(bm, 10, 15)
    assert report.max_gap == 3
    assert report.max_gap_location == 12
    assert report.to_dict() == {
        "window": [10, 15],
        "max_gap": 3,
        "location": 12,
        "histogram": [1, 0, 0, 1],
    }
    with pytest.raises(DomainError):
        basis.gap_report(bm, 0, 5)
    with pytest.raises(ValueError):
        basis.gap_report(bm, 5, 30)


def test_gaps_of_squares(squares):
    seq = basis.gen_sequence_upto(squares, 2000)
    report = basis.gap_report(basis.sumset_fold(seq, 1, 100), 1, 100)
    assert report.max_gap == 18
    assert report.max_gap_location == 82
    report = basis.gap_report(basis.sumset_fold(seq, 5, 2000), 34, 2000)
    assert report.max_gap == 0


def test_gap_stabilization(squares):
    seq = basis.gen_sequence_upto(squares, 4000)
    report = basis.gap_stabilization(seq, 5, 34, 1000, doublings=2)
    assert len(report.reports) == 3
    assert report.stabilized
    assert [r.window for r in report.reports] == [(34, 1000), (34, 2000), (34, 4000)]


def test_basis_order_search(squares):
    seq = basis.gen_sequence_upto(squares, 1000)
    s, reports = basis.basis_order_search(seq, 200, 1000, s_max=6)
    # 4 positive squares miss 224 = 14 * 16 and 512 = 2 * 4 ** 4
    assert s == 5
    assert reports[4].max_gap == 1
    assert set(reports) == {1, 2, 3, 4, 5}
    s, _ = basis.basis_order_search(seq, 200, 1000, s_max=3)
    assert s is None


def test_gcd_bezout_squares(squares):
    cert = basis.gcd_bezout(basis.gen_sequence(squares, 1, 10))
    assert cert.prefix == [1, 4, 9]
    assert cert.coefficients == [3, -1]
    assert cert.k == 3
    assert cert.verify()
    with pytest.raises(ValueError):
        cert.order_bound


def test_gcd_bezout_three_halves(three_halves):
    cert = basis.gcd_bezout(basis.gen_sequence(three_halves, 1, 10))
    assert cert.k == 2
    assert cert.coefficients == [1]


def test_gcd_bezout_failures():
    with pytest.raises(CertificateError) as excinfo:
        basis.gcd_bezout(basis.gen_sequence(FunctionExpr.parse("mul(2, x)"), 1, 10))
    assert excinfo.value.gcd == 2
    with pytest.raises(DomainError):
        basis.gcd_bezout(_window([3, 3, 3]))


@pytest.mark.parametrize("N", [4, 10007, 10050])
def test_represent_squares(squares, N):
    seq = basis.gen_sequence_upto(squares, 10100)
    cert, bm, report = basis.lemma3_certificate(seq, 4, 10100)
    assert cert.M == 4
    assert cert.g == report.max_gap
    parts = basis.represent_lemma3(N, seq, 4, cert, bm)
    assert sum(parts) == N
    assert len(parts) <= cert.order_bound
    assert all(math.isqrt(p) ** 2 == p for p in parts)
    assert cert.to_dict()["order_bound"] == cert.order_bound


def test_represent_three_halves(three_halves):
    seq = basis.gen_sequence_upto(three_halves, 6000)
    cert, bm, _ = basis.lemma3_certificate(seq, 3, 6000)
    parts = basis.represent_lemma3(5000, seq, 3, cert, bm)
    assert sum(parts) == 5000
    assert set(parts) <= set(seq.values.tolist())


def test_represent_below_threshold(squares):
    seq = basis.gen_sequence_upto(squares, 500)
    cert, bm, _ = basis.lemma3_certificate(seq, 4, 500)
    with pytest.raises(DomainError):
        basis.represent_lemma3(5, seq, 4, cert, bm)
    with pytest.raises(DomainError):
        basis.represent_lemma3(10 ** 6, seq, 4, cert, bm)


def test_residue_coverage(squares, three_halves):
    assert basis.residue_coverage(squares, 4, 100) == {0, 1}
    assert basis.residue_coverage(squares, 3, 100) == {0, 1}
    assert basis.residue_coverage(three_halves, 2, 100) == {0, 1}


def test_fractional_density():
    report = basis.fractional_density(
        FunctionExpr.parse("mul(1.4142135623730951, x)"), 1, 10 ** 5, 10
    )
    assert report.counts.sum() == 10 ** 5
    assert report.max_deviation < 0.01
    assert np.allclose(report.bin_centers, np.arange(0.05, 1, 0.1))
    report = basis.fractional_density(FunctionExpr.parse("x"), 1, 1000, 10)
    assert report.counts[0] == 1000
    assert report.max_deviation == 9
    with pytest.raises(ValueError):
        basis.fractional_density(FunctionExpr.parse("x"), 1, 1000, 1)
