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

"""Integer sequences ``[f(n)]``, their sumsets, and basis certificates

A set ``A`` of non-negative integers is an asymptotic basis if every large enough
integer is a sum of a bounded number of elements of ``A``. It suffices that some
sumset ``sA`` has bounded gaps and that ``gcd{a_n - a_1} = 1``. This module
measures both on finite windows and makes the argument constructive.
"""

import logging
import math

from collections import OrderedDict
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from pydrobert.waring import BudgetExceeded
from pydrobert.waring import CertificateError
from pydrobert.waring import config
from pydrobert.waring import DomainError
from pydrobert.waring.functions import _check_extended
from pydrobert.waring.functions import _mp
from pydrobert.waring.functions import FunctionExpr
from pydrobert.waring.util import extended_gcd
from pydrobert.waring.util import ordered_map
from pydrobert.waring.util import read_bitmap
from pydrobert.waring.util import solve_increasing
from pydrobert.waring.util import write_bitmap
from pydrobert.waring.util import write_csv
from pydrobert.waring.util import write_json

__all__ = [
    "basis_order_search",
    "BasisCertificate",
    "DensityReport",
    "floors_and_fractions",
    "fractional_density",
    "gap_report",
    "gap_stabilization",
    "GapReport",
    "gcd_bezout",
    "gen_sequence",
    "gen_sequence_upto",
    "lemma3_certificate",
    "represent_lemma3",
    "residue_coverage",
    "SequenceWindow",
    "StabilizationReport",
    "sumset_fold",
    "SumsetBitmap",
]

_WORD = 64
_FFT_MAX_LIMIT = 1 << 24

logger = logging.getLogger(__name__)


class SequenceWindow(object):
    """The values ``[f(n)]`` for ``n = n_start, ..., n_start + len - 1``

    Attributes
    ----------
    f : FunctionExpr
    n_start : int
    values : numpy.ndarray
        64-bit integer floors
    precision_flags : numpy.ndarray
        Boolean. Whether the floor was taken from an extended-precision evaluation
        (because the double-precision value was close to an integer)
    ambiguous : numpy.ndarray
        Boolean. Whether the extended-precision value was still too close to an
        integer to trust its floor. Ambiguous entries are left out of
        :meth:`exact_values`
    increasing : bool
        Whether ``f'`` was positive at every probe on the window. When it is,
        `values` should be non-decreasing
    """

    def __init__(
        self,
        f: FunctionExpr,
        n_start: int,
        values: np.ndarray,
        precision_flags: Optional[np.ndarray] = None,
        ambiguous: Optional[np.ndarray] = None,
        increasing: bool = True,
    ):
        self.f = f
        self.n_start = int(n_start)
        self.values = np.asarray(values, dtype=np.int64)
        if precision_flags is None:
            precision_flags = np.zeros(len(self.values), dtype=bool)
        if ambiguous is None:
            ambiguous = np.zeros(len(self.values), dtype=bool)
        self.precision_flags = np.asarray(precision_flags, dtype=bool)
        self.ambiguous = np.asarray(ambiguous, dtype=bool)
        self.increasing = increasing

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.n_start, self.n_start + len(self.values), dtype=np.int64)

    @property
    def monotone(self) -> bool:
        """Whether `values` are non-decreasing"""
        return bool(np.all(np.diff(self.values) >= 0))

    def exact_values(self) -> np.ndarray:
        """`values` whose floors are not ambiguous"""
        return self.values[~self.ambiguous]

    def to_csv(self, path: str):
        """Write the window as CSV with columns ``n,a_n,flag``

        ``flag`` is 0 for a double-precision floor, 1 for an extended-precision
        floor, and 2 for an ambiguous one
        """
        flags = self.precision_flags.astype(np.int64) + self.ambiguous
        write_csv(path, ("n", "a_n", "flag"), zip(self.n, self.values, flags))

    def __len__(self) -> int:
        return len(self.values)


def _integer_poly(coeffs: Sequence[Fraction]) -> Tuple[List[int], int]:
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // math.gcd(denom, c.denominator)
    return [int(c * denom) for c in coeffs], denom


def _floor_chunk(
    f: FunctionExpr, n: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # floors, fractional parts, extended flags, and ambiguity flags of f at n
    split = f.polynomial_split()
    x = n.astype(np.float64)
    if split is not None:
        coeffs, rest = split
        nums, denom = _integer_poly(coeffs)
        n_max = int(n.max()) if len(n) else 0
        if sum(abs(c) * n_max ** j for j, c in enumerate(nums)) < 2 ** 62:
            n_int = n
        else:
            n_int = n.astype(object)
        acc = np.zeros(len(n), dtype=n_int.dtype)
        for c in reversed(nums):
            acc = acc * n_int + c
        whole = acc // denom
        rem = acc - whole * denom
        if n_int.dtype == object:
            # frac(p) to 53 bits without overflowing a double
            part = ((rem * (1 << 53)) // denom).astype(np.float64) / 2.0 ** 53
        else:
            part = rem.astype(np.float64) / denom
        if rest is None:
            if np.any(np.abs(whole) >= config.MAX_SEQUENCE_VALUE):
                raise DomainError(
                    "[{}] overflows 64-bit integers on the window".format(f)
                )
            whole = whole.astype(np.int64)
            zeros = np.zeros(len(n), dtype=bool)
            return whole, part, zeros, zeros.copy()
        with np.errstate(all="ignore"):
            r = rest.eval_double(x + f.shift)
        if not np.all(np.isfinite(r)):
            raise DomainError("'{}' is not finite on the window".format(f))
        total = part + r
        scale = np.abs(r)
    else:
        whole = None
        total = f.eval(x)
        scale = np.abs(total)
    if np.any(np.abs(total) >= config.MAX_SEQUENCE_VALUE):
        raise DomainError("[{}] overflows 64-bit integers on the window".format(f))
    low = np.floor(total)
    frac = total - low
    tol = np.maximum(config.NEAR_INTEGER_TOL, 64 * np.spacing(scale + 1))
    near = np.minimum(frac, 1 - frac) < tol
    ambiguous = np.zeros(len(n), dtype=bool)
    low = low.astype(np.int64)
    for i in np.flatnonzero(near):
        if whole is None:
            value = f.eval(float(n[i]), "extended")
        else:
            t = _mp.mpf(int(n[i])) + _mp.mpf(f.shift)
            value = _check_extended(rest, rest.eval_extended(t))
            value += _mp.mpf(int(rem[i])) / int(denom)
        fl = _mp.floor(value)
        dist = min(value - fl, fl + 1 - value)
        ambiguous[i] = 0 < dist < config.AMBIGUOUS_TOL
        low[i] = int(fl)
        frac[i] = float(value - fl)
    if whole is not None:
        low = whole + low.astype(whole.dtype)
        if np.any(np.abs(low) >= config.MAX_SEQUENCE_VALUE):
            raise DomainError(
                "[{}] overflows 64-bit integers on the window".format(f)
            )
    for i in np.flatnonzero(near):
        logger.log(9, "re-evaluated f(%d) near an integer", n[i])
    return low.astype(np.int64), frac, near, ambiguous


def _chunks(n_start: int, count: int, chunk: int) -> List[np.ndarray]:
    return [
        np.arange(n_start + i, n_start + min(i + chunk, count), dtype=np.int64)
        for i in range(0, count, chunk)
    ]


def _check_count(n_start: int, count: int):
    if n_start < 1:
        raise DomainError("sequences start at n >= 1")
    if count < 0 or count > config.MAX_SEQUENCE_COUNT:
        raise BudgetExceeded(
            "count must lie in 0..{}, got {}".format(config.MAX_SEQUENCE_COUNT, count)
        )


def gen_sequence(
    f: FunctionExpr,
    n_start: int,
    count: int,
    workers: int = 1,
    chunk: int = config.SUM_CHUNK,
) -> SequenceWindow:
    """Generate ``[f(n)]`` for ``n = n_start, ..., n_start + count - 1``

    Floors are taken so that they are correct beyond double precision: when `f`
    splits syntactically into a polynomial plus a rest, the polynomial is evaluated
    in exact rational arithmetic. When a value lands within
    :obj:`pydrobert.waring.config.NEAR_INTEGER_TOL` of an integer (or its double
    spacing is too coarse to tell), it is re-evaluated in extended precision and
    flagged.

    Parameters
    ----------
    f : FunctionExpr
    n_start : int
    count : int
    workers : int, optional
        Chunks of `chunk` values are evaluated in this many threads. The result
        does not depend on `workers`
    chunk : int, optional

    Returns
    -------
    seq : SequenceWindow

    Raises
    ------
    DomainError
        If `f` cannot be evaluated on the window or a value overflows 64 bits
    BudgetExceeded
        If `count` exceeds :obj:`pydrobert.waring.config.MAX_SEQUENCE_COUNT`
    """
    n_start, count = int(n_start), int(count)
    _check_count(n_start, count)
    parts = ordered_map(
        lambda n: _floor_chunk(f, n), _chunks(n_start, count, chunk), workers
    )
    if parts:
        values, _, flags, ambiguous = (np.concatenate(x) for x in zip(*parts))
    else:
        values = np.zeros(0, dtype=np.int64)
        flags = ambiguous = np.zeros(0, dtype=bool)
    n_end = n_start + max(count - 1, 0)
    increasing = f.is_increasing(n_start, np.geomspace(n_start, n_end, 25))
    seq = SequenceWindow(f, n_start, values, flags, ambiguous, increasing)
    logger.info(
        "generated [%s] for n in [%d, %d]: %d extended floors, %d ambiguous",
        f,
        n_start,
        n_end,
        flags.sum(),
        ambiguous.sum(),
    )
    return seq


def floors_and_fractions(
    f: FunctionExpr, n_start: int, count: int, workers: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    """Floors ``[f(n)]`` and fractional parts ``{f(n)}`` on a window

    The same boundary-safe rules as :func:`gen_sequence` apply. Ambiguous floors
    are kept
    """
    n_start, count = int(n_start), int(count)
    _check_count(n_start, count)
    chunks = _chunks(n_start, count, config.SUM_CHUNK)
    parts = ordered_map(lambda n: _floor_chunk(f, n), chunks, workers)
    if not parts:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return (
        np.concatenate([p[0] for p in parts]),
        np.concatenate([p[1] for p in parts]),
    )


def gen_sequence_upto(f: FunctionExpr, limit: int, workers: int = 1) -> SequenceWindow:
    """Generate ``[f(n)]`` for ``n = 1, 2, ...`` while ``f(n) <= limit + 1``

    `f` must be increasing beyond 1
    """
    n_end = int(math.floor(solve_increasing(lambda x: f.eval(x), limit + 1.0, 1.0)))
    return gen_sequence(f, 1, max(n_end, 1), workers)


def _iter_floors(
    f: FunctionExpr, n_max: int, workers: int
) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    # floors, fracs and ambiguity over n = 1..n_max, a batch of chunks at a time
    _check_count(1, n_max)
    chunks = _chunks(1, n_max, config.SUM_CHUNK)
    batch = max(workers, 1)
    for i in range(0, len(chunks), batch):
        for low, frac, _, ambiguous in ordered_map(
            lambda n: _floor_chunk(f, n), chunks[i : i + batch], workers
        ):
            yield low, frac, ambiguous


class SumsetBitmap(object):
    """Bitset of the ``s``-fold sumset ``sA`` on ``[0, limit]``

    Every fold level ``t = 1, ..., s`` is kept (bit-packed) so that members can be
    decomposed into sums of elements.

    Attributes
    ----------
    s : int
    limit : int
    elements : numpy.ndarray
        The distinct elements of ``A`` in ``[0, limit]``, ascending
    """

    def __init__(self, s: int, limit: int, elements: np.ndarray, levels: List):
        self.s = s
        self.limit = limit
        self.elements = elements
        self._levels = levels
        self._unpacked = dict()

    @property
    def bits(self) -> np.ndarray:
        """Boolean array of length ``limit + 1``: whether ``m`` is in ``sA``"""
        return self.level(self.s)

    def level(self, t: int) -> np.ndarray:
        """The bits of ``tA``, for ``1 <= t <= s``"""
        if not 1 <= t <= self.s:
            raise ValueError("level must be in 1..{}".format(self.s))
        if t not in self._unpacked:
            self._unpacked[t] = _unpack(self._levels[t - 1], self.limit)
        return self._unpacked[t]

    def members(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __contains__(self, m: int) -> bool:
        return 0 <= m <= self.limit and bool(self.bits[m])

    def decompose(self, m: int) -> List[int]:
        """Write a member of ``sA`` as a sum of ``s`` elements

        Walks back through the fold levels, at each taking the smallest element
        ``a`` whose complement ``m - a`` is in the previous level.

        Returns
        -------
        parts : list of int
            Non-increasing, summing to `m`

        Raises
        ------
        ValueError
            If `m` is not a member
        """
        if m not in self:
            raise ValueError("{} is not in the {}-fold sumset".format(m, self.s))
        parts = []
        for t in range(self.s, 1, -1):
            rest = m - self.elements
            ok = rest >= 0
            ok[ok] = self.level(t - 1)[rest[ok]]
            if not ok.any():
                raise RuntimeError("bitmap levels are inconsistent at {}".format(m))
            a = int(self.elements[np.argmax(ok)])
            parts.append(a)
            m -= a
        if not self.level(1)[m]:
            raise RuntimeError("bitmap levels are inconsistent at {}".format(m))
        parts.append(int(m))
        return sorted(parts, reverse=True)

    def dump(self, path: str):
        """Write the bits of ``sA`` with :func:`pydrobert.waring.util.write_bitmap`"""
        write_bitmap(path, self.bits, self.s)

    @classmethod
    def load(cls, path: str) -> "SumsetBitmap":
        """Read a dumped bitmap. Only the last level is available"""
        bits, s = read_bitmap(path)
        levels = [None] * (s - 1) + [_pack(bits)]
        bm = cls(s, len(bits) - 1, np.zeros(0, dtype=np.int64), levels)
        bm._unpacked[s] = bits
        return bm


def _pack(bits: np.ndarray) -> np.ndarray:
    nwords = (len(bits) + _WORD - 1) // _WORD
    padded = np.zeros(nwords * _WORD, dtype=bool)
    padded[: len(bits)] = bits
    return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, limit: int) -> np.ndarray:
    raw = words.astype("<u8").view(np.uint8)
    return np.unpackbits(raw, count=limit + 1, bitorder="little").astype(bool)


def _shift_or(out: np.ndarray, words: np.ndarray, shift: int):
    # out |= words << shift, as one long little-endian bit string
    q, r = divmod(shift, _WORD)
    n = len(words)
    if q >= n:
        return
    if r == 0:
        out[q:] |= words[: n - q]
    else:
        out[q:] |= words[: n - q] << np.uint64(r)
        out[q + 1 :] |= words[: n - q - 1] >> np.uint64(_WORD - r)


def _fold_shift(prev: np.ndarray, elements: np.ndarray, workers: int) -> np.ndarray:
    def _partial(part):
        out = np.zeros_like(prev)
        for a in part:
            _shift_or(out, prev, int(a))
        return out

    parts = np.array_split(elements, max(workers, 1))
    out = np.zeros_like(prev)
    for partial in ordered_map(_partial, parts, workers):
        out |= partial
    return out


def _fold_fft(prev: np.ndarray, indicator: np.ndarray, limit: int) -> np.ndarray:
    size = 1 << (2 * limit + 1).bit_length()
    conv = np.fft.irfft(
        np.fft.rfft(_unpack(prev, limit).astype(np.float64), size)
        * np.fft.rfft(indicator.astype(np.float64), size),
        size,
    )[: limit + 1]
    return _pack(conv > 0.5)


def _use_fft(num_elements: int, limit: int) -> bool:
    if limit > _FFT_MAX_LIMIT:
        return False
    size = 1 << (2 * limit + 1).bit_length()
    return num_elements * (limit // _WORD + 1) > 16 * size * math.log2(size)


def sumset_fold(
    seq: SequenceWindow,
    s: int,
    limit: int,
    budget: int = config.BITSET_BUDGET,
    workers: int = 1,
) -> SumsetBitmap:
    """Compute the ``s``-fold sumset of a sequence on ``[0, limit]``

    ``B_1`` has a bit at every sequence value in ``[0, limit]``, and
    ``B_{t + 1}`` is the OR of ``B_t`` shifted by every value. When there are many
    values, a level is computed instead by thresholding an FFT convolution, whose
    rounding error is far below the threshold, so the result is identical.
    Negative and ambiguous values are ignored.

    Parameters
    ----------
    seq : SequenceWindow
    s : int
    limit : int
    budget : int, optional
        The largest ``limit + 1`` allowed
    workers : int, optional
        Shifts of a level are split over this many threads. The result does not
        depend on `workers`

    Returns
    -------
    bm : SumsetBitmap

    Raises
    ------
    BudgetExceeded
        If ``limit + 1 > budget``
    """
    s, limit = int(s), int(limit)
    if s < 1:
        raise ValueError("s must be positive")
    if limit < 0:
        raise ValueError("limit must be non-negative")
    if limit + 1 > budget:
        raise BudgetExceeded(
            "a bitmap of {} bits exceeds the budget of {}".format(limit + 1, budget)
        )
    values = seq.exact_values()
    elements = np.unique(values[(values >= 0) & (values <= limit)])
    indicator = np.zeros(limit + 1, dtype=bool)
    indicator[elements] = True
    levels = [_pack(indicator)]
    fft = _use_fft(len(elements), limit)
    for t in range(2, s + 1):
        if fft:
            levels.append(_fold_fft(levels[-1], indicator, limit))
        else:
            levels.append(_fold_shift(levels[-1], elements, workers))
        logger.info("folded level %d of %d (limit %d)", t, s, limit)
    return SumsetBitmap(s, limit, elements, levels)


class GapReport(object):
    """Gaps between consecutive members of a sumset on a window

    The gap between consecutive members ``m < m'`` is the number of missing
    integers between them, ``m' - m - 1``.

    Attributes
    ----------
    window : tuple
        ``(lo, hi)``, inclusive
    max_gap : int
    max_gap_location : int
        The first missing integer of the (first) largest gap, or the first member
        if there are no gaps
    gap_histogram : numpy.ndarray
        ``gap_histogram[g]`` counts the gaps of size ``g`` between consecutive
        members (including ``g = 0``)
    first_member : int
    last_member : int
    """

    def __init__(self, window, max_gap, max_gap_location, gap_histogram, first, last):
        self.window = tuple(int(x) for x in window)
        self.max_gap = int(max_gap)
        self.max_gap_location = int(max_gap_location)
        self.gap_histogram = np.asarray(gap_histogram, dtype=np.int64)
        self.first_member = int(first)
        self.last_member = int(last)

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "max_gap": self.max_gap,
            "location": self.max_gap_location,
            "histogram": self.gap_histogram.tolist(),
        }

    def to_json(self, path: str):
        write_json(path, self.to_dict())


def gap_report(bm: SumsetBitmap, lo: int, hi: int) -> GapReport:
    """Measure the gaps of a sumset bitmap on ``[lo, hi]``

    Raises
    ------
    ValueError
        If the window is not inside ``[0, bm.limit]``
    DomainError
        If no member lies in the window
    """
    lo, hi = int(lo), int(hi)
    if not 0 <= lo <= hi <= bm.limit:
        raise ValueError(
            "window [{}, {}] is not inside [0, {}]".format(lo, hi, bm.limit)
        )
    members = np.flatnonzero(bm.bits[lo : hi + 1]) + lo
    if not len(members):
        raise DomainError("no member of the sumset in [{}, {}]".format(lo, hi))
    gaps = np.diff(members) - 1
    if len(gaps):
        i = int(np.argmax(gaps))
        max_gap, location = gaps[i], members[i] + 1
        histogram = np.bincount(gaps)
    else:
        max_gap, location = 0, members[0]
        histogram = np.zeros(0, dtype=np.int64)
    return GapReport((lo, hi), max_gap, location, histogram, members[0], members[-1])


class StabilizationReport(object):
    """Gap reports on a window and its doublings

    Attributes
    ----------
    reports : list of GapReport
        On ``[lo, hi]``, ``[lo, 2 hi]``, ...
    stabilized : bool
        Whether ``max_gap`` is non-increasing across the reports
    """

    def __init__(self, reports: List[GapReport]):
        self.reports = reports
        gaps = [r.max_gap for r in reports]
        self.stabilized = all(b <= a for a, b in zip(gaps, gaps[1:]))

    def to_dict(self) -> dict:
        return {
            "reports": [r.to_dict() for r in self.reports],
            "stabilized": self.stabilized,
        }


def gap_stabilization(
    seq: SequenceWindow,
    s: int,
    lo: int,
    hi: int,
    doublings: int = 2,
    workers: int = 1,
    budget: int = config.BITSET_BUDGET,
) -> StabilizationReport:
    """Check whether the largest gap of ``sA`` settles as the window grows

    The sumset is computed to ``hi * 2 ** doublings``; `seq` should contain every
    value up to there
    """
    limit = int(hi) << doublings
    bm = sumset_fold(seq, s, limit, budget, workers)
    return StabilizationReport(
        [gap_report(bm, lo, int(hi) << i) for i in range(doublings + 1)]
    )


def basis_order_search(
    seq: SequenceWindow,
    lo: int,
    hi: int,
    s_max: int = 8,
    workers: int = 1,
    budget: int = config.BITSET_BUDGET,
) -> Tuple[Optional[int], Dict[int, GapReport]]:
    """Find the least ``s`` for which ``sA`` contains every integer in ``[lo, hi]``

    Levels are folded one at a time up to `s_max`.

    Returns
    -------
    s : int or None
        :obj:`None` if no ``s <= s_max`` works
    reports : dict
        Maps each level tried to its :class:`GapReport`. Levels with no member in
        the window are left out
    """
    reports = OrderedDict()
    bm = sumset_fold(seq, s_max, hi, budget, workers)
    for t in range(1, s_max + 1):
        window = bm.level(t)[lo : hi + 1]
        if window.any():
            sub = SumsetBitmap(t, bm.limit, bm.elements, bm._levels[:t])
            reports[t] = gap_report(sub, lo, hi)
        if window.all():
            return t, reports
    return None, reports


class BasisCertificate(object):
    """Evidence that ``A`` is an asymptotic basis

    Attributes
    ----------
    k : int
        Length of the prefix ``a_1, ..., a_k`` whose differences have gcd 1
    prefix : list of int
    coefficients : list of int
        ``x_2, ..., x_k`` with ``sum_j x_j (a_j - a_1) = 1``
    s : int or None
    g : int or None
        Largest gap of ``sA`` on the measured window
    M : int or None
        Least element of ``sA``
    """

    def __init__(self, prefix: Sequence[int], coefficients: Sequence[int]):
        self.prefix = [int(a) for a in prefix]
        self.coefficients = [int(x) for x in coefficients]
        self.k = len(self.prefix)
        self.s = self.g = self.M = None

    @property
    def order_bound(self) -> int:
        """``s + g * sum_j |x_j|``"""
        if self.s is None or self.g is None:
            raise ValueError("s and g have not been filled in")
        return self.s + self.g * sum(abs(x) for x in self.coefficients)

    def verify(self) -> bool:
        """Check ``sum_j x_j (a_j - a_1) = 1`` in integer arithmetic"""
        a1 = self.prefix[0]
        return (
            sum(x * (a - a1) for x, a in zip(self.coefficients, self.prefix[1:])) == 1
        )

    def fill(self, s: int, report: GapReport):
        """Set `s`, `g` and `M` from a gap report starting at the least member"""
        self.s, self.g, self.M = int(s), report.max_gap, report.first_member

    def to_dict(self) -> dict:
        out = {
            "k": self.k,
            "prefix": self.prefix,
            "coefficients": self.coefficients,
            "s": self.s,
            "g": self.g,
            "M": self.M,
        }
        if self.s is not None and self.g is not None:
            out["order_bound"] = self.order_bound
        return out


def gcd_bezout(
    seq: SequenceWindow, cap: int = config.GCD_PREFIX_CAP
) -> BasisCertificate:
    """Find a Bezout certificate ``sum_j x_j (a_j - a_1) = 1``

    The shortest prefix (of at most `cap` terms) whose differences have gcd 1 is
    found, then the coefficients are accumulated with the extended Euclidean
    algorithm.

    Raises
    ------
    DomainError
        If the window has fewer than two distinct values
    CertificateError
        If the gcd is still larger than 1 after `cap` terms (or the whole window)
    """
    values = [int(v) for v in seq.exact_values()[:cap]]
    if len(set(values)) < 2:
        raise DomainError("need at least two distinct values for a certificate")
    a1, g, coeffs = values[0], 0, []
    for a in values[1:]:
        g, u, v = extended_gcd(g, a - a1)
        coeffs = [u * x for x in coeffs] + [v]
        if g == 1:
            break
    if g != 1:
        raise CertificateError(
            "differences of the first {} terms of [{}] share the factor {}".format(
                len(values), seq.f, g
            ),
            g,
        )
    cert = BasisCertificate(values[: len(coeffs) + 1], coeffs)
    assert cert.verify()
    return cert


def lemma3_certificate(
    seq: SequenceWindow,
    s: int,
    limit: int,
    workers: int = 1,
    budget: int = config.BITSET_BUDGET,
) -> Tuple[BasisCertificate, SumsetBitmap, GapReport]:
    """Build a certificate with ``g`` and ``M`` measured on ``[M, limit]``"""
    cert = gcd_bezout(seq)
    bm = sumset_fold(seq, s, limit, budget, workers)
    members = bm.members()
    if not len(members):
        raise DomainError("the {}-fold sumset is empty below {}".format(s, limit))
    report = gap_report(bm, members[0], limit)
    cert.fill(s, report)
    logger.info(
        "certificate for [%s]: k=%d, g=%d, M=%d, order bound %d",
        seq.f,
        cert.k,
        cert.g,
        cert.M,
        cert.order_bound,
    )
    return cert, bm, report


def represent_lemma3(
    N: int, seq: SequenceWindow, s: int, cert: BasisCertificate, bm: SumsetBitmap
) -> List[int]:
    """Write `N` as a sum of sequence elements by the gap/offset construction

    With ``a_j' = a_j, a_j'' = a_1`` when ``x_j > 0`` and the reverse otherwise,
    ``sum_j |x_j| (a_j' - a_j'') = 1``. Let ``b`` be the largest member of ``sA``
    with ``b <= N - g sum_j |x_j| a_j''`` and ``h`` the difference, so that

    ``N = b + h sum_j |x_j| a_j' + (g - h) sum_j |x_j| a_j''``

    and ``b`` is decomposed through the bitmap. If `N` is itself in ``sA`` but
    below the construction's threshold, its own decomposition is returned.

    Returns
    -------
    parts : list of int
        Non-increasing, summing to `N`, with at most ``cert.order_bound`` parts

    Raises
    ------
    DomainError
        If `N` is below the threshold ``M + g sum_j |x_j| a_j''`` (and not in
        ``sA``), or the bitmap does not reach ``N - g sum_j |x_j| a_j''``
    """
    N = int(N)
    if cert.g is None or cert.M is None:
        raise ValueError("certificate has no gap measurements")
    if bm.s != s:
        raise ValueError("bitmap is {}-fold, not {}-fold".format(bm.s, s))
    a1, g = cert.prefix[0], cert.g
    primes, seconds = [], []
    for x, a in zip(cert.coefficients, cert.prefix[1:]):
        if x > 0:
            primes += [a] * x
            seconds += [a1] * x
        else:
            primes += [a1] * -x
            seconds += [a] * -x
    target = N - g * sum(seconds)
    if target < cert.M:
        if N in bm:
            parts = bm.decompose(N)
        else:
            raise DomainError(
                "{} is below the threshold {} of the construction".format(
                    N, cert.M + g * sum(seconds)
                )
            )
    else:
        if target > bm.limit:
            raise DomainError(
                "the bitmap stops at {} but the construction needs {}".format(
                    bm.limit, target
                )
            )
        below = np.flatnonzero(bm.bits[: target + 1])
        b = int(below[-1])
        h = target - b
        if h > g:
            raise DomainError(
                "a gap of the sumset below {} is wider than g = {}".format(target, g)
            )
        parts = bm.decompose(b) + primes * h + seconds * (g - h)
    parts = sorted((int(p) for p in parts), reverse=True)
    if sum(parts) != N or len(parts) > cert.order_bound:
        raise RuntimeError("construction of {} failed verification".format(N))
    return parts


def residue_coverage(
    f: FunctionExpr, q: int, n_max: int, workers: int = 1
) -> Set[int]:
    """The residues mod `q` attained by ``[f(n)]`` for ``1 <= n <= n_max``

    Ambiguous floors are skipped
    """
    q = int(q)
    if q < 1:
        raise ValueError("q must be positive")
    seen = np.zeros(q, dtype=bool)
    for low, _, ambiguous in _iter_floors(f, n_max, workers):
        seen[np.mod(low[~ambiguous], q)] = True
        if seen.all():
            break
    return set(int(r) for r in np.flatnonzero(seen))


class DensityReport(object):
    """Histogram of fractional parts

    Attributes
    ----------
    counts : numpy.ndarray
    bin_centers : numpy.ndarray
    max_deviation : float
        ``max |counts / expected - 1|`` over bins
    """

    def __init__(self, counts: np.ndarray):
        self.counts = np.asarray(counts, dtype=np.int64)
        bins = len(self.counts)
        self.bin_centers = (np.arange(bins) + 0.5) / bins
        expected = self.counts.sum() / bins
        self.max_deviation = float(np.abs(self.counts / expected - 1).max())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    def to_dict(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "max_deviation": self.max_deviation,
        }


def fractional_density(
    f: FunctionExpr, q: int, n_max: int, bins: int, workers: int = 1
) -> DensityReport:
    """Histogram the fractional parts ``{f(n) / q}`` for ``1 <= n <= n_max``

    ``{f(n) / q} = (([f(n)] mod q) + {f(n)}) / q``, so the histogram inherits the
    exactness of the floors
    """
    q, bins = int(q), int(bins)
    if bins < 2:
        raise ValueError("bins must be at least 2")
    if q < 1:
        raise ValueError("q must be positive")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    counts = np.zeros(bins, dtype=np.int64)
    for low, frac, _ in _iter_floors(f, n_max, workers):
        u = (np.mod(low, q) + frac) / q
        idx = np.minimum((u * bins).astype(np.int64), bins - 1)
        counts += np.bincount(idx, minlength=bins)
    return DensityReport(counts)
