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

"""Miscellaneous utility functions"""


import csv
import hashlib
import json
import math
import os
import tempfile

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import (
    Any,
    Callable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from pydrobert.waring import DomainError
from pydrobert.waring import SolveError

__all__ = [
    "atomic_open",
    "extended_gcd",
    "file_sha256",
    "frac_product",
    "gauss_legendre",
    "ordered_map",
    "read_bitmap",
    "solve_increasing",
    "unit_phase_sum",
    "write_bitmap",
    "write_csv",
    "write_json",
    "write_plotdata",
]

BITMAP_MAGIC = b"WRNG"

_VELTKAMP = 134217729.0  # 2 ** 27 + 1
_HALF_WIDTH = 26


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``g = gcd(a, b) = u * a + v * b`` and ``g >= 0``"""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_u, u = u, old_u - quot * u
        old_v, v = v, old_v - quot * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v


def _split(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # Veltkamp: hi carries the top 26 significant bits, hi + lo == x exactly
    c = _VELTKAMP * x
    hi = c - (c - x)
    return hi, x - hi


def _frac_small(x: np.ndarray, n: np.ndarray) -> np.ndarray:
    # frac(x * n) for 0 <= x < 1 and 0 <= n < 2 ** 26
    hi, lo = _split(x)
    prod = hi * n  # exact: 26 bits times 26 bits
    out = prod - np.floor(prod) + lo * n
    return out - np.floor(out)


def frac_product(alpha: float, m: np.ndarray) -> np.ndarray:
    """Fractional part of ``alpha * m`` for large non-negative integers `m`

    The product is reduced mod 1 without ever forming ``alpha * m`` in double
    precision: `m` is split into two 26-bit halves and `alpha` into two halves
    with error-free (Veltkamp) splitting, so every partial product is exact or
    has an absolute error of a few units of ``2 ** -53``.

    Parameters
    ----------
    alpha : float
    m : array-like of int
        Non-negative integers less than ``2 ** 52``

    Returns
    -------
    array-like
        Floats in ``[0, 1)`` of the same shape as `m`

    Raises
    ------
    DomainError
        If some entry of `m` is negative or too wide
    """
    m = np.asarray(m, dtype=np.int64)
    if m.size and (m.min() < 0 or m.max() >= 2 ** 52):
        raise DomainError("integers must lie in [0, 2**52) to reduce a phase exactly")
    alpha = float(alpha)
    a = np.float64(alpha - math.floor(alpha))
    b = np.float64(math.ldexp(float(a), _HALF_WIDTH))
    b -= np.floor(b)
    m_hi = (m >> _HALF_WIDTH).astype(np.float64)
    m_lo = (m & ((1 << _HALF_WIDTH) - 1)).astype(np.float64)
    out = _frac_small(a, m_lo) + _frac_small(b, m_hi)
    return out - np.floor(out)


def unit_phase_sum(phases: np.ndarray) -> complex:
    """Sum ``e(phase) = exp(2 pi i phase)`` over `phases` with exact rounding

    Real and imaginary parts are accumulated with :func:`math.fsum`
    """
    angles = 2 * np.pi * np.asarray(phases, dtype=np.float64)
    return complex(math.fsum(np.cos(angles)), math.fsum(np.sin(angles)))


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[-1, 1]``, cached by order"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def solve_increasing(
    func: Callable[[float], float],
    target: float,
    lo: float,
    hi: Optional[float] = None,
    deriv: Optional[Callable[[float], float]] = None,
    rtol: float = 1e-14,
    max_doublings: int = 256,
) -> float:
    """Solve ``func(x) = target`` for an increasing `func` on ``[lo, inf)``

    The root is bracketed by doubling `hi`, narrowed by bisection, then polished
    with a couple of Newton steps if `deriv` is given.

    Raises
    ------
    SolveError
        If ``func(lo) > target`` (no root above `lo`) or no bracket is found
    """
    f_lo = func(lo)
    if f_lo > target:
        raise SolveError(
            "f({}) = {} already exceeds the target {}".format(lo, f_lo, target)
        )
    if f_lo == target:
        return lo
    if hi is None:
        hi = max(2.0 * lo, lo + 1.0)
    for _ in range(max_doublings):
        if func(hi) >= target:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise SolveError("Could not bracket a root for target {}".format(target))
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    if deriv is not None:
        for _ in range(3):
            slope = deriv(x)
            if not slope > 0:
                break
            x_new = x - (func(x) - target) / slope
            if not lo <= x_new <= hi or x_new == x:
                break
            x = x_new
    return x


def ordered_map(func: Callable, items: Iterable, workers: int = 1) -> List:
    """Map `func` over `items`, in parallel threads if ``workers > 1``

    Results are always returned in the order of `items`, so outputs do not depend
    on the number of workers.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


class atomic_open(object):
    """Open a file for writing such that it only appears once fully written

    Content goes to a temporary file in the same directory which is renamed
    over `path` on a clean exit and deleted otherwise.
    """

    def __init__(self, path: str, mode: str = "w", **kwargs):
        self.path = path
        self.mode = mode
        self.kwargs = kwargs
        self._file = None
        self._tmp = None

    def __enter__(self):
        dir_ = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(dir_, exist_ok=True)
        fd, self._tmp = tempfile.mkstemp(dir=dir_, suffix=".tmp")
        self._file = os.fdopen(fd, self.mode, **self.kwargs)
        return self._file

    def __exit__(self, exc_type, exc_value, traceback):
        self._file.close()
        if exc_type is None:
            os.replace(self._tmp, self.path)
        else:
            os.remove(self._tmp)
        return False


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write rows as RFC-4180-style CSV (minimal quoting, CRLF line ends)"""
    with atomic_open(path, "w", newline="", encoding="utf-8") as file_:
        writer = csv.writer(file_, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(_plain(x) for x in row)


def write_json(path: str, obj: Any) -> None:
    """Write `obj` as UTF-8 JSON with a stable key order"""
    with atomic_open(path, "w", encoding="utf-8") as file_:
        json.dump(_plain(obj), file_, sort_keys=True, indent=2, ensure_ascii=False)
        file_.write("\n")


def write_plotdata(
    path: str,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    comments: Sequence[str] = tuple(),
) -> None:
    """Write whitespace-separated, gnuplot-ready columns with a comment header

    The header is made up of `comments` followed by a line naming the columns,
    each prefixed by ``#``.
    """
    with atomic_open(path, "w", encoding="utf-8") as file_:
        for comment in comments:
            file_.write("# {}\n".format(comment))
        file_.write("# {}\n".format(" ".join(columns)))
        for row in rows:
            file_.write(" ".join(repr(_plain(x)) for x in row))
            file_.write("\n")


def write_bitmap(path: str, bits: np.ndarray, s: int) -> None:
    """Dump a sumset bitmap as raw little-endian bits behind a 16-byte header

    The header is the 4-byte magic ``b"WRNG"``, the fold count `s` as an unsigned
    32-bit little-endian integer, and the limit (``len(bits) - 1``) as an unsigned
    64-bit little-endian integer. Bit ``m`` of the payload is byte ``m // 8``, bit
    ``m % 8`` (least significant first).
    """
    bits = np.asarray(bits, dtype=bool)
    header = (
        BITMAP_MAGIC
        + np.uint32(s).astype("<u4").tobytes()
        + np.uint64(len(bits) - 1).astype("<u8").tobytes()
    )
    with atomic_open(path, "wb") as file_:
        file_.write(header)
        file_.write(np.packbits(bits, bitorder="little").tobytes())


def read_bitmap(path: str) -> Tuple[np.ndarray, int]:
    """Read a bitmap written by :func:`write_bitmap`, returning ``(bits, s)``"""
    with open(path, "rb") as file_:
        header = file_.read(16)
        if len(header) != 16 or header[:4] != BITMAP_MAGIC:
            raise IOError("{} is not a sumset bitmap".format(path))
        s = int(np.frombuffer(header[4:8], dtype="<u4")[0])
        limit = int(np.frombuffer(header[8:16], dtype="<u8")[0])
        payload = np.frombuffer(file_.read(), dtype=np.uint8)
    bits = np.unpackbits(payload, count=limit + 1, bitorder="little").astype(bool)
    return bits, s


def file_sha256(path: str) -> str:
    """Hex digest of a file's content"""
    digest = hashlib.sha256()
    with open(path, "rb") as file_:
        for block in iter(lambda: file_.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _plain(obj: Any) -> Any:
    # numpy scalars and containers to builtin types, for csv/json/repr
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
