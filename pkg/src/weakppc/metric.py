"""Circle distance and subquadratic pair aggregation.

Pair membership is decided with the same float64 expressions as
:func:`circle_distance`, so the sorted sweep and an exhaustive loop agree
exactly on every count, ties included.  Distance sums are formed from prefix
sums of the coordinates held as 31-bit integer limbs, with enough limbs that
every coordinate is represented exactly (usually three); the total is exact
up to a single final rounding, whatever the split of the work.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from . import _backend
from .errors import InvalidArgument
from .sequences import PointSet

_LIMB_BITS = 31
_CHUNK = 4096


def circle_distance(x, y):
    """Distance to the nearest integer of ``x - y`` for x, y in [0, 1).

    The wrap-around branch is evaluated as ``(1 - max) + min``: ``1 - max``
    is exact there, so short distances across 0 keep full relative accuracy
    (``1 - |x - y|`` would not).  Works elementwise on arrays.
    """
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    d = np.abs(x - y)
    out = np.where(d > 0.5, (1.0 - np.maximum(x, y)) + np.minimum(x, y), d)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PairAggregate:
    """Ordered pairs i != j with circle distance <= r, and their distance sum."""

    count: int
    dist_sum: float


def _n_limbs(xs):
    """Limbs needed to hold every coordinate in [0, 1) exactly.

    All of them are multiples of the ulp of the smallest nonzero one.
    """
    pos = xs[xs > 0.0]
    if pos.size == 0:
        return 1
    bits = 53 - int(np.frexp(pos.min())[1])
    return max(1, -(-bits // _LIMB_BITS))


def _limbs(xs, n_limbs):
    """Split coordinates into integer limbs, most significant first."""
    out = []
    rest = xs
    for _ in range(n_limbs):
        y = rest * 2.0**_LIMB_BITS
        digit = np.floor(y)
        out.append(digit.astype(np.int64))
        rest = y - digit  # exact
    return out


def _exact_sum(v):
    """Exact Python-int sum of an int64 array (chunked, overflow free)."""
    if v.size == 0:
        return 0
    starts = np.arange(0, v.size, _CHUNK)
    hi = np.add.reduceat(v >> 32, starts)
    lo = np.add.reduceat(v & 0xFFFFFFFF, starts)
    return (sum(int(c) for c in hi) << 32) + sum(int(c) for c in lo)


def window_bounds(xs, r, backend=None):
    return _backend.get(backend).window_bounds(np.ascontiguousarray(xs, dtype=np.float64), float(r))


def _check_radius(r):
    r = float(r)
    if not 0.0 <= r <= 0.5:
        raise InvalidArgument(f"radius r={r!r} outside [0, 1/2]")
    return r


def pair_count(ps: PointSet, r: float, *, backend=None) -> int:
    """``pair_aggregate(ps, r).count`` without the distance sums."""
    r = _check_radius(r)
    n = ps.n
    hi, lo = window_bounds(ps.sorted, r, backend)
    return 2 * int((hi - np.arange(n) - 1).sum() + (n - lo).sum())


def _pair_units(xs, r, backend):
    """Pair count and distance sum as an exact integer multiple of ``2**-bits``."""
    n = xs.size
    hi, lo = window_bounds(xs, r, backend)
    idx = np.arange(n, dtype=np.int64)
    near = hi - idx - 1
    wrap = n - lo
    count = 2 * int(near.sum() + wrap.sum())

    n_limbs = _n_limbs(xs)
    units = 0
    for k, limb in enumerate(_limbs(xs, n_limbs)):
        pre = np.concatenate([[0], np.cumsum(limb)])
        one = (1 << _LIMB_BITS) if k == 0 else 0
        # forward run: sum_j (x_j - x_i); tail: sum_j (1 + x_i - x_j)
        part = ((pre[hi] - pre[idx + 1]) - near * limb
                + wrap * (one + limb) - (pre[n] - pre[lo]))
        units = (units << _LIMB_BITS) + _exact_sum(part)
    # ordered pairs: twice the unordered sum
    return count, 2 * units, _LIMB_BITS * n_limbs


def pair_aggregate(ps: PointSet, r: float, *, backend=None) -> PairAggregate:
    """Count and distance-sum of ordered pairs within circle distance ``r``.

    O(N) after the sort held by ``ps``: a two-pointer sweep finds, for every
    point, the forward run of neighbours and the wrap-around tail, and the
    distance sums come from prefix sums of the sorted coordinates.
    """
    r = _check_radius(r)
    count, units, bits = _pair_units(ps.sorted, r, backend)
    return PairAggregate(count, units / (1 << bits))


def pair_aggregate_exact(ps: PointSet, r: float, *, backend=None) -> Tuple[int, Fraction]:
    """As :func:`pair_aggregate`, with the distance sum as an exact fraction."""
    r = _check_radius(r)
    count, units, bits = _pair_units(ps.sorted, r, backend)
    return count, Fraction(units, 1 << bits)
