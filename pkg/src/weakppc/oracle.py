"""Slow reference implementations, independent of the sorted sweeps.

Nothing here sorts points or uses prefix sums; every quantity comes from an
exhaustive scan over pairs (or over points for a fixed t).  Distance sums are
exact: each pair's distance is taken from the integer limbs of its
coordinates, the same representation the fast path sums.  The CLI exposes
them behind ``--oracle`` for audits.
"""
from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .errors import InvalidArgument
from .metric import _LIMB_BITS, PairAggregate, _limbs, _n_limbs, circle_distance
from .sequences import PointSet

_ROWS = 256


def _pairs_within(xs, r):
    """Yield index arrays ``(i, j)`` of ordered pairs i != j within ``r``.

    Same predicate as :func:`circle_distance`, one block of rows at a time.
    The wrap branch is evaluated only where ``|x_i - x_j|`` is close enough
    to 1 for it to matter.
    """
    cut = max(0.5, 1.0 - r - 1e-15)
    for start in range(0, xs.size, _ROWS):
        d = np.abs(xs[start:start + _ROWS, None] - xs[None, :])
        ii, jj = np.nonzero(d <= r)
        wi, wj = np.nonzero(d > cut)
        if wi.size:
            x, y = xs[wi + start], xs[wj]
            keep = ((1.0 - np.maximum(x, y)) + np.minimum(x, y)) <= r
            ii, jj = np.concatenate([ii, wi[keep]]), np.concatenate([jj, wj[keep]])
        ii += start
        off = ii != jj
        yield ii[off], jj[off]


def _brute_pairs(xs, r):
    """Count and exact distance sum of ordered pairs i != j within ``r``.

    Each pair's distance is formed exactly from the integer limbs of its two
    coordinates, on whichever branch (direct or wrap-around) the float
    distance took.
    """
    n_limbs = _n_limbs(xs)
    limbs = _limbs(xs, n_limbs)
    count = 0
    sums = [0] * n_limbs
    for ii, jj in _pairs_within(xs, r):
        count += ii.size
        wrap = np.abs(xs[ii] - xs[jj]) > 0.5
        sign = np.where(xs[jj] >= xs[ii], 1, -1)
        for k, limb in enumerate(limbs):
            diff = sign * (limb[jj] - limb[ii])
            if k == 0:
                diff = np.where(wrap, (1 << _LIMB_BITS) - diff, diff)
            else:
                diff = np.where(wrap, -diff, diff)
            sums[k] += int(diff.sum())
    units = 0
    for part in sums:
        units = (units << _LIMB_BITS) + part
    return count, Fraction(units, 1 << (_LIMB_BITS * n_limbs))


def brute_pair_aggregate(ps: PointSet, r: float) -> PairAggregate:
    r = float(r)
    if not 0.0 <= r <= 0.5:
        raise InvalidArgument(f"radius r={r!r} outside [0, 1/2]")
    count, dist = _brute_pairs(ps.points, r)
    return PairAggregate(count, float(dist))


def stepwise_pcf_integral(ps: PointSet, beta: float, s: float) -> float:
    """Integral of ``t -> pcf(ps, beta, t)`` on ``[0, s]`` as a sum of steps.

    The statistic steps up by ``1 / N**(2-beta)`` at ``t = N**beta * d`` for
    every pair distance ``d``, so the integral is the sum over counted pairs
    of ``(s - N**beta * d) / N**(2-beta)``.  Evaluated in 60-digit decimal
    from exact distances and rounded once.
    """
    n = ps.n
    s = float(s)
    r = s / float(n) ** beta
    if not 0.0 <= r <= 0.5:
        raise InvalidArgument(f"window s/N^beta={r!r} outside [0, 1/2]")
    count, dist = _brute_pairs(ps.points, r)
    with localcontext() as ctx:
        ctx.prec = 60
        p = Decimal(n) ** Decimal(float(beta))
        total = Decimal(count) * Decimal(s) - p * (Decimal(dist.numerator) / Decimal(dist.denominator))
        return float(total / (Decimal(n * n) / p))


def brute_membership_count(ps: PointSet, t: float, beta: float, s: float) -> int:
    """Points within circle distance ``s / (2 N**beta)`` of ``t``."""
    half = float(s) / (2.0 * float(ps.n) ** beta)
    t = float(t) % 1.0
    count = 0
    for x in ps.points.tolist():
        if circle_distance(x, t) <= half:
            count += 1
    return count


def _membership_counts(xs, ts, half):
    out = np.zeros(ts.size, dtype=np.int64)
    for start in range(0, ts.size, 4096):
        d = circle_distance(ts[start:start + 4096, None], xs[None, :])
        out[start:start + 4096] = (d <= half).sum(axis=1)
    return out


def brute_i2(ps: PointSet, beta: float, s: float, resolution: int) -> float:
    """Midpoint rule for the integral of the squared covering function.

    The integrand is a step function with at most ``2N`` jumps, so at most
    ``2N`` cells are wrong and :func:`brute_i2_error_bound` bounds the error
    by ``2N / resolution`` times the largest squared level.
    """
    resolution = int(resolution)
    if resolution < 10 * ps.n:
        raise InvalidArgument(f"resolution must be at least 10*N = {10 * ps.n}")
    half = float(s) / (2.0 * float(ps.n) ** beta)
    ts = (np.arange(resolution, dtype=np.float64) + 0.5) / resolution
    counts = _membership_counts(ps.points, ts, half).astype(np.float64)
    norm = float(ps.n) ** (1.0 - beta)
    return math.fsum((counts * counts).tolist()) / resolution / norm**2


def brute_i2_error_bound(ps: PointSet, beta: float, s: float, resolution: int) -> float:
    """Worst-case midpoint error: ``2N`` bad cells at the top squared level."""
    norm = float(ps.n) ** (1.0 - beta)
    half = float(s) / (2.0 * float(ps.n) ** beta)
    # the covering count peaks at some arc endpoint
    ends = np.concatenate([ps.points - half, ps.points + half]) % 1.0
    # slightly widened so rounding at the endpoint cannot hide a point
    top = int(_membership_counts(ps.points, ends, half * (1 + 1e-12)).max()) / norm
    return 2.0 * ps.n / int(resolution) * top**2
