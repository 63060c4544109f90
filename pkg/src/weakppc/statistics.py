"""Pair correlation statistic, its integral, and the covering second moment.

Conventions, with ``w = s / N**beta``:

* ``pcf`` counts ordered pairs with circle distance ``<= w`` and divides by
  ``N**(2 - beta)``.
* The covering function puts a closed arc of half-width ``w / 2`` around every
  point and divides the coverage count by ``N**(1 - beta)``.  With this
  half-width its mean over t is exactly ``s``, and two arcs overlap in
  ``max(w - d, 0)``, which gives the closed form used by :func:`i2_closed`.

Every operation requires ``w <= 1/2``.  Larger windows raise
:class:`~weakppc.errors.ScaleOverflow` instead of being clamped.

The triangle kernel and the integral of ``pcf`` are evaluated from the exact
pair-distance sum in 60-digit decimal arithmetic and rounded once, so they
are correctly rounded up to the real power ``N**beta`` and to pairs lying
exactly on the window edge, which contribute zero either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Context, Decimal

import numpy as np

from . import _backend
from .errors import InvalidArgument, ScaleOverflow
from .metric import pair_aggregate_exact, pair_count
from .sequences import PointSet

_DEC = Context(prec=60)


@dataclass(frozen=True)
class PairStatistic:
    n: int
    beta: float
    s: float
    value: float


@dataclass(frozen=True)
class SecondMoment:
    n: int
    beta: float
    s: float
    closed: float
    sweep: float

    @property
    def discrepancy(self) -> float:
        return abs(self.closed - self.sweep)


def _check_beta(beta):
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise InvalidArgument(f"beta={beta!r} outside [0, 1]")
    return beta


def max_admissible_s(n: int, beta: float) -> float:
    """Largest ``s`` with ``s / n**beta <= 1/2``."""
    return 0.5 * float(n) ** beta


def window(ps: PointSet, beta: float, s: float) -> float:
    """The pair window ``s / N**beta`` after checking it fits on the circle."""
    beta = _check_beta(beta)
    s = float(s)
    if not s >= 0.0 or not math.isfinite(s):
        raise InvalidArgument(f"s={s!r} must be a finite value >= 0")
    w = s / float(ps.n) ** beta
    if w > 0.5:
        s_max = max_admissible_s(ps.n, beta)
        raise ScaleOverflow(
            f"s={s!r} gives window s/N^beta={w!r} > 1/2 (N={ps.n}, beta={beta!r}); "
            f"max admissible s is {s_max!r}",
            s=s, s_max=s_max,
        )
    return w


def pcf(ps: PointSet, beta: float, s: float, *, backend=None) -> PairStatistic:
    w = window(ps, beta, s)
    n = ps.n
    count = pair_count(ps, w, backend=backend)
    return PairStatistic(n, float(beta), float(s), count / float(n) ** (2.0 - beta))


def _kernel_terms(ps, beta, s, backend):
    """``(count, D, P, s)`` in decimal: pair count, exact distance sum, ``N**beta``."""
    w = window(ps, beta, s)
    if s == 0:
        raise InvalidArgument("triangle kernel undefined at s = 0")
    count, dist = pair_aggregate_exact(ps, w, backend=backend)
    d = _DEC.divide(Decimal(dist.numerator), Decimal(dist.denominator))
    p = _DEC.power(Decimal(ps.n), Decimal(float(beta)))
    return Decimal(count), d, p, Decimal(float(s))


def triangle_kernel(ps: PointSet, beta: float, s: float, *, backend=None) -> float:
    """Sum over ordered pairs of ``max(1 - d / w, 0)``, i.e. ``count - D N**beta / s``."""
    count, d, p, s_ = _kernel_terms(ps, beta, s, backend)
    return float(_DEC.subtract(count, _DEC.divide(_DEC.multiply(d, p), s_)))


def pcf_integral(ps: PointSet, beta: float, s: float, *, backend=None) -> float:
    """Exact value of the integral of ``pcf(ps, beta, t)`` over ``0 <= t <= s``.

    Equal to ``s / N**(2-beta) * T``, evaluated as
    ``(count * s - N**beta * D) * N**beta / N**2``.
    """
    count, d, p, s_ = _kernel_terms(ps, beta, s, backend)
    num = _DEC.subtract(_DEC.multiply(count, s_), _DEC.multiply(p, d))
    return float(_DEC.divide(_DEC.multiply(num, p), Decimal(ps.n * ps.n)))


@dataclass(frozen=True, eq=False)
class CoveringProfile:
    """Piecewise-constant covering function on the circle.

    ``counts[k]`` points cover ``[breakpoints[k], breakpoints[k+1])``; the last
    piece wraps round to ``breakpoints[0] + 1``.  ``levels`` are the counts
    divided by ``N**(1 - beta)``.
    """

    n: int
    beta: float
    s: float
    half_width: float
    breakpoints: np.ndarray
    counts: np.ndarray

    @property
    def norm(self) -> float:
        return float(self.n) ** (1.0 - self.beta)

    @property
    def levels(self) -> np.ndarray:
        return self.counts / self.norm

    @property
    def lengths(self) -> np.ndarray:
        bp = self.breakpoints
        if bp.size == 0:
            return np.ones(1)
        return np.append(np.diff(bp), 1.0 - bp[-1] + bp[0])

    def level_at(self, t: float) -> float:
        t = float(t) % 1.0
        bp = self.breakpoints
        k = int(np.searchsorted(bp, t, side="right")) - 1
        return float(self.counts[k]) / self.norm  # k = -1 is the wrapped piece

    def integral(self) -> float:
        return math.fsum((self.counts * self.lengths).tolist()) / self.norm

    def integral_of_square(self) -> float:
        c = self.counts.astype(np.float64)
        return math.fsum((c * c * self.lengths).tolist()) / self.norm**2


def covering_profile(ps: PointSet, beta: float, s: float, *, backend=None) -> CoveringProfile:
    w = window(ps, beta, s)
    h = 0.5 * w
    xs = ps.sorted
    starts = xs - h
    starts = np.where(starts < 0.0, starts + 1.0, starts)
    starts[starts >= 1.0] = 0.0
    ends = xs + h
    ends = np.where(ends >= 1.0, ends - 1.0, ends)
    c0 = int(np.count_nonzero(starts > ends))
    kern = _backend.get(backend)
    pos, cov = kern.coverage_sweep(np.sort(starts), np.sort(ends), c0)
    if cov.size and cov[-1] != c0:
        raise RuntimeError("coverage sweep did not close")  # pragma: no cover
    return CoveringProfile(ps.n, float(beta), float(s), h, pos, cov)


def i2_sweep(ps: PointSet, beta: float, s: float, *, backend=None) -> float:
    """Integral over t of the squared covering function, by exact event sweep."""
    return covering_profile(ps, beta, s, backend=backend).integral_of_square()


def i2_closed(ps: PointSet, beta: float, s: float, *, backend=None) -> SecondMoment:
    closed = pcf_integral(ps, beta, s, backend=backend) + float(s) / float(ps.n) ** (1.0 - beta)
    sweep = i2_sweep(ps, beta, s, backend=backend)
    return SecondMoment(ps.n, float(beta), float(s), closed, sweep)
