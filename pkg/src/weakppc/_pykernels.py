"""Pure numpy implementations of the hot kernels.

These must return exactly what the compiled kernels in ``_ckernels.pyx``
return; ``tests/test_backends.py`` compares the two bit for bit.
"""
import numpy as np

_MAX_FIXUP = 256


def _largest_satisfying(pred, t):
    """Move each ``t`` to the largest double where the monotone ``pred`` holds.

    ``pred`` must be true on a down-set; ``t`` starts within a few ulps.
    """
    for _ in range(_MAX_FIXUP):
        bad = ~pred(t)
        if not bad.any():
            break
        t = np.where(bad, np.nextafter(t, -np.inf), t)
    else:
        raise RuntimeError("threshold search did not settle")
    for _ in range(_MAX_FIXUP):
        up = np.nextafter(t, np.inf)
        ok = pred(up)
        if not ok.any():
            return t
        t = np.where(ok, up, t)
    raise RuntimeError("threshold search did not settle")


def _smallest_satisfying(pred, t):
    """Mirror of :func:`_largest_satisfying` for predicates true on an up-set."""
    for _ in range(_MAX_FIXUP):
        bad = ~pred(t)
        if not bad.any():
            break
        t = np.where(bad, np.nextafter(t, np.inf), t)
    else:
        raise RuntimeError("threshold search did not settle")
    for _ in range(_MAX_FIXUP):
        down = np.nextafter(t, -np.inf)
        ok = pred(down)
        if not ok.any():
            return t
        t = np.where(ok, down, t)
    raise RuntimeError("threshold search did not settle")


def window_bounds(xs, r):
    """Two-sided neighbour windows of every point of a sorted array.

    For each i returns ``hi[i]`` (exclusive end of the run j > i with
    ``xs[j] - xs[i] <= r``) and ``lo[i]`` (start of the tail with
    ``xs[j] - xs[i] > 1/2`` and ``(1 - xs[j]) + xs[i] <= r``), all evaluated
    in float64 exactly as written.  Pairs i < j within circle distance r are then
    ``(i, hi[i])`` plus ``[lo[i], n)``.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    n = xs.size
    idx = np.arange(n, dtype=np.int64)
    r = float(r)

    upper = _largest_satisfying(lambda v: (v - xs) <= r, xs + r)
    hi = np.searchsorted(xs, upper, side="right").astype(np.int64)
    np.maximum(hi, idx + 1, out=hi)

    lower = _smallest_satisfying(lambda v: ((v - xs) > 0.5) & (((1.0 - v) + xs) <= r),
                                 np.maximum((1.0 - r) + xs, 0.5 + xs))
    lo = np.searchsorted(xs, lower, side="left").astype(np.int64)
    np.maximum(lo, hi, out=lo)
    return hi, lo


def coverage_sweep(starts, ends, c0):
    """Merge sorted interval starts and ends into a coverage step function.

    Returns the distinct event positions and the coverage count holding
    just after each one (i.e. on ``[pos[k], pos[k+1])``).
    """
    n = starts.size
    pos = np.concatenate([starts, ends])
    delta = np.concatenate([np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)])
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    cov = c0 + np.cumsum(delta[order])
    last = np.ones(pos.size, dtype=bool)
    last[:-1] = pos[1:] != pos[:-1]
    return pos[last], cov[last]
