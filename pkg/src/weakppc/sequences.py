"""Test sequences on the unit circle and their multiplicity diagnostics.

All generators return a :class:`PointSet`.  Random values come from a
counter-based SplitMix64 stream, so ``gen_uniform(n, seed)`` is the length-n
prefix of one infinite sequence and never depends on numpy's default
generator.
"""
from __future__ import annotations

import math
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from .errors import InvalidArgument

RNG_NAME = "splitmix64"

_GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def splitmix64(seed: int, n: int, start: int = 0) -> np.ndarray:
    """Outputs ``start .. start+n-1`` of the SplitMix64 stream for ``seed``.

    Output k is ``mix(seed + (k + 1) * 0x9E3779B97F4A7C15)`` with arithmetic
    modulo 2**64, which is exactly the sequential generator of Steele, Lea and
    Flood written in counter form.
    """
    seed = np.uint64(int(seed) & _MASK64)
    k = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = seed + k * _GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniform_doubles(seed: int, n: int, start: int = 0) -> np.ndarray:
    """Top 53 bits of each SplitMix64 output scaled into [0, 1)."""
    raw = splitmix64(seed, n, start)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True, eq=False)
class PointSet:
    """A finite multiset x_1..x_N in [0, 1) together with its sorted view.

    ``points`` keeps generation order (ladders take prefixes of it);
    ``sorted`` is what every statistic consumes.  Both arrays are read-only.
    """

    points: np.ndarray
    meta: Dict[str, str] = field(default_factory=dict)
    sorted: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True).reshape(-1)
        if pts.size < 1:
            raise InvalidArgument("a point set needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgument("points must be finite")
        if np.any(pts < 0.0) or np.any(pts >= 1.0):
            raise InvalidArgument("points must lie in [0, 1)")
        srt = np.sort(pts, kind="stable")
        pts.flags.writeable = False
        srt.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "sorted", srt)
        object.__setattr__(self, "meta", {str(k): str(v) for k, v in dict(self.meta).items()})

    @property
    def n(self) -> int:
        return int(self.points.size)

    def __len__(self):
        return self.n

    @property
    def meta_text(self) -> str:
        return " ".join(f"{k}={v}" for k, v in self.meta.items())

    def prefix(self, n: int) -> "PointSet":
        """The first ``n`` points, in generation order."""
        if not 1 <= n <= self.n:
            raise InvalidArgument(f"prefix length {n} outside [1, {self.n}]")
        meta = dict(self.meta)
        meta["n"] = str(n)
        return PointSet(self.points[:n], meta)


@dataclass(frozen=True)
class MultiplicityProfile:
    counts: Dict[float, int]
    n_multi: int

    @property
    def n(self) -> int:
        return sum(self.counts.values())


def _check_count(n, name="n"):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def gen_uniform(n: int, seed: int) -> PointSet:
    n = _check_count(n)
    pts = uniform_doubles(seed, n)
    return PointSet(pts, {"generator": "uniform", "rng": RNG_NAME, "seed": str(int(seed)), "n": str(n)})


def _frac(values: np.ndarray) -> np.ndarray:
    out = values - np.floor(values)
    # x - floor(x) can round up to 1.0 for tiny negative x
    out[out >= 1.0] = 0.0
    return out


def gen_kronecker(alpha: float, n: int) -> PointSet:
    """x_k = {k * alpha} for k = 1..n."""
    n = _check_count(n)
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise InvalidArgument("alpha must be finite")
    k = np.arange(1, n + 1, dtype=np.float64)
    return PointSet(_frac(k * alpha), {"generator": "kronecker", "alpha": repr(alpha), "n": str(n)})


def radical_inverse(k: np.ndarray, base: int) -> np.ndarray:
    """Radical inverse of the nonnegative integers ``k`` in ``base``.

    The digit-reversed integer and the power of ``base`` are formed exactly
    in int64, so the result is a single correctly rounded division.
    """
    k = np.asarray(k, dtype=np.int64)
    kmax = int(k.max()) if k.size else 0
    ndigits = 1
    while base**ndigits <= kmax:
        ndigits += 1
    if base**ndigits >= 2**62:
        raise InvalidArgument("sequence too long for exact radical inverse")
    rev = np.zeros_like(k)
    rem = k.copy()
    for _ in range(ndigits):
        rev = rev * base + rem % base
        rem //= base
    return rev.astype(np.float64) / float(base**ndigits)


def gen_vdc(base: int, n: int) -> PointSet:
    n = _check_count(n)
    if isinstance(base, bool) or int(base) != base or base < 2:
        raise InvalidArgument(f"base must be an integer >= 2, got {base!r}")
    base = int(base)
    pts = radical_inverse(np.arange(1, n + 1, dtype=np.int64), base)
    return PointSet(pts, {"generator": "vdc", "base": str(base), "n": str(n)})


def gen_multiset(m_distinct: int, n: int, seed: int) -> PointSet:
    """``m_distinct`` random values, cycled so each appears floor/ceil(n/m) times."""
    n = _check_count(n)
    m = _check_count(m_distinct, "m_distinct")
    if m > n:
        raise InvalidArgument(f"m_distinct={m} exceeds n={n}")
    values = []
    seen = set()
    k = 0
    while len(values) < m:
        v = float(uniform_doubles(seed, 1, start=k)[0])
        k += 1
        if v not in seen:
            seen.add(v)
            values.append(v)
    pts = np.asarray(values)[np.arange(n) % m]
    return PointSet(pts, {
        "generator": "multiset", "rng": RNG_NAME, "seed": str(int(seed)),
        "m_distinct": str(m), "n": str(n),
    })


def multiplicity_profile(ps: PointSet) -> MultiplicityProfile:
    # float keys compare by value; -0.0 cannot occur in [0, 1) after validation
    counts = dict(Counter(ps.points.tolist()))
    n_multi = sum(c for c in counts.values() if c >= 2)
    return MultiplicityProfile(counts, n_multi)


GENERATORS = ("uniform", "kronecker", "vdc", "multiset")


@dataclass(frozen=True)
class GenSpec:
    """A generator kind plus its parameters; ``generate(n)`` builds the points."""

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise InvalidArgument(f"unknown generator kind {self.kind!r}")
        if self.kind in ("uniform", "multiset") and self.seed is None:
            raise InvalidArgument(f"generator {self.kind!r} needs a seed")
        if self.kind == "kronecker" and "alpha" not in self.params:
            raise InvalidArgument("kronecker generator needs alpha")
        if self.kind == "multiset" and "m_distinct" not in self.params:
            raise InvalidArgument("multiset generator needs m_distinct")

    def generate(self, n: int) -> PointSet:
        if self.kind == "uniform":
            return gen_uniform(n, self.seed)
        if self.kind == "kronecker":
            return gen_kronecker(self.params["alpha"], n)
        if self.kind == "vdc":
            return gen_vdc(int(self.params.get("base", 2)), n)
        return gen_multiset(int(self.params["m_distinct"]), n, self.seed)


def format_value(v: float) -> str:
    """17 significant digits, always with a decimal point (``0.0``, ``0.5``)."""
    text = f"{v:.17g}"
    if not any(c in text for c in ".eEn"):
        text += ".0"
    return text


def format_points(ps: PointSet) -> str:
    lines = [f"# {k}: {v}" for k, v in ps.meta.items()]
    if "n" not in ps.meta:
        lines.append(f"# n: {ps.n}")
    lines.extend(format_value(v) for v in ps.points.tolist())
    return "\n".join(lines) + "\n"


def parse_points(text: str) -> PointSet:
    meta = {}
    values = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, val = line[1:].partition(":")
            if sep:
                meta[key.strip()] = val.strip()
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise InvalidArgument(f"line {lineno}: not a number: {line!r}") from None
    if "n" in meta and meta["n"] != str(len(values)):
        raise InvalidArgument(f"header says n={meta['n']} but file holds {len(values)} values")
    return PointSet(np.asarray(values, dtype=np.float64), meta)


def read_points(path) -> PointSet:
    with open(path, encoding="utf-8") as fh:
        return parse_points(fh.read())


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = os.fspath(path)
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=dirname, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_points(ps: PointSet, path) -> None:
    atomic_write_text(path, format_points(ps))
