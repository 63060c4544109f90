"""Limit estimation over N-ladders and pass/fail checks of the bounds.

Two kinds of check live here:

* finite-N inequalities (Cauchy-Schwarz, covering, alpha-beta), which must
  hold for every point set and are checked against the exact sweep;
* limit statements, which are checked on :class:`LimitEstimate` tables and
  only at grid values whose last two ladder rows agree within ``conv_tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import GridMismatch, InvalidArgument, NoConvergedPoints, TooFewPoints
from .metric import pair_count
from .sequences import GenSpec, PointSet
from .statistics import i2_sweep, window

# finite-N inequalities are exact up to rounding; the slack scales with the
# compared magnitude because an absolute 1e-12 is below one ulp once I > 4500
FINITE_N_TOL = 1e-12


@dataclass
class VerificationReport:
    check: str
    params: Dict[str, object]
    passed: bool
    tolerance: float
    worst_violation: float
    witness: Optional[Dict[str, object]] = None

    def to_json_dict(self) -> Dict[str, object]:
        return {
            "check": self.check,
            "params": _plain(self.params),
            "pass": bool(self.passed),
            "tolerance": float(self.tolerance),
            "worst_violation": float(self.worst_violation),
            "witness": _plain(self.witness),
        }


def _plain(obj):
    """Convert numpy scalars/arrays inside ``obj`` to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def _report(check, params, violations, tolerance, witness=None, locations=None):
    violations = np.asarray(violations, dtype=np.float64)
    k = int(np.argmax(violations))
    worst = float(violations[k])
    witness = dict(witness or {})
    if locations is not None:
        witness["location"] = locations[k]
    return VerificationReport(check, params, worst <= tolerance, tolerance, worst, witness)


@dataclass
class LimitEstimate:
    """Table of ``pcf`` values over an N-ladder and an ``s`` grid.

    ``table[k, j]`` is the statistic at ``ladder[k]`` and ``s_grid[j]``;
    ``f_hat`` is the last row, and a grid value counts as converged when the
    last two rows differ by at most ``conv_tol``.
    """

    beta: float
    s_grid: np.ndarray
    ladder: List[int]
    table: np.ndarray
    conv_tol: float = 0.05
    source: str = ""
    f_hat: np.ndarray = field(init=False)
    converged: np.ndarray = field(init=False)
    slope0: float = field(init=False)
    warnings: List[str] = field(init=False, default_factory=list)

    def __post_init__(self):
        self.s_grid = np.asarray(self.s_grid, dtype=np.float64)
        self.table = np.atleast_2d(np.asarray(self.table, dtype=np.float64))
        self.ladder = [int(n) for n in self.ladder]
        if self.table.shape != (len(self.ladder), self.s_grid.size):
            raise InvalidArgument("table shape does not match ladder x s_grid")
        self.f_hat = self.table[-1].copy()
        if len(self.ladder) >= 2:
            self.converged = np.abs(self.table[-1] - self.table[-2]) <= self.conv_tol
        else:
            self.converged = np.zeros(self.s_grid.size, dtype=bool)
            self.warnings.append("single-row ladder: no convergence information")
        try:
            self.slope0, note = _slope_at_zero(self.s_grid, self.f_hat)
        except TooFewPoints as exc:
            self.slope0 = math.nan
            self.warnings.append(str(exc))
        else:
            if note:
                self.warnings.append(note)

    @classmethod
    def from_function(cls, beta, s_grid, func, ladder=(1, 2), conv_tol=0.05):
        """An exact table, every ladder row equal to ``func(s_grid)``."""
        s_grid = np.asarray(s_grid, dtype=np.float64)
        row = np.asarray(func(s_grid), dtype=np.float64)
        return cls(beta, s_grid, list(ladder), np.tile(row, (len(ladder), 1)), conv_tol, "exact")


def _slope_at_zero(s_grid, f_hat):
    s_grid = np.asarray(s_grid, dtype=np.float64)
    quarter = float(s_grid[-1]) / 4.0
    low = s_grid < quarter
    if np.count_nonzero(low) < 3:
        raise TooFewPoints(
            f"slope at zero needs 3 grid points below s_max/4 = {quarter!r}, "
            f"got {int(np.count_nonzero(low))}")
    secant = float(f_hat[0] / s_grid[0])
    s, f = s_grid[low], np.asarray(f_hat)[low]
    fit = float(np.dot(s, f) / np.dot(s, s))
    note = None
    if abs(fit - secant) > 0.1 * abs(secant):
        note = f"unstable slope at zero: secant {secant!r} vs through-origin fit {fit!r}"
    return secant, note


def estimate_slope_at_zero(le: LimitEstimate) -> float:
    """Secant ``f_hat(h) / h`` at the smallest grid value ``h``.

    A least-squares line through the origin over the grid values below
    ``s_max / 4`` serves as a cross-check; a disagreement above 10% is
    recorded in ``le.warnings``.
    """
    slope, note = _slope_at_zero(le.s_grid, le.f_hat)
    if note and note not in le.warnings:
        le.warnings.append(note)
    return slope


def _check_grid(s_grid):
    s_grid = np.asarray(s_grid, dtype=np.float64).reshape(-1)
    if s_grid.size == 0:
        raise InvalidArgument("empty s grid")
    if not s_grid[0] > 0 or np.any(np.diff(s_grid) <= 0):
        raise InvalidArgument("s grid must be strictly increasing with positive minimum")
    return s_grid


def _check_ladder(ladder):
    ladder = [int(n) for n in ladder]
    if not ladder:
        raise InvalidArgument("empty ladder")
    if ladder[0] < 1 or any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise InvalidArgument("ladder must be strictly increasing positive integers")
    return ladder


def estimate_limit(gen_spec: GenSpec, beta: float, s_grid: Sequence[float],
                   ladder: Sequence[int], conv_tol: float = 0.05) -> LimitEstimate:
    """Fill the ``pcf`` table over prefixes of one generated sequence."""
    s_grid = _check_grid(s_grid)
    ladder = _check_ladder(ladder)
    full = gen_spec.generate(ladder[-1])
    # largest window is at the smallest N; refuse before any work
    window(full.prefix(ladder[0]), beta, s_grid[-1])
    table = np.empty((len(ladder), s_grid.size))
    for k, n in enumerate(ladder):
        ps = full.prefix(n)
        norm = float(n) ** (2.0 - beta)
        for j, s in enumerate(s_grid):
            table[k, j] = pair_count(ps, window(ps, beta, s)) / norm
    return LimitEstimate(float(beta), s_grid, ladder, table, conv_tol, full.meta_text)


def _integral_prefix(le: LimitEstimate):
    """Trapezoid integral of ``f_hat`` from 0 over the leading converged run."""
    run = 0
    while run < le.s_grid.size and le.converged[run]:
        run += 1
    s = np.concatenate([[0.0], le.s_grid[:run]])
    f = np.concatenate([[0.0], le.f_hat[:run]])
    return le.s_grid[:run], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(s))


def check_bounds(le: LimitEstimate, tol: float) -> VerificationReport:
    """``2s <= f(s) <= slope0 * s`` and ``s^2 <= int_0^s f <= slope0 s^2 / 2``.

    Pointwise items use ``tol`` directly.  Integral items are divided by
    ``s``, i.e. they may be off by ``tol`` per unit length, which is what
    integrating a pointwise slack of ``tol`` allows.
    """
    if not np.any(le.converged):
        raise NoConvergedPoints("no grid value converged along the ladder")
    if not math.isfinite(le.slope0):
        raise InvalidArgument("estimate has no slope at zero: " + "; ".join(le.warnings))
    slope = le.slope0
    violations, locations = [], []
    for s, f in zip(le.s_grid[le.converged], le.f_hat[le.converged]):
        violations += [2.0 * s - f, f - slope * s]
        locations += [{"s": s, "bound": "lower"}, {"s": s, "bound": "upper"}]
    int_s, integral = _integral_prefix(le)
    for s, j in zip(int_s, integral):
        violations += [(s * s - j) / s, (j - 0.5 * slope * s * s) / s]
        locations += [{"s": s, "bound": "integral_lower"}, {"s": s, "bound": "integral_upper"}]
    witness = {
        "slope0": slope,
        "unconverged_s": le.s_grid[~le.converged],
        "integral_checked_up_to": int_s[-1] if int_s.size else None,
        "warnings": list(le.warnings),
    }
    params = {"beta": le.beta, "ladder": le.ladder, "s_min": le.s_grid[0],
              "s_max": le.s_grid[-1], "steps": le.s_grid.size, "source": le.source,
              "conv_tol": le.conv_tol}
    return _report("bounds", params, violations, tol, witness, locations)


def check_covering_inequality(ps: PointSet, beta: float, s: float, K: int) -> VerificationReport:
    if isinstance(K, bool) or int(K) != K or K < 2:
        raise InvalidArgument(f"K must be an integer >= 2, got {K!r}")
    K = int(K)
    lhs = i2_sweep(ps, beta, s)
    small = i2_sweep(ps, beta, float(s) / K)
    rhs = (K + 1) ** 2 * small
    tol = FINITE_N_TOL * max(1.0, abs(rhs))
    params = {"n": ps.n, "beta": beta, "s": s, "K": K}
    return _report("covering", params, [lhs - rhs], tol, {"I_s": lhs, "I_s_over_K": small, "rhs": rhs})


def check_cauchy_schwarz(ps: PointSet, beta: float, s: float) -> VerificationReport:
    i2 = i2_sweep(ps, beta, s)
    s = float(s)
    tol = FINITE_N_TOL * max(1.0, s * s)
    params = {"n": ps.n, "beta": beta, "s": s}
    return _report("cauchy_schwarz", params, [s * s - i2], tol, {"I": i2, "s_squared": s * s})


def check_alpha_beta_inequality(ps: PointSet, alpha: float, beta: float, s: float) -> VerificationReport:
    alpha, beta = float(alpha), float(beta)
    if not 0.0 <= alpha < beta < 1.0:
        raise InvalidArgument(f"need 0 <= alpha < beta < 1, got alpha={alpha!r}, beta={beta!r}")
    window(ps, alpha, s)  # the alpha window is the wider one
    i_alpha = i2_sweep(ps, alpha, s)
    i_beta = i2_sweep(ps, beta, s)
    factor = 1.0 + 3.0 / float(ps.n) ** (beta - alpha)
    rhs = factor * i_beta
    tol = FINITE_N_TOL * max(1.0, abs(rhs))
    params = {"n": ps.n, "alpha": alpha, "beta": beta, "s": float(s)}
    witness = {"I_alpha": i_alpha, "I_beta": i_beta, "factor": factor, "rhs": rhs}
    return _report("alpha_beta", params, [i_alpha - rhs], tol, witness)


def check_monotone(le_alpha: LimitEstimate, le_beta: LimitEstimate, tol: float) -> VerificationReport:
    if le_alpha.s_grid.shape != le_beta.s_grid.shape or not np.array_equal(le_alpha.s_grid, le_beta.s_grid):
        raise GridMismatch("estimates were computed on different s grids")
    if le_alpha.beta > le_beta.beta or le_beta.beta >= 1.0:
        raise InvalidArgument(
            f"need alpha <= beta < 1, got alpha={le_alpha.beta!r}, beta={le_beta.beta!r}")
    both = le_alpha.converged & le_beta.converged
    if not np.any(both):
        raise NoConvergedPoints("no grid value converged for both parameters")
    s = le_alpha.s_grid[both]
    violations = le_alpha.f_hat[both] - le_beta.f_hat[both]
    params = {"alpha": le_alpha.beta, "beta": le_beta.beta, "s_min": le_alpha.s_grid[0],
              "s_max": le_alpha.s_grid[-1], "steps": le_alpha.s_grid.size,
              "ladder_alpha": le_alpha.ladder, "ladder_beta": le_beta.ladder}
    witness = {"unconverged_s": le_alpha.s_grid[~both]}
    return _report("monotone", params, violations, tol, witness, [{"s": v} for v in s])


def remark_example(c: float, delta: float) -> VerificationReport:
    """Piecewise function meeting the integral bounds but not the pointwise one.

    ``f(s) = 2cs`` on ``[0, 1]`` and ``f(s) = c`` on ``(1, c/2 + delta]``,
    evaluated at ``S = c/2 + delta``.  Three flags:

    * upper: ``int_0^S f <= c S^2``
    * lower: ``int_0^S f > S^2`` (strict)
    * pointwise: ``f(S) < 2S`` (strict)

    The report passes iff all three hold.  The integral is the exact
    piecewise value ``c min(S,1)^2 + c max(S-1, 0)``, i.e. ``c^2/2 + c delta``
    once ``S >= 1``.  For comparison the witness also carries
    ``alt_integral = 3/2 c^2 + c delta - c`` and
    ``alt_condition = (c + delta)^2 < 3/2 c^2 + c delta - 1``; neither agrees
    with the exact integral and neither affects the result.
    """
    c, delta = float(c), float(delta)
    if not (c > 0 and delta > 0):
        raise InvalidArgument("need c > 0 and delta > 0")
    S = c / 2.0 + delta
    integral = c * min(S, 1.0) ** 2 + c * max(S - 1.0, 0.0)
    f_end = 2.0 * c * S if S <= 1.0 else c
    residuals = {
        "upper": integral - c * S * S,
        "lower": S * S - integral,
        "pointwise": f_end - 2.0 * S,
    }
    flags = {
        "upper": residuals["upper"] <= 0.0,
        "lower": residuals["lower"] < 0.0,
        "pointwise": residuals["pointwise"] < 0.0,
    }
    failed = [k for k, ok in flags.items() if not ok]
    worst_key = max(residuals, key=residuals.get)
    witness = {
        "S": S,
        "integral": integral,
        "f_at_S": f_end,
        "flags": flags,
        "residuals": residuals,
        "failed": failed,
        "reason": ("all flags hold" if not failed else "failed: " + ", ".join(failed)),
        "alt_integral": 1.5 * c * c + c * delta - c,
        "alt_condition": (c + delta) ** 2 < 1.5 * c * c + c * delta - 1.0,
        "location": worst_key,
    }
    # strict flags fail at a zero residual, so pass is taken from the flags
    return VerificationReport("remark", {"c": c, "delta": delta}, not failed, 0.0,
                              residuals[worst_key], witness)
