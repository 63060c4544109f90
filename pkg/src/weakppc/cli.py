"""Command-line front end.

    weakppc gen     write a point file
    weakppc stat    CSV table of the statistics over an s grid
    weakppc verify  JSON reports: identities | bounds | monotone | covering | remark

Exit status: 0 when everything passed, 1 on a failed check or runtime error,
2 on a usage error.  Any flag may also come from ``--config FILE.json``, a
JSON object keyed by flag name; explicit flags win.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import analysis, oracle
from .errors import InvalidArgument, ScaleOverflow, WeakPPCError
from .metric import pair_aggregate
from .sequences import (GENERATORS, GenSpec, PointSet, atomic_write_text, format_points,
                        format_value, read_points)
from .statistics import i2_closed, max_admissible_s, pcf, pcf_integral, triangle_kernel, window

CSV_COLUMNS = ["s", "F", "two_s", "T", "integral_F", "I2_closed", "I2_sweep"]
ORACLE_COLUMNS = ["F_oracle", "integral_F_oracle", "I2_oracle", "I2_oracle_bound"]


class UsageError(Exception):
    pass


def _floats(text) -> List[float]:
    if text is None:
        return []
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        return [float(v) for v in items if str(v).strip() != ""]
    except ValueError:
        raise UsageError(f"not a list of numbers: {text!r}") from None


def _ints(text) -> List[int]:
    out = []
    for v in _floats(text):
        if v != int(v):
            raise UsageError(f"not an integer: {v!r}")
        out.append(int(v))
    return out


@dataclass
class RunConfig:
    """Everything a command needs, validated before any computation."""

    command: str
    check: Optional[str] = None
    gen: Optional[GenSpec] = None
    n: Optional[int] = None
    input: Optional[str] = None
    beta: Optional[float] = None
    alpha: Optional[float] = None
    s_grid: List[float] = field(default_factory=list)
    ladder: List[int] = field(default_factory=list)
    ks: List[int] = field(default_factory=list)
    tol: Optional[float] = None
    conv_tol: float = 0.05
    c: Optional[float] = None
    delta: Optional[float] = None
    resolution: Optional[int] = None
    oracle: bool = False
    out: str = "-"
    backend: Optional[str] = None

    def points(self) -> PointSet:
        if self.input is not None:
            return read_points(self.input)
        return self.gen.generate(self.n)


def _gen_spec(args, alpha_flag="alpha") -> Optional[GenSpec]:
    kind = getattr(args, "kind", None)
    if kind is None:
        return None
    params = {}
    if kind == "kronecker":
        a = getattr(args, alpha_flag, None)
        if a is None:
            raise UsageError(f"--kind kronecker needs --{alpha_flag.replace('_', '-')}")
        params["alpha"] = float(a)
    elif kind == "vdc":
        params["base"] = int(args.base if args.base is not None else 2)
    elif kind == "multiset":
        if args.m_distinct is None:
            raise UsageError("--kind multiset needs --m-distinct")
        params["m_distinct"] = int(args.m_distinct)
    seed = args.seed
    if kind in ("uniform", "multiset") and seed is None:
        raise UsageError(f"--kind {kind} needs --seed")
    try:
        return GenSpec(kind, params, None if seed is None else int(seed))
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None


def _s_grid(args) -> List[float]:
    explicit = _floats(getattr(args, "s", None))
    if explicit:
        return explicit
    smax = getattr(args, "smax", None)
    if smax is None:
        return []
    steps = int(args.steps)
    if steps < 1:
        raise UsageError("--steps must be >= 1")
    smax = float(smax)
    if args.smin is None:
        return [smax * k / steps for k in range(1, steps + 1)]
    return np.linspace(float(args.smin), smax, steps).tolist()


def build_config(args) -> RunConfig:
    cmd = args.command
    cfg = RunConfig(command=cmd, out=args.out if getattr(args, "out", None) else "-",
                    backend=args.backend)
    if cmd == "gen":
        cfg.gen = _gen_spec(args)
        if cfg.gen is None:
            raise UsageError("gen needs --kind")
        cfg.n = args.n
        if cfg.n is None or cfg.n < 1:
            raise UsageError("gen needs --n >= 1")
        return cfg

    cfg.check = getattr(args, "check", None)
    if cfg.check == "remark":
        if args.c is None or args.delta is None:
            raise UsageError("remark needs --c and --delta")
        cfg.c, cfg.delta = float(args.c), float(args.delta)
        if not (cfg.c > 0 and cfg.delta > 0):
            raise UsageError("need --c > 0 and --delta > 0")
        return cfg

    alpha_flag = "alpha" if cmd == "stat" else "kron_alpha"
    cfg.gen = _gen_spec(args, alpha_flag)
    cfg.input = getattr(args, "input", None)
    cfg.n = getattr(args, "n", None)
    if args.beta is None:
        raise UsageError("--beta is required")
    cfg.beta = float(args.beta)
    if not 0.0 <= cfg.beta <= 1.0:
        raise UsageError("--beta must lie in [0, 1]")
    cfg.s_grid = _s_grid(args)
    if not cfg.s_grid:
        raise UsageError("give --s or --smax")
    if any(s <= 0 for s in cfg.s_grid):
        raise UsageError("s values must be > 0")
    cfg.oracle = bool(getattr(args, "oracle", False))
    cfg.resolution = getattr(args, "resolution", None)
    if getattr(args, "tol", None) is not None:
        cfg.tol = float(args.tol)
    if getattr(args, "conv_tol", None) is not None:
        cfg.conv_tol = float(args.conv_tol)

    if cfg.check in ("bounds", "monotone"):
        if cfg.gen is None:
            raise UsageError(f"{cfg.check} needs a generator (--kind)")
        cfg.ladder = _ints(args.ladder)
        if not cfg.ladder or any(b <= a for a, b in zip(cfg.ladder, cfg.ladder[1:])) or cfg.ladder[0] < 1:
            raise UsageError("--ladder must be increasing positive integers")
        if any(b <= a for a, b in zip(cfg.s_grid, cfg.s_grid[1:])):
            raise UsageError("s grid must be increasing")
    else:
        if (cfg.input is None) == (cfg.gen is None):
            raise UsageError("give exactly one of --input or --kind")
        if cfg.gen is not None and (cfg.n is None or cfg.n < 1):
            raise UsageError("a generated point set needs --n >= 1")

    if cfg.check in ("monotone", "covering") and getattr(args, "alpha", None) is not None:
        cfg.alpha = float(args.alpha)
    if cfg.check == "monotone":
        if cfg.alpha is None:
            raise UsageError("monotone needs --alpha")
    if cfg.alpha is not None and not 0.0 <= cfg.alpha < cfg.beta < 1.0:
        raise UsageError("need 0 <= alpha < beta < 1")
    if cfg.check == "covering":
        cfg.ks = _ints(args.K) or [2]
        if any(k < 2 for k in cfg.ks):
            raise UsageError("--K values must be >= 2")
    return cfg


def _check_scale(n, beta, s_grid):
    s_max = max_admissible_s(n, beta)
    for s in s_grid:
        if s / float(n) ** beta > 0.5:
            raise ScaleOverflow(
                f"s={s!r} exceeds the admissible range for N={n}, beta={beta!r}: "
                f"need s/N^beta <= 1/2, i.e. s <= {s_max!r}", s=s, s_max=s_max)


def _emit(cfg: RunConfig, text: str, stdout) -> None:
    if cfg.out == "-":
        stdout.write(text)
    else:
        atomic_write_text(cfg.out, text)


def run_gen(cfg, stdout, stderr) -> int:
    ps = cfg.gen.generate(cfg.n)
    _emit(cfg, format_points(ps), stdout)
    summary = f"N={ps.n} {ps.meta_text}\n"
    (stderr if cfg.out == "-" else stdout).write(summary)
    return 0


def run_stat(cfg, stdout, stderr) -> int:
    ps = cfg.points()
    _check_scale(ps.n, cfg.beta, cfg.s_grid)
    be = cfg.backend
    header = CSV_COLUMNS + (ORACLE_COLUMNS if cfg.oracle else [])
    lines = [",".join(header)]
    resolution = cfg.resolution or max(10 * ps.n, 100_000)
    for s in cfg.s_grid:
        sm = i2_closed(ps, cfg.beta, s, backend=be)
        row = [s, pcf(ps, cfg.beta, s, backend=be).value, 2.0 * s,
               triangle_kernel(ps, cfg.beta, s, backend=be), pcf_integral(ps, cfg.beta, s, backend=be),
               sm.closed, sm.sweep]
        if cfg.oracle:
            w = window(ps, cfg.beta, s)
            row += [oracle.brute_pair_aggregate(ps, w).count / float(ps.n) ** (2.0 - cfg.beta),
                    oracle.stepwise_pcf_integral(ps, cfg.beta, s),
                    oracle.brute_i2(ps, cfg.beta, s, resolution),
                    oracle.brute_i2_error_bound(ps, cfg.beta, s, resolution)]
        lines.append(",".join(format_value(float(v)) for v in row))
    _emit(cfg, "\n".join(lines) + "\n", stdout)
    return 0


def _identity_reports(cfg, ps):
    reports = []
    be = cfg.backend
    for s in cfg.s_grid:
        sm = i2_closed(ps, cfg.beta, s, backend=be)
        viol = sm.discrepancy / max(1.0, abs(sm.closed))
        reports.append(analysis.VerificationReport(
            "identity_i2", {"n": ps.n, "beta": cfg.beta, "s": s}, viol <= 1e-9, 1e-9, viol,
            {"I2_closed": sm.closed, "I2_sweep": sm.sweep}))
        if cfg.oracle:
            fast = pcf_integral(ps, cfg.beta, s, backend=be)
            slow = oracle.stepwise_pcf_integral(ps, cfg.beta, s)
            viol = abs(fast - slow)
            reports.append(analysis.VerificationReport(
                "identity_integral", {"n": ps.n, "beta": cfg.beta, "s": s}, viol <= 1e-12, 1e-12, viol,
                {"integral_F": fast, "stepwise": slow}))
            w = window(ps, cfg.beta, s)
            a, b = pair_aggregate(ps, w, backend=be), oracle.brute_pair_aggregate(ps, w)
            if a.count == b.count:
                viol = abs(a.dist_sum - b.dist_sum) / max(abs(b.dist_sum), 1e-300)
            else:  # a count mismatch is reported as the number of pairs off
                viol = float(abs(a.count - b.count))
            reports.append(analysis.VerificationReport(
                "oracle_pairs", {"n": ps.n, "r": w}, viol <= 1e-12, 1e-12, viol,
                {"count": a.count, "count_oracle": b.count,
                 "dist_sum": a.dist_sum, "dist_sum_oracle": b.dist_sum}))
    return reports


def run_verify(cfg, stdout, stderr) -> int:
    check = cfg.check
    if check == "remark":
        reports = [analysis.remark_example(cfg.c, cfg.delta)]
    elif check in ("identities", "covering"):
        ps = cfg.points()
        _check_scale(ps.n, cfg.alpha if cfg.alpha is not None else cfg.beta, cfg.s_grid)
        if check == "identities":
            reports = _identity_reports(cfg, ps)
        else:
            reports = []
            for s in cfg.s_grid:
                reports += [analysis.check_covering_inequality(ps, cfg.beta, s, k) for k in cfg.ks]
                reports.append(analysis.check_cauchy_schwarz(ps, cfg.beta, s))
                if cfg.alpha is not None:
                    reports.append(analysis.check_alpha_beta_inequality(ps, cfg.alpha, cfg.beta, s))
    elif check == "bounds":
        _check_scale(cfg.ladder[0], cfg.beta, cfg.s_grid)
        le = analysis.estimate_limit(cfg.gen, cfg.beta, cfg.s_grid, cfg.ladder, cfg.conv_tol)
        reports = [analysis.check_bounds(le, 0.1 if cfg.tol is None else cfg.tol)]
    else:  # monotone
        _check_scale(cfg.ladder[0], cfg.alpha, cfg.s_grid)
        le_a = analysis.estimate_limit(cfg.gen, cfg.alpha, cfg.s_grid, cfg.ladder, cfg.conv_tol)
        le_b = analysis.estimate_limit(cfg.gen, cfg.beta, cfg.s_grid, cfg.ladder, cfg.conv_tol)
        reports = [analysis.check_monotone(le_a, le_b, 0.05 if cfg.tol is None else cfg.tol)]
    payload = [r.to_json_dict() for r in reports]
    _emit(cfg, json.dumps(payload, indent=2, allow_nan=False) + "\n", stdout)
    failed = [r for r in reports if not r.passed]
    for r in failed:
        stderr.write(f"FAIL {r.check} {json.dumps(r.to_json_dict()['params'])} "
                     f"worst_violation={r.worst_violation!r} tolerance={r.tolerance!r}\n")
    return 1 if failed else 0


def _add_gen_flags(p, alpha_flag="--alpha"):
    p.add_argument("--kind", choices=GENERATORS)
    p.add_argument("--seed", type=int)
    p.add_argument(alpha_flag, type=float, help="Kronecker rotation")
    p.add_argument("--base", type=int, help="van der Corput base (default 2)")
    p.add_argument("--m-distinct", type=int)


def _add_grid_flags(p):
    p.add_argument("--s", help="comma-separated s values")
    p.add_argument("--smin", type=float)
    p.add_argument("--smax", type=float)
    p.add_argument("--steps", type=int, default=20)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakppc", description=__doc__.splitlines()[1].strip(),
                                     allow_abbrev=False)
    parser.add_argument("--config", help="JSON file of flag defaults")
    parser.add_argument("--backend", choices=["cython", "python"], help="kernel backend")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a point file", allow_abbrev=False)
    _add_gen_flags(g)
    g.add_argument("--n", type=int)
    g.add_argument("--out", default="-")

    st = sub.add_parser("stat", help="CSV of statistics over an s grid", allow_abbrev=False)
    st.add_argument("--input")
    _add_gen_flags(st)
    st.add_argument("--n", type=int)
    st.add_argument("--beta", type=float)
    _add_grid_flags(st)
    st.add_argument("--oracle", action="store_true", help="add brute-force columns")
    st.add_argument("--resolution", type=int, help="quadrature cells for the I2 oracle")
    st.add_argument("--out", default="-")

    ver = sub.add_parser("verify", help="JSON verification reports", allow_abbrev=False)
    vsub = ver.add_subparsers(dest="check", required=True)
    for name in ("identities", "bounds", "monotone", "covering", "remark"):
        p = vsub.add_parser(name, allow_abbrev=False)
        p.add_argument("--out", default="-")
        if name == "remark":
            p.add_argument("--c", type=float)
            p.add_argument("--delta", type=float)
            continue
        _add_gen_flags(p, "--kron-alpha")
        p.add_argument("--beta", type=float)
        _add_grid_flags(p)
        if name in ("identities", "covering"):
            p.add_argument("--input")
            p.add_argument("--n", type=int)
        if name in ("bounds", "monotone"):
            p.add_argument("--ladder", help="comma-separated N values, e.g. 1e3,1e4,1e5")
            p.add_argument("--tol", type=float)
            p.add_argument("--conv-tol", type=float)
        if name in ("monotone", "covering"):
            p.add_argument("--alpha", type=float, help="the smaller scaling parameter")
        if name == "covering":
            p.add_argument("--K", help="comma-separated K values (default 2)")
        if name == "identities":
            p.add_argument("--oracle", action="store_true")
    return parser


def _apply_config(parser, path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    defaults = {str(k).lstrip("-").replace("-", "_"): v for k, v in data.items()}
    stack = [parser]
    while stack:
        p = stack.pop()
        p.set_defaults(**defaults)
        for action in p._actions:
            if isinstance(action, argparse._SubParsersAction):
                stack.extend(action.choices.values())


RUNNERS = {"gen": run_gen, "stat": run_stat, "verify": run_verify}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, known.config)
        args = parser.parse_args(argv)
        cfg = build_config(args)
    except UsageError as exc:
        stderr.write(f"weakppc: usage error: {exc}\n")
        return 2
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    try:
        return RUNNERS[cfg.command](cfg, stdout, stderr)
    except ScaleOverflow as exc:
        stderr.write(f"weakppc: scale overflow: {exc}\n")
        return 1
    except (WeakPPCError, OSError) as exc:
        stderr.write(f"weakppc: error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
