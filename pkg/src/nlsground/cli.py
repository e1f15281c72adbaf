"""Command-line surface: check / solve / sweep / oracle.

Configuration comes from an optional dotted-key text file plus flags
(flags win).  Every run writes the fully resolved configuration next to
its outputs so results are reproducible from their own artifacts.

Exit codes: 0 ok, 2 not converged, 3 nonconformance, 4 hypothesis fail,
5 inconclusive, 6 verdict fail, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .grid import ConfigurationError, make_grid
from .nonlinearity import builtin, check_conditions, from_callables
from .functional import NonconformanceError
from .optimizer import DiagnosticError, SolveOptions, multistart_minimize
from .sweep import mountain_pass_floor, sweep
from .oracles import Bubble, OracleTable, Soliton1D, gn_check
from .expressions import ExpressionError, compile_expression

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_NONCONFORMANCE = 3
EXIT_HYPOTHESIS_FAIL = 4
EXIT_INCONCLUSIVE = 5
EXIT_VERDICT_FAIL = 6
EXIT_USAGE = 64

# exit-code battery for `check`: the standing hypotheses of the theory;
# f6/f6'/f7/odd are reported but do not drive the exit code
_CHECK_BATTERY = ("f0", "f1", "f2", "f3", "f4", "f5")


class UsageError(ValueError):
    pass


def parse_config_file(path: str) -> dict:
    """Read `key = value` lines with dotted keys; '#' starts a comment."""
    cfg = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def dump_config(cfg: dict) -> str:
    return "".join(f"{k} = {cfg[k]}\n" for k in sorted(cfg))


def _set_if(cfg, key, value):
    if value is not None:
        cfg[key] = str(value)


def resolve_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config))
    _set_if(cfg, "problem.dim", getattr(args, "dim", None))
    _set_if(cfg, "problem.builtin", getattr(args, "builtin", None))
    for kv in getattr(args, "param", None) or []:
        if "=" not in kv:
            raise UsageError(f"--param expects name=value, got {kv!r}")
        name, value = kv.split("=", 1)
        cfg[f"problem.param.{name.strip()}"] = value.strip()
    _set_if(cfg, "problem.f_expr", getattr(args, "f_expr", None))
    _set_if(cfg, "problem.F_expr", getattr(args, "F_expr", None))
    _set_if(cfg, "grid.radius", getattr(args, "radius", None))
    _set_if(cfg, "grid.points", getattr(args, "points", None))
    _set_if(cfg, "grid.stretch", getattr(args, "stretch", None))
    _set_if(cfg, "solve.mass", getattr(args, "mass", None))
    _set_if(cfg, "solve.masses", getattr(args, "masses", None))
    _set_if(cfg, "solve.seed", getattr(args, "seed", None))
    _set_if(cfg, "solve.restarts", getattr(args, "restarts", None))
    _set_if(cfg, "solve.cold_restarts", getattr(args, "cold_restarts", None))
    _set_if(cfg, "solve.max_iters", getattr(args, "max_iters", None))
    _set_if(cfg, "solve.grad_tol", getattr(args, "grad_tol", None))
    _set_if(cfg, "solve.absify_every", getattr(args, "absify_every", None))
    _set_if(cfg, "output.dir", getattr(args, "out", None))
    _set_if(cfg, "threads", getattr(args, "threads", None))
    if getattr(args, "force", False):
        cfg["solve.force"] = "true"
    return cfg


def build_nonlinearity(cfg: dict, N: int):
    name = cfg.get("problem.builtin")
    if name:
        params = {}
        for key, value in cfg.items():
            if key.startswith("problem.param."):
                params[key.split(".", 2)[2]] = float(value)
        return builtin(name, N, **params)
    f_expr, F_expr = cfg.get("problem.f_expr"), cfg.get("problem.F_expr")
    if f_expr and F_expr:
        f = compile_expression(f_expr)
        F = compile_expression(F_expr)
        return from_callables("user", f, F, params={"N": N})
    raise UsageError("need --builtin NAME or both --f-expr and --F-expr")


def build_grid(cfg: dict, N: int):
    R = float(cfg.get("grid.radius", 30.0))
    K = int(cfg.get("grid.points", 2001))
    stretch = cfg.get("grid.stretch")
    return make_grid(N, R, K, stretch=float(stretch) if stretch else None)


def build_options(cfg: dict, mass: float) -> SolveOptions:
    return SolveOptions(
        mass=mass,
        max_iters=int(cfg.get("solve.max_iters", 4000)),
        grad_tol=float(cfg.get("solve.grad_tol", 1e-8)),
        seed=int(cfg.get("solve.seed", 0)),
        noise=float(cfg.get("solve.noise", 0.0)),
        init_width=float(cfg.get("solve.init_width", 1.0)),
        absify_every=int(cfg.get("solve.absify_every", 0)),
        pde_tol=float(cfg.get("solve.pde_tol", 1e-5)),
        pohozaev_tol=float(cfg.get("solve.pohozaev_tol", 1e-6)),
        check_hypotheses=cfg.get("solve.force", "false").lower() != "true",
    )


def _outdir(cfg: dict) -> str:
    out = cfg.get("output.dir", "runs/latest")
    os.makedirs(out, exist_ok=True)
    return out


def _write(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def cmd_check(args) -> int:
    cfg = resolve_config(args)
    if "problem.dim" not in cfg:
        raise UsageError("check requires --dim")
    N = int(cfg["problem.dim"])
    nl = build_nonlinearity(cfg, N)
    report = check_conditions(nl, N)
    out = _outdir(cfg)
    _write(os.path.join(out, "conditions.json"), report.to_json(indent=2) + "\n")
    _write(os.path.join(out, "resolved.cfg"), dump_config(cfg))
    battery = {h: report.verdict(h) for h in _CHECK_BATTERY}
    print(f"{nl.name} N={N}: " + " ".join(f"{h}={v}" for h, v in battery.items()))
    extra = {h: report.verdict(h) for h in ("f6", "f6p", "f7", "odd")}
    print("informational: " + " ".join(f"{h}={v}" for h, v in extra.items()))
    if any(v == "fail" for v in battery.values()):
        return EXIT_HYPOTHESIS_FAIL
    if any(v == "inconclusive" for v in battery.values()):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = resolve_config(args)
    if "problem.dim" not in cfg or "solve.mass" not in cfg:
        raise UsageError("solve requires --dim and --mass")
    N = int(cfg["problem.dim"])
    mass = float(cfg["solve.mass"])
    nl = build_nonlinearity(cfg, N)
    grid = build_grid(cfg, N)
    opts = build_options(cfg, mass)
    restarts = int(cfg.get("solve.restarts", 5))
    threads = int(cfg.get("threads", 1))
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        best, reports = multistart_minimize(grid, nl, opts, restarts=restarts,
                                            executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()
    out = _outdir(cfg)
    _write(os.path.join(out, "resolved.cfg"), dump_config(cfg))
    best.profile.to_csv(os.path.join(out, "profile.csv"))
    payload = best.as_dict()
    payload["replicas"] = [r.as_dict(with_trace=False) for r in reports]
    _write(os.path.join(out, "report.json"), _json(payload))
    print(f"E={best.energy:.12g} mu={best.multiplier:.12g} "
          f"converged={best.converged} iters={best.iterations}")
    return EXIT_OK if best.converged else EXIT_NOT_CONVERGED


def _parse_masses(text: str):
    if ":" in text:
        lo, hi, n = text.split(":")
        return list(np.geomspace(float(lo), float(hi), int(n)))
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    if "problem.dim" not in cfg or "solve.masses" not in cfg:
        raise UsageError("sweep requires --dim and --masses")
    N = int(cfg["problem.dim"])
    masses = _parse_masses(cfg["solve.masses"])
    nl = build_nonlinearity(cfg, N)
    grid = build_grid(cfg, N)
    opts = build_options(cfg, masses[0])
    cold = int(cfg.get("solve.cold_restarts", 0))
    threads = int(cfg.get("threads", 1))
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        result = sweep(grid, nl, masses, opts, cold_restarts=cold,
                       executor=executor)
    finally:
        if executor is not None:
            executor.shutdown()
    if getattr(args, "test_perturb_energies", None):
        # test hook: bump alternating energies to exercise the verdict logic
        amp = float(args.test_perturb_energies)
        bump = np.ones(result.energies.size)
        bump[1::2] += amp
        result.energies = result.energies * bump
        from .sweep import _verdicts
        ok = ~np.isnan(result.energies)
        result.verdicts = _verdicts(result.masses[ok], result.energies[ok],
                                    result.multipliers[ok], result.converged[ok])
    out = _outdir(cfg)
    _write(os.path.join(out, "resolved.cfg"), dump_config(cfg))
    result.to_csv(os.path.join(out, "sweep.csv"))
    payload = result.as_dict()
    try:
        payload["mountain_pass_floor"] = mountain_pass_floor(grid, nl)
    except NonconformanceError:
        pass
    _write(os.path.join(out, "verdicts.json"), _json(payload))
    print("E_m:", result.sparkline())
    v = result.verdicts
    print(f"positive={v['all_positive']} nonincreasing={v['nonincreasing']['verdict']} "
          f"strict={v['strictly_decreasing']['verdict']} "
          f"blowup_slope={v['small_mass_blowup']['slope']}")
    claimed_ok = (
        v["all_positive"]
        and v["nonincreasing"]["verdict"]
        and v["strictly_decreasing"]["verdict"]
        and v["positive_multipliers"]
    )
    return EXIT_OK if claimed_ok else EXIT_VERDICT_FAIL


def cmd_oracle(args) -> int:
    case = args.case
    if case == "soliton":
        table = Soliton1D(args.p or 8.0, args.mu or 1.0).table()
    elif case == "bubble":
        if args.dim is None:
            raise UsageError("oracle --case bubble requires --dim")
        eps = args.eps if args.eps is not None else Bubble.minimal_mass(args.dim) \
            / Bubble(args.dim, 1.0).unit_mass
        table = Bubble(args.dim, eps).table()
    elif case == "gn":
        if args.dim is None or args.p is None:
            raise UsageError("oracle --case gn requires --dim and --p")
        table = OracleTable(
            case="gagliardo_nirenberg",
            params={"N": args.dim, "p": args.p},
            values={"best_constant_estimate": gn_check(args.dim, args.p)},
            error_bounds={},
        )
    else:
        raise UsageError(f"unknown oracle case {case!r}")
    cfg = resolve_config(args)
    out = _outdir(cfg)
    _write(os.path.join(out, "oracle.json"), _json(table.as_dict()))
    print(json.dumps(table.values, sort_keys=True))
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="dotted-key config file")
    p.add_argument("--dim", type=int, help="spatial dimension N")
    p.add_argument("--builtin", help="builtin nonlinearity name")
    p.add_argument("--param", action="append",
                   help="nonlinearity parameter name=value (repeatable)")
    p.add_argument("--f-expr", dest="f_expr", help="expression for f(t)")
    p.add_argument("--F-expr", dest="F_expr", help="expression for F(t)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="base random seed")
    p.add_argument("--threads", type=int, help="worker threads")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nlsground",
        description="Normalized ground states of -Delta u = f(u) - mu u "
                    "with prescribed mass, via Pohozaev fiber projection.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="certify hypotheses f0-f7 numerically")
    _add_common(c)

    s = sub.add_parser("solve", help="compute the ground state at one mass")
    _add_common(s)
    s.add_argument("--mass", type=float)
    s.add_argument("--radius", type=float)
    s.add_argument("--points", type=int)
    s.add_argument("--stretch", type=float)
    s.add_argument("--restarts", type=int)
    s.add_argument("--max-iters", dest="max_iters", type=int)
    s.add_argument("--grad-tol", dest="grad_tol", type=float)
    s.add_argument("--absify-every", dest="absify_every", type=int)
    s.add_argument("--force", action="store_true",
                   help="skip the hypothesis gate")

    w = sub.add_parser("sweep", help="sweep E_m over a mass grid")
    _add_common(w)
    w.add_argument("--masses", help="lo:hi:n (log-spaced) or comma list")
    w.add_argument("--radius", type=float)
    w.add_argument("--points", type=int)
    w.add_argument("--stretch", type=float)
    w.add_argument("--cold-restarts", dest="cold_restarts", type=int)
    w.add_argument("--max-iters", dest="max_iters", type=int)
    w.add_argument("--grad-tol", dest="grad_tol", type=float)
    w.add_argument("--force", action="store_true")
    w.add_argument("--test-perturb-energies", dest="test_perturb_energies",
                   help=argparse.SUPPRESS)

    o = sub.add_parser("oracle", help="emit closed-form reference tables")
    _add_common(o)
    o.add_argument("--case", required=True, choices=["soliton", "bubble", "gn"])
    o.add_argument("--p", type=float)
    o.add_argument("--mu", type=float)
    o.add_argument("--eps", type=float)

    return ap


_COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, ExpressionError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonconformanceError as exc:
        print(f"nonconformance: {exc}", file=sys.stderr)
        return EXIT_NONCONFORMANCE
    except DiagnosticError as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        if exc.iterate is not None:
            exc.iterate.to_csv("diagnostic_iterate.csv")
            print("iterate dumped to diagnostic_iterate.csv", file=sys.stderr)
        return EXIT_NONCONFORMANCE


if __name__ == "__main__":
    sys.exit(main())
