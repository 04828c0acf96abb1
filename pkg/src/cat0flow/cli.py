"""Scenario-driven command line front end.

Subcommands: flow, pursue, barycenter, check, convergence, resolve.
A scenario is one JSON document; outputs are a trajectory CSV (17
significant digits) plus a sorted-key JSON report, so identical inputs
produce byte-identical files. Exit codes: 0 ok, 2 configuration or
admissibility problem, 3 contract violation, 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import checks as checks_mod
from . import flow as flow_mod
from . import pursuit as pursuit_mod
from .errors import Cat0FlowError, ConfigError, ContractError, SolverError
from .functionals import functional_from_spec
from .geometry import point_from_spec, point_to_spec, space_from_spec
from .oracles import convergence_order, oracle_resolve
from .resolvent import check_step, resolve, step_energy

__all__ = ["main"]


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _check_fields(obj, context: str, required, optional=()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{context}: expected a mapping, got {type(obj).__name__}")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{context}.{key}: unknown field")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{context}.{key}: required field is missing")


def _number(obj, key: str, context: str, default=None, positive=False, nonnegative=False):
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{context}.{key}: expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{context}.{key}: must be finite")
    if positive and v <= 0.0:
        raise ConfigError(f"{context}.{key}: must be positive, got {v}")
    if nonnegative and v < 0.0:
        raise ConfigError(f"{context}.{key}: must be nonnegative, got {v}")
    return v


def _integer(obj, key: str, context: str, default=None, minimum=None):
    if key not in obj:
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{context}.{key}: expected an integer, got {type(v).__name__}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{context}.{key}: must be >= {minimum}, got {v}")
    return v


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("config: top level must be a mapping")
    return obj


def _write_report(report: dict, outdir: str, name: str = "report.json") -> str:
    path = os.path.join(outdir, name)
    with open(path, "w", encoding="utf8", newline="") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def _outdir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def cmd_flow(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(cfg, "config", ("space", "functional", "x0", "horizon", "scheme"), ("t0", "record_every"))
    space = space_from_spec(cfg["space"], "space")
    f = functional_from_spec(space, cfg["functional"], "functional")
    x0 = point_from_spec(space, cfg["x0"], "x0")
    t0 = _number(cfg, "t0", "config", default=0.0)
    horizon = _number(cfg, "horizon", "config", positive=True)
    scheme = flow_mod.scheme_from_spec(cfg["scheme"], "scheme")
    record_every = _integer(cfg, "record_every", "config", default=1, minimum=1)

    traj = flow_mod.time_dependent_curve(f, t0, x0, horizon, scheme, record_every=record_every)
    outdir = _outdir(args)
    csv_path = os.path.join(outdir, "trajectory.csv")
    flow_mod.write_trajectory_csv(f, traj, csv_path)
    report = flow_mod.run_report(f, traj)
    report["outputs"] = {"trajectory_csv": "trajectory.csv"}
    report_path = _write_report(report, outdir)
    term = traj.termination
    print(f"flow: {term.kind} at t={_fmt(term.time)} ({len(traj.times)} samples)")
    print(f"wrote {csv_path} and {report_path}")
    return 0


def cmd_pursue(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(cfg, "config", ("space", "target", "x0", "horizon", "scheme"), ("t0", "capture_eps", "record_every"))
    space = space_from_spec(cfg["space"], "space")
    target = pursuit_mod.target_from_spec(space, cfg["target"], "target")
    x0 = point_from_spec(space, cfg["x0"], "x0")
    t0 = _number(cfg, "t0", "config", default=0.0)
    horizon = _number(cfg, "horizon", "config", positive=True)
    scheme = flow_mod.scheme_from_spec(cfg["scheme"], "scheme")
    capture_eps = _number(cfg, "capture_eps", "config", positive=True)
    record_every = _integer(cfg, "record_every", "config", default=1, minimum=1)

    traj, report = pursuit_mod.pursue(
        target, x0, t0 + horizon, scheme, capture_eps=capture_eps, t0=t0, record_every=record_every
    )
    return _emit_pursuit("pursue", traj, report, args)


def cmd_barycenter(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(cfg, "config", ("space", "evaders", "x0", "horizon", "scheme"), ("t0", "capture_eps", "record_every"))
    space = space_from_spec(cfg["space"], "space")
    evaders = pursuit_mod.evaders_from_spec(space, cfg["evaders"], "evaders")
    x0 = point_from_spec(space, cfg["x0"], "x0")
    t0 = _number(cfg, "t0", "config", default=0.0)
    horizon = _number(cfg, "horizon", "config", positive=True)
    scheme = flow_mod.scheme_from_spec(cfg["scheme"], "scheme")
    capture_eps = _number(cfg, "capture_eps", "config", positive=True)
    record_every = _integer(cfg, "record_every", "config", default=1, minimum=1)

    traj, report = pursuit_mod.pursue_barycenter(
        evaders, x0, t0 + horizon, scheme, capture_eps=capture_eps, t0=t0, record_every=record_every
    )
    return _emit_pursuit("barycenter", traj, report, args)


def _emit_pursuit(label: str, traj, report: dict, args) -> int:
    outdir = _outdir(args)
    csv_path = os.path.join(outdir, "trajectory.csv")
    pursuit_mod.write_pursuit_csv(traj, csv_path)
    report["outputs"] = {"trajectory_csv": "trajectory.csv"}
    report_path = _write_report(report, outdir)
    term = traj.termination
    gap = traj.gaps[-1] if traj.gaps else float("nan")
    print(f"{label}: {term.kind} at t={_fmt(term.time)}, final gap {_fmt(gap)}")
    if report.get("flags"):
        print("flags: " + "; ".join(report["flags"]))
    print(f"wrote {csv_path} and {report_path}")
    return 0


def cmd_check(args) -> int:
    names = args.suites or ["all"]
    samples = None
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError(f"--samples: must be >= 1, got {args.samples}")
        chosen = list(checks_mod.SUITES) if names == ["all"] else names
        samples = {name: args.samples for name in chosen}
    try:
        results = checks_mod.run_suites(names, seed=args.seed, jobs=args.jobs, samples=samples)
    except KeyError as exc:
        raise ConfigError(f"check: unknown suite {exc.args[0]!r}; choose from {', '.join(checks_mod.SUITES)}") from None
    failures = [r for r in results if not r["pass"]]
    report = {
        "seed": args.seed,
        "suites": names,
        "results": results,
        "failures": len(failures),
    }
    out = json.dumps(report, sort_keys=True, indent=1)
    print(out)
    if args.out:
        _write_report(report, _outdir(args), "check_report.json")
    if failures:
        worst = min(failures, key=lambda r: r["worst_slack"])
        print(f"check: {len(failures)} invariant(s) failed; worst {worst['invariant']} "
              f"slack {_fmt(worst['worst_slack'])}", file=sys.stderr)
        return 3
    return 0


def cmd_convergence(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(cfg, "config", ("space", "functional", "x0", "horizon"), ("t0", "levels", "m"))
    space = space_from_spec(cfg["space"], "space")
    f = functional_from_spec(space, cfg["functional"], "functional")
    x0 = point_from_spec(space, cfg["x0"], "x0")
    t0 = _number(cfg, "t0", "config", default=0.0)
    horizon = _number(cfg, "horizon", "config", positive=True)
    m = _integer(cfg, "m", "config", default=8, minimum=1)
    levels = cfg.get("levels", list(range(4, 9)))
    if (
        not isinstance(levels, list)
        or not levels
        or any(isinstance(n, bool) or not isinstance(n, int) or n < 0 for n in levels)
    ):
        raise ConfigError("config.levels: expected a nonempty list of nonnegative integers")
    levels = sorted(set(levels))

    rows = flow_mod.refinement_study(f, t0, x0, horizon, levels, m=m)
    lines = ["n,measured,predicted,ratio"]
    prev = None
    for row in rows:
        ratio = row["measured"] / prev if prev not in (None, 0.0) else float("nan")
        lines.append(f"{row['n']},{_fmt(row['measured'])},{_fmt(row['predicted'])},{_fmt(ratio)}")
        prev = row["measured"]
    outdir = _outdir(args)
    csv_path = os.path.join(outdir, "convergence.csv")
    with open(csv_path, "w", encoding="utf8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")

    pairs = [(horizon / 2.0 ** row["n"], row["measured"]) for row in rows if row["measured"] > 0.0]
    fitted = convergence_order(pairs) if len(pairs) >= 3 else None
    report = {
        "levels": levels,
        "m": m,
        "rows": rows,
        "fitted_order": fitted,
        "within_bound": all(row["measured"] <= row["predicted"] for row in rows),
        "outputs": {"table_csv": "convergence.csv"},
    }
    report_path = _write_report(report, outdir)
    shown = "n/a" if fitted is None else _fmt(fitted)
    print(f"convergence: fitted order {shown} over levels {levels[0]}..{levels[-1]}")
    print(f"wrote {csv_path} and {report_path}")
    return 0


def cmd_resolve(args) -> int:
    cfg = _load_config(args.config)
    _check_fields(cfg, "config", ("space", "functional", "x0", "h"), ("t0", "oracle_pitch"))
    space = space_from_spec(cfg["space"], "space")
    f = functional_from_spec(space, cfg["functional"], "functional")
    x0 = point_from_spec(space, cfg["x0"], "x0")
    t0 = _number(cfg, "t0", "config", default=0.0)
    h = _number(cfg, "h", "config", positive=True)
    pitch = _number(cfg, "oracle_pitch", "config", positive=True)
    check_step(f, h)

    y = resolve(f, t0, x0, h)
    report = {
        "t0": t0,
        "h": h,
        "x0": point_to_spec(space, x0),
        "point": point_to_spec(space, y),
        "moved": space.distance(x0, y),
        "value_before": f.eval_fn(t0, x0),
        "value_after": f.eval_fn(t0, y),
        "step_energy": step_energy(f, t0, x0, h)(y),
        "functional": f.describe(),
        "space": space.describe(),
    }
    if pitch is not None:
        ref = oracle_resolve(f, t0, x0, h, pitch=pitch)
        report["oracle"] = {"point": point_to_spec(space, ref), "gap": space.distance(y, ref), "pitch": pitch}
    out = json.dumps(report, sort_keys=True, indent=1)
    print(out)
    if args.out:
        _write_report(report, _outdir(args), "resolve_report.json")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cat0flow",
        description="Gradient curves of convex functionals on CAT(0) spaces: run, pursue, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="path to the scenario JSON document")
        p.add_argument("--out", default=None, help="output directory (default: current directory)")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for suite members")

    p = sub.add_parser("flow", help="integrate a gradient curve and write trajectory + report")
    add_common(p)
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("pursue", help="chase a moving convex target")
    add_common(p)
    p.set_defaults(fn=cmd_pursue)

    p = sub.add_parser("barycenter", help="chase the barycenter curve of moving evaders")
    add_common(p)
    p.set_defaults(fn=cmd_barycenter)

    p = sub.add_parser("check", help="run sampled invariant suites")
    p.add_argument("suites", nargs="*", help="suite names (default: all); see --list")
    p.add_argument("--list", action="store_true", help="list available suites and exit")
    p.add_argument("--samples", type=int, default=None, help="override per-suite sample count")
    add_common(p, config_required=False)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("convergence", help="dyadic refinement study: measured vs predicted decay")
    add_common(p)
    p.set_defaults(fn=cmd_convergence)

    p = sub.add_parser("resolve", help="spot-evaluate one proximal step")
    add_common(p)
    p.set_defaults(fn=cmd_resolve)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "check" and args.list:
        for name in checks_mod.SUITES:
            print(name)
        return 0
    try:
        return args.fn(args)
    except ContractError as exc:
        print(f"error: contract violation: {exc}", file=sys.stderr)
        return 3
    except SolverError as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return 4
    except Cat0FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
