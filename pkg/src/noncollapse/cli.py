"""Batch entry point: certify / oracle / flow / report subcommands.

Outputs are machine readable (JSON reports, CSV time series) and, for fixed
(config, seed, version), byte-identical across reruns; manifest.json is the
one exception since it records wall time.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .errors import ConvexityLost
from .flow import FlowConfig, run as run_flow, build_speed
from .monitor import monitor_rows, run_verdicts, write_monitor_csv
from .oracle import boundary_suite, interior_suite, worker_count
from .speeds import certify, parse_speed
from . import geometry

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_CONVEXITY = 3
EXIT_VERDICT_FAIL = 4


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


@dataclass
class RunManifest:
    command: str
    config: Optional[str]
    seed: int
    out_dir: str
    version: str
    wall_time_s: Optional[float] = None

    def write(self, path: str) -> None:
        _write_json(path, {
            "command": self.command, "config": self.config, "seed": self.seed,
            "output_directory": self.out_dir, "tool_version": self.version,
            "wall_time_s": self.wall_time_s,
        })


def _emit(obj: dict, out: Optional[str], filename: str,
          volatile: tuple = ("runtime_ms",)) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))
    if out:
        os.makedirs(out, exist_ok=True)
        stable = {k: v for k, v in obj.items() if k not in volatile}
        _atomic_write(os.path.join(out, filename),
                      json.dumps(stable, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_certify(args) -> int:
    try:
        f = parse_speed(args.speed, args.n)
    except (ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    props = [args.property] if args.property else ["concave", "inverse-concave"]
    reports = [certify(f, p, trials=args.trials, seed=args.seed) for p in props]
    payload = {"speed": f.name, "n": f.n, "seed": args.seed,
               "reports": [r.to_dict() for r in reports]}
    _emit(payload, args.out, "certify.json")
    return EXIT_OK if all(r.certified for r in reports) else EXIT_REFUTED


def cmd_oracle(args) -> int:
    try:
        f = parse_speed(args.speed, args.n)
    except (ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.prop == "2.2":
        report = interior_suite(f, trials=args.trials, seed=args.seed)
    else:
        report = boundary_suite(f, trials=args.trials, seed=args.seed)
    report["seed"] = args.seed
    _emit(report, args.out, "oracle.json")
    return EXIT_OK if report["min_scaled"] >= -1.0 else EXIT_REFUTED


def cmd_flow(args) -> int:
    try:
        cfg = FlowConfig.from_json(args.config)
        if args.grid:
            cfg.body = dict(cfg.body, N=args.grid)
        if args.cfl:
            cfg.cfl = args.cfl
        if args.stop_max_f:
            cfg.stop_max_f = args.stop_max_f
        if args.seed is not None:
            cfg.seed = args.seed
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        print(f"error: bad config: {e}", file=sys.stderr)
        return EXIT_USAGE

    out = args.out or "run-out"
    os.makedirs(out, exist_ok=True)
    os.makedirs(os.path.join(out, "snapshots"), exist_ok=True)
    t0 = time.perf_counter()
    manifest = RunManifest(command="flow", config=args.config, seed=cfg.seed,
                           out_dir=out, version=__version__)
    manifest.write(os.path.join(out, "manifest.json"))

    try:
        fr = run_flow(cfg)
    except ConvexityLost as e:
        print(f"error: {e}", file=sys.stderr)
        manifest.wall_time_s = round(time.perf_counter() - t0, 3)
        manifest.write(os.path.join(out, "manifest.json"))
        return EXIT_CONVEXITY

    speed = build_speed(cfg.speed, fr.snapshots[0].mode)
    rows = monitor_rows(fr, speed, fields=(cfg.monitor == "full"))
    write_monitor_csv(rows, os.path.join(out, "monitor.csv"))
    for i, body in enumerate(fr.snapshots):
        _write_json(os.path.join(out, "snapshots", f"{i:05d}.json"), body.to_dict())

    deltas = {}
    if cfg.monitor == "full":
        deltas = refinement_deltas(cfg, speed)
    verdicts = run_verdicts(
        fr, rows,
        refinement_delta_ratio_lower=deltas.get("ratio_lower", 0.0),
        refinement_delta_radii_ratio=deltas.get("radii_ratio", 0.0))
    verdicts["config"] = cfg.to_dict()
    verdicts["refinement_deltas"] = deltas
    _write_json(os.path.join(out, "verdicts.json"), verdicts)

    manifest.wall_time_s = round(time.perf_counter() - t0, 3)
    manifest.write(os.path.join(out, "manifest.json"))

    if fr.termination == "ConvexityLost":
        return EXIT_CONVEXITY
    return EXIT_OK if verdicts["passed"] else EXIT_VERDICT_FAIL


def refinement_deltas(cfg: FlowConfig, speed) -> dict:
    """Measured t=0 discretisation deltas between N and the nested 2N grid
    (2N-1 points in axisymmetric mode so the theta grids nest)."""
    from .flow import build_body
    from .monitor import ratios as ratios_of

    body_n = build_body(cfg.body)
    n2 = 2 * body_n.N if body_n.mode == geometry.CURVE else 2 * body_n.N - 1
    body_2n = build_body(dict(cfg.body, N=n2))

    def measure(b):
        fld = geometry.ball_curvature_field(b)
        ext = ratios_of(b, fld, speed)
        rep = geometry.radii(b)
        return ext.min_ratio_lower, rep.r_plus / rep.r_minus

    lo_n, rr_n = measure(body_n)
    lo_2n, rr_2n = measure(body_2n)
    return {"ratio_lower": abs(lo_n - lo_2n), "radii_ratio": abs(rr_n - rr_2n),
            "grids": [body_n.N, n2]}


def cmd_report(args) -> int:
    rows = []
    for d in args.run_dirs:
        mpath = os.path.join(d, "manifest.json")
        vpath = os.path.join(d, "verdicts.json")
        if not os.path.exists(mpath):
            print(f"warning: {d}: no manifest, skipping", file=sys.stderr)
            continue
        with open(mpath) as fh:
            manifest = json.load(fh)
        verdicts = {}
        if os.path.exists(vpath):
            with open(vpath) as fh:
                verdicts = json.load(fh)
        cfg = verdicts.get("config", {})
        gates = verdicts.get("gates", {})
        rows.append({
            "dir": d,
            "speed": cfg.get("speed"),
            "mode": cfg.get("body", {}).get("mode"),
            "grid": cfg.get("body", {}).get("N"),
            "maxF_growth": gates.get("maxF_growth"),
            "eps_radii_ratio_final": gates.get("eps_radii_ratio_final"),
            "eps_upper_final": gates.get("eps_upper_final"),
            "delta_lower_final": gates.get("delta_lower_final"),
            "hausdorff_rescaled_final": gates.get("hausdorff_rescaled_final"),
            "passed": verdicts.get("passed"),
            "version": manifest.get("tool_version"),
        })
    if not rows:
        print("error: no readable run directories", file=sys.stderr)
        return EXIT_USAGE

    cols = ["dir", "speed", "mode", "grid", "maxF_growth",
            "eps_radii_ratio_final", "hausdorff_rescaled_final", "passed"]
    widths = {c: max(len(c), *(len(_cell(r.get(c))) for r in rows)) for c in cols}
    print("  ".join(c.ljust(widths[c]) for c in cols))
    for r in rows:
        print("  ".join(_cell(r.get(c)).ljust(widths[c]) for c in cols))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "report.json"), {"runs": rows})
    return EXIT_OK


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="noncollapse",
        description="Curvature-flow laboratory: speed certification, matrix-"
                    "inequality oracles, flow runs, and run reports.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify concavity / inverse-concavity of a speed")
    c.add_argument("--speed", required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--property", choices=["concave", "inverse-concave",
                                          "monotone", "homogeneous"])
    c.add_argument("--trials", type=int, default=2000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_certify)

    o = sub.add_parser("oracle", help="randomized inequality suite")
    o.add_argument("--prop", choices=["2.2", "2.5"], required=True,
                   help="2.2 = interior (shifted-inverse) estimate, "
                        "2.5 = boundary (smallest-eigenvalue) estimate")
    o.add_argument("--speed", required=True)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--trials", type=int, default=10000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out")
    o.set_defaults(fn=cmd_oracle)

    fl = sub.add_parser("flow", help="run a flow from a JSON config")
    fl.add_argument("--config", required=True)
    fl.add_argument("--out")
    fl.add_argument("--grid", type=int, help="override body N")
    fl.add_argument("--cfl", type=float)
    fl.add_argument("--stop-max-f", type=float, dest="stop_max_f")
    fl.add_argument("--seed", type=int)
    fl.set_defaults(fn=cmd_flow)

    r = sub.add_parser("report", help="summarise one or more run directories")
    r.add_argument("run_dirs", nargs="*")
    r.add_argument("--out")
    r.set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    _ = worker_count()  # validate NONCOLLAPSE_THREADS early
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
