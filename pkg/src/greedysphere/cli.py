"""Command-line surface: generate/extend greedy runs, analyze checkpoints,
run verification suites, emit partitions and constant tables.

Config precedence is flags > config file > defaults; the config file is a
flat `key = value` document. Errors leave a machine-readable JSON record on
stderr and a nonzero exit code. All report floats carry 15 significant
digits; checkpoints keep full precision so runs can be resumed bit-exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis import (
    REPORT_SCHEMA,
    dyadic_schedule,
    rows_for_config,
    summary_for_config,
    write_report_csv,
    write_summary_json,
)
from .greedy import build_sequence, extend_sequence, load_checkpoint, save_checkpoint
from .greenfn import green_cap_mean_shift, green_kernel_t
from .kernels import KernelSpec, wiener_constant
from .optimize import SolverParams
from .sphere import equal_area_partition, partition_to_json
from .verify import SUITES, run_suite

_THREAD_CAP = None  # reserved worker-count cap for parallel figure/suite runs


def _fail(kind: str, message: str, code: int = 1) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.strip()!r}")
            key, val = (p.strip() for p in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _merge_option(args, cfg: dict, key: str, cast):
    """flags > config file > defaults."""
    if getattr(args, key, None) is not None:
        return getattr(args, key)
    if key in cfg:
        return cast(cfg[key])
    return None


def _kernel_from_args(args, cfg: dict) -> KernelSpec:
    dim = _merge_option(args, cfg, "dim", int)
    kind = _merge_option(args, cfg, "kernel", str)
    s = _merge_option(args, cfg, "s", float)
    if dim is None or kind is None:
        raise ValueError("--dim and --kernel are required")
    if kind == "green" and dim == 2:
        sys.stderr.write("warning: green kernel on S^2 is an affine image of the "
                         "log kernel; routing to kernel=log\n")
        kind = "log"
    if kind == "riesz":
        if s is None:
            raise ValueError("--s is required for the riesz kernel")
        spec = KernelSpec("riesz", dim=dim, s=s)
    elif kind in ("log", "green"):
        spec = KernelSpec(kind, dim=dim)
    else:
        raise ValueError(f"unknown kernel {kind!r}")
    spec.validate_for_run()
    return spec


def _params_from_args(args, cfg: dict, n: int) -> SolverParams:
    mesh_size = _merge_option(args, cfg, "mesh_size", int)
    if mesh_size is None:
        mesh_size = max(8 * (n + 1), 4096)
    kwargs = {
        "mesh_size": mesh_size,
        "multistart": _merge_option(args, cfg, "multistart", int) or 12,
        "seed": _merge_option(args, cfg, "seed", int) or 0,
    }
    strategy = _merge_option(args, cfg, "mesh_strategy", str)
    if strategy:
        kwargs["mesh_strategy"] = strategy
    return SolverParams(**kwargs)


def _x1_from_args(args, cfg: dict, dim: int) -> np.ndarray | None:
    raw = _merge_option(args, cfg, "x1", str)
    if raw is None:
        return None
    coords = np.array([float(v) for v in raw.split(",")], dtype=float)
    if coords.size == 1 and dim == 1:
        return np.array([math.cos(coords[0]), math.sin(coords[0])])
    if coords.size != dim + 1:
        raise ValueError(f"--x1 needs {dim + 1} coordinates (or one angle on S^1)")
    return coords / np.linalg.norm(coords)


def cmd_generate(args) -> int:
    cfg = _load_config_file(args.config) if args.config else {}
    spec = _kernel_from_args(args, cfg)
    n = _merge_option(args, cfg, "n", int)
    if n is None:
        raise ValueError("--n is required")
    params = _params_from_args(args, cfg, n)
    x1 = _x1_from_args(args, cfg, spec.dim)
    config = build_sequence(spec.dim, spec, n, x1=x1, params=params)
    save_checkpoint(config, args.out + ".checkpoint.jsonl")
    rows = rows_for_config(config, dyadic_schedule(max(config.n - 1, 2)))
    write_report_csv(rows, args.out + ".report.csv")
    write_summary_json(summary_for_config(config, rows), args.out + ".summary.json")
    print(f"wrote {args.out}.checkpoint.jsonl ({config.n} points), "
          f"{args.out}.report.csv, {args.out}.summary.json")
    return 0


def cmd_extend(args) -> int:
    config = load_checkpoint(args.checkpoint)
    extended = extend_sequence(config, args.extra)
    out = args.out or args.checkpoint.removesuffix(".checkpoint.jsonl")
    save_checkpoint(extended, out + ".checkpoint.jsonl")
    rows = rows_for_config(extended, dyadic_schedule(max(extended.n - 1, 2)))
    write_report_csv(rows, out + ".report.csv")
    write_summary_json(summary_for_config(extended, rows), out + ".summary.json")
    print(f"extended to {extended.n} points; wrote {out}.checkpoint.jsonl")
    return 0


def cmd_analyze(args) -> int:
    config = load_checkpoint(args.checkpoint)
    if config.n < 2:
        raise ValueError("checkpoint has fewer than 2 points")
    if args.schedule == "dyadic":
        schedule = dyadic_schedule(max(config.n - 1, 2))
    elif args.schedule == "all":
        schedule = list(range(2, config.n + 1))
    else:
        schedule = sorted({int(v) for v in args.schedule.split(",")})
    rows = rows_for_config(config, schedule)
    write_report_csv(rows, args.out + ".report.csv")
    write_summary_json(summary_for_config(config, rows), args.out + ".summary.json")
    print(f"wrote {args.out}.report.csv ({len(rows)} rows) and {args.out}.summary.json")
    return 0


def cmd_verify(args) -> int:
    failures = 0
    for suite in args.suites:
        checks = run_suite(suite, use_baselines=not args.no_baselines)
        for chk in checks:
            tag = "PASS" if chk["ok"] else "FAIL"
            print(f"[{tag}] {suite}: {chk['name']} ({chk['detail']})")
            failures += 0 if chk["ok"] else 1
    print(f"{failures} failure(s)" if failures else "all checks passed")
    return 1 if failures else 0


def cmd_partition(args) -> int:
    regions = equal_area_partition(args.n)
    payload = partition_to_json(regions)
    with open(args.out, "w") as fh:
        fh.write(payload + "\n")
    worst = max(r.diameter_bound() for r in regions)
    print(f"wrote {args.out}: {len(regions)} regions, max diameter {worst:.6g} "
          f"(bound 7/sqrt(N) = {7.0 / math.sqrt(args.n):.6g})")
    return 0


def cmd_constants(args) -> int:
    out: dict = {"schema": "greedysphere.constants.v1", "version": __version__}
    d = args.dim
    if args.s is not None:
        out["wiener"] = {"s": args.s, "d": d, "value": wiener_constant(args.s, d).value}
    if d >= 2:
        angles = np.linspace(0.1, math.pi, args.table_points)
        out["cap_mean_shift"] = {
            "d": d,
            "a": [float(f"{v:.15g}") for v in angles],
            "value": [float(f"{green_cap_mean_shift(d, float(a)):.15g}") for a in angles],
        }
        t = np.linspace(0.05, 2.0, args.table_points)
        out["green_kernel"] = {
            "d": d,
            "t": [float(f"{v:.15g}") for v in t],
            "value": [float(f"{v:.15g}") for v in green_kernel_t(t, d)],
        }
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def cmd_baseline(args) -> int:
    from .baselines import write_baselines

    data = write_baselines(args.out, circle_n=args.circle_n, s2_n=args.s2_n, s3_n=args.s3_n)
    print(f"wrote {args.out} with sections: {sorted(data.keys())}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="greedysphere",
                                 description="Greedy energy sequences on spheres")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--threads", type=int, default=None,
                    help="cap worker threads (runs are currently serial and deterministic)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a greedy sequence and write reports")
    g.add_argument("--dim", type=int)
    g.add_argument("--kernel", choices=["riesz", "log", "green"])
    g.add_argument("--s", type=float)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--mesh-size", dest="mesh_size", type=int)
    g.add_argument("--mesh-strategy", dest="mesh_strategy",
                   choices=["fibonacci_s2", "random_uniform"])
    g.add_argument("--multistart", type=int)
    g.add_argument("--x1", type=str, help="comma-separated coordinates, or one angle on S^1")
    g.add_argument("--config", type=str, help="flat key = value config file")
    g.add_argument("--out", type=str, default="run")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("extend", help="resume a checkpoint")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--extra", type=int, required=True)
    e.add_argument("--out", type=str)
    e.set_defaults(func=cmd_extend)

    a = sub.add_parser("analyze", help="diagnostics from a checkpoint")
    a.add_argument("--checkpoint", required=True)
    a.add_argument("--schedule", default="dyadic",
                   help="'dyadic', 'all', or comma-separated N values")
    a.add_argument("--out", type=str, default="analysis")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify", help="run acceptance suites")
    v.add_argument("suites", nargs="+", choices=list(SUITES))
    v.add_argument("--no-baselines", action="store_true",
                   help="skip pinned-baseline comparisons")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("partition", help="equal-area partition of S^2 as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", type=str, default="partition.json")
    p.set_defaults(func=cmd_partition)

    c = sub.add_parser("constants", help="print kernel constants and tables as JSON")
    c.add_argument("--dim", type=int, default=2)
    c.add_argument("--s", type=float)
    c.add_argument("--table-points", dest="table_points", type=int, default=9)
    c.set_defaults(func=cmd_constants)

    b = sub.add_parser("baseline", help="measure and write regression baselines")
    b.add_argument("--out", type=str, required=True)
    b.add_argument("--circle-n", dest="circle_n", type=int, default=4096)
    b.add_argument("--s2-n", dest="s2_n", type=int, default=2000)
    b.add_argument("--s3-n", dest="s3_n", type=int, default=500)
    b.set_defaults(func=cmd_baseline)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    global _THREAD_CAP
    if args.threads is not None:
        _THREAD_CAP = max(1, args.threads)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, RuntimeError) as exc:
        return _fail(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
