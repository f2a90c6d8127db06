"""Command-line entry point: run scenarios, verify runs, sweep properties.

Exit codes: 0 success, 1 usage or configuration error, 2 invariant abort
or unstable integration, 3 verification or property check failed.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .core import ConfigError, GridSpec
from .integrator import (
    NonFiniteStateError,
    RunResult,
    ToleranceExceededError,
    default_record_nodes,
    run,
)
from .monitor import ViolationReport
from .props import run_property_sweeps
from .scenarios import PRESET_NAMES, make_preset
from .snapshot_io import (
    MANIFEST_VERSION,
    ParseError,
    RunManifest,
    SnapshotIoError,
    read_config,
    read_manifest,
    read_snapshot,
    read_trajectory,
    trajectory_filename,
    write_config,
    write_manifest,
    write_section,
    write_snapshot,
    write_trajectory,
)
from .theta import MissingTrajectoriesError, verify_n_field

OUT_ENV_VAR = "ACIDFRONT_OUT"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2
EXIT_CHECK_FAILED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="acidfront", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario and export its files")
    p_run.add_argument("--scenario", choices=PRESET_NAMES)
    p_run.add_argument("--config", help="scenario config file (key=value lines)")
    p_run.add_argument("--out", help=f"output directory (default ${OUT_ENV_VAR})")
    p_run.add_argument("--grid", type=int, help="override nodes per side")
    p_run.add_argument("--t-end", type=float, dest="t_end", help="override end time")
    p_run.add_argument(
        "--record-trajectories",
        action="store_true",
        help="record per-step A,H at the default 3x3 interior nodes",
    )
    p_run.add_argument(
        "--warn-only",
        action="store_true",
        help="report invariant violations instead of aborting",
    )
    p_run.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker cap; results never depend on it (computation is sequential)",
    )

    p_verify = sub.add_parser(
        "verify", help="cross-check the N field of a recorded run"
    )
    p_verify.add_argument("--run", required=True, dest="run_dir")
    p_verify.add_argument("--max-rel-err", type=float, default=1e-3)

    p_props = sub.add_parser("props", help="run the seeded property sweeps")
    p_props.add_argument("--seed", type=int, default=20240)
    p_props.add_argument("--cases", type=int, default=1000)
    return parser


def _snapshot_labels(times: list[float]) -> list[str]:
    labels = [f"t{t:.2f}" for t in times]
    if len(set(labels)) != len(labels):
        labels = [f"t{t!r}" for t in times]
    return labels


def _export_run(out_dir: Path, result: RunResult) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_config(result.config, out_dir / "config.cfg")
    times = [t for t, _ in result.snapshots]
    labels = _snapshot_labels(times)
    files: list[str] = ["config.cfg"]
    for (t, state), label in zip(result.snapshots, labels):
        for path in write_snapshot(state, out_dir, label):
            files.append(path.name)
        files.append(write_section(state, result.config.grid, out_dir, label).name)
    nodes: list[tuple[int, int]] = []
    if result.trajectories:
        for (i, j), traj in sorted(result.trajectories.items()):
            name = trajectory_filename(i, j)
            write_trajectory(traj, out_dir / name)
            files.append(name)
            nodes.append((i, j))
    manifest = RunManifest(
        format_version=MANIFEST_VERSION,
        config=result.config,
        dt_used=result.dt_used,
        step_count=result.step_count,
        snapshot_times=tuple(times),
        snapshot_labels=tuple(labels),
        files=tuple(files),
        trajectory_nodes=tuple(nodes),
        report=result.invariant_report,
    )
    write_manifest(out_dir, manifest)


def _cmd_run(args) -> int:
    if (args.scenario is None) == (args.config is None):
        raise _UsageError("exactly one of --scenario or --config is required")
    out = args.out or os.environ.get(OUT_ENV_VAR)
    if not out:
        raise _UsageError(f"--out is required (or set ${OUT_ENV_VAR})")
    if args.threads < 1:
        raise _UsageError("--threads must be >= 1")

    if args.scenario is not None:
        cfg = make_preset(args.scenario)
    else:
        cfg = read_config(args.config)
    if args.grid is not None:
        if args.grid < 3:
            raise _UsageError("--grid must be >= 3")
        cfg = replace(
            cfg, grid=GridSpec(L=cfg.grid.L, n=args.grid, boundary=cfg.grid.boundary)
        )
    if args.t_end is not None:
        if args.t_end <= 0:
            raise _UsageError("--t-end must be > 0")
        # keep the truncated run useful: export its final state as well
        kept = [t for t in cfg.snapshot_times if t < args.t_end]
        cfg = replace(
            cfg, t_end=args.t_end, snapshot_times=tuple(kept + [args.t_end])
        )
    cfg.require_valid()

    record = default_record_nodes(cfg.grid.n) if args.record_trajectories else None
    try:
        result = run(cfg, record_nodes=record, fatal_violations=not args.warn_only)
    except ToleranceExceededError as exc:
        print(f"invariant abort: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NonFiniteStateError as exc:
        print(f"unstable integration: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    out_dir = Path(out)
    _export_run(out_dir, result)
    report = result.invariant_report
    name = args.scenario if args.scenario else Path(args.config).name
    print(
        f"run {name}: n={cfg.grid.n} boundary={cfg.grid.boundary.label} "
        f"t_end={cfg.t_end!r} dt={result.dt_used!r} steps={result.step_count}"
    )
    print(
        f"snapshots={len(result.snapshots)} trajectories="
        f"{len(result.trajectories) if result.trajectories else 0} "
        f"violations={report.violation_count}"
    )
    if not report.clean:
        print(
            f"warning: invariant violations, first at t={report.first_violation_time!r}",
            file=sys.stderr,
        )
    return EXIT_OK


def _cmd_verify(args) -> int:
    run_dir = Path(args.run_dir)
    manifest = read_manifest(run_dir)
    if not manifest.trajectory_nodes:
        raise MissingTrajectoriesError(
            "run has no recorded trajectories; rerun with --record-trajectories"
        )
    trajectories = {}
    for i, j in manifest.trajectory_nodes:
        trajectories[(i, j)] = read_trajectory(run_dir / trajectory_filename(i, j))
    snapshots = [
        (t, read_snapshot(run_dir, label, t))
        for t, label in zip(manifest.snapshot_times, manifest.snapshot_labels)
    ]
    result = RunResult(
        config=manifest.config,
        dt_used=manifest.dt_used,
        step_count=manifest.step_count,
        snapshots=snapshots,
        invariant_report=ViolationReport(),
        trajectories=trajectories,
    )
    err = verify_n_field(result, manifest.config.params)
    ok = err <= args.max_rel_err
    print(f"max_rel_err={err!r} threshold={args.max_rel_err!r} -> "
          f"{'ok' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_props(args) -> int:
    if args.cases < 1:
        raise _UsageError("--cases must be >= 1")
    results = run_property_sweeps(args.seed, args.cases)
    for res in results:
        print(res.line())
    if all(res.clean for res in results):
        print("all properties held")
        return EXIT_OK
    print("property violations found", file=sys.stderr)
    return EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_props(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ConfigError, MissingTrajectoriesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SnapshotIoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
