"""Deterministic on-disk formats: field CSVs, sections, configs, manifests.

All writers are byte-deterministic (17-significant-digit decimals, fixed
key order, LF line endings, no timestamps), so rerunning a scenario
reproduces its output directory bit for bit. Files are written to a
temporary name and renamed into place.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    BoundaryKind,
    GridSpec,
    InitRecipe,
    ModelParams,
    PARAM_NAMES,
    ScenarioConfig,
    SimState,
)
from .monitor import ViolationReport
from .theta import NodeTrajectory


class SnapshotIoError(OSError):
    """Output could not be written (bad label, unwritable directory)."""


class MidlineOffGridError(ValueError):
    """The x1 = L/2 section line does not coincide with a grid line."""


class ParseError(ValueError):
    """An on-disk artifact failed to parse; carries a location when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


CONFIG_KEYS = PARAM_NAMES + (
    "L", "n", "boundary", "t_end", "snapshot_times",
    "N0", "A0", "delta_A", "H0", "cfl_safety", "tol",
)

MANIFEST_VERSION = 1


def _fmt(v: float) -> str:
    """Shortest decimal that round-trips the double exactly."""
    return repr(float(v))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise SnapshotIoError(f"cannot write {path}: {exc}") from exc


def _check_label(label: str) -> None:
    if not label or any(sep in label for sep in ("/", "\\", "\0")) or label in (".", ".."):
        raise SnapshotIoError(f"invalid snapshot label {label!r}")


def write_field_csv(values: np.ndarray, path: Path) -> None:
    rows = [",".join(format(v, ".17g") for v in row) for row in values]
    _atomic_write(path, "\n".join(rows) + "\n")


def read_field_csv(path: Path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SnapshotIoError(f"cannot read {path}: {exc}") from exc
    rows = []
    width = None
    for k, line in enumerate(lines):
        if not line:
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(
                f"ragged row: {len(cells)} values, expected {width}", line=k + 1
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError(f"bad number in {path.name}", line=k + 1) from None
    if not rows:
        raise ParseError(f"empty field file {path.name}")
    return np.array(rows)


def write_snapshot(s: SimState, out_dir: str | Path, label: str) -> list[Path]:
    """Write the three fields as <label>_N.csv, <label>_A.csv, <label>_H.csv."""
    _check_label(label)
    out = Path(out_dir)
    paths = []
    for suffix, values in (("N", s.N), ("A", s.A), ("H", s.H)):
        path = out / f"{label}_{suffix}.csv"
        write_field_csv(values, path)
        paths.append(path)
    return paths


def read_snapshot(out_dir: str | Path, label: str, t: float) -> SimState:
    out = Path(out_dir)
    fields = {}
    for suffix in ("N", "A", "H"):
        fields[suffix] = read_field_csv(out / f"{label}_{suffix}.csv")
    shapes = {f.shape for f in fields.values()}
    if len(shapes) != 1:
        raise ParseError(f"snapshot {label!r} fields have mismatched shapes")
    return SimState(t=t, N=fields["N"], A=fields["A"], H=fields["H"])


def write_section(
    s: SimState, grid: GridSpec, out_dir: str | Path, label: str
) -> Path:
    """Transversal section along the x1 = L/2 midline, one row per node."""
    _check_label(label)
    if grid.n % 2 == 0:
        raise MidlineOffGridError(
            f"n={grid.n} is even, the x1=L/2 midline is off-grid"
        )
    i = grid.midline_index()
    x = grid.coords()
    lines = ["x2,N,A,H"]
    for j in range(grid.n):
        lines.append(
            ",".join(
                format(v, ".17g") for v in (x[j], s.N[i, j], s.A[i, j], s.H[i, j])
            )
        )
    path = Path(out_dir) / f"{label}_section.csv"
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_trajectory(traj: NodeTrajectory, path: Path) -> None:
    lines = ["t,a,h"]
    for t, a, h in zip(traj.times, traj.a_values, traj.h_values):
        lines.append(",".join(format(v, ".17g") for v in (t, a, h)))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_trajectory(path: Path) -> NodeTrajectory:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SnapshotIoError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != "t,a,h":
        raise ParseError(f"{path.name}: missing t,a,h header", line=1)
    cols: list[list[float]] = [[], [], []]
    for k, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 3:
            raise ParseError(f"{path.name}: expected 3 columns", line=k)
        try:
            for col, cell in zip(cols, cells):
                col.append(float(cell))
        except ValueError:
            raise ParseError(f"{path.name}: bad number", line=k) from None
    return NodeTrajectory(
        times=np.array(cols[0]), a_values=np.array(cols[1]), h_values=np.array(cols[2])
    )


def trajectory_filename(i: int, j: int) -> str:
    return f"traj_{i}_{j}.csv"


def config_lines(cfg: ScenarioConfig) -> list[str]:
    """Config serialized as key=value pairs in canonical order."""
    if cfg.init.A0_center is not None:
        center = cfg.init.center(cfg.grid)
        if center != (cfg.grid.L / 2.0, cfg.grid.L / 2.0):
            raise ValueError(
                "a non-default bump center is not representable in the config format"
            )
    values = dict(cfg.params.as_dict())
    values.update(
        {
            "L": cfg.grid.L,
            "n": cfg.grid.n,
            "boundary": cfg.grid.boundary.label,
            "t_end": cfg.t_end,
            "snapshot_times": ",".join(_fmt(t) for t in cfg.snapshot_times),
            "N0": cfg.init.N0_const,
            "A0": cfg.init.A0_amplitude,
            "delta_A": cfg.init.A0_decay,
            "H0": cfg.init.H0_const,
            "cfl_safety": cfg.cfl_safety,
            "tol": cfg.tol,
        }
    )
    lines = []
    for key in CONFIG_KEYS:
        v = values[key]
        if key == "n":
            lines.append(f"n={v}")
        elif isinstance(v, str):
            lines.append(f"{key}={v}")
        else:
            lines.append(f"{key}={_fmt(v)}")
    return lines


def write_config(cfg: ScenarioConfig, path: str | Path) -> None:
    _atomic_write(Path(path), "\n".join(config_lines(cfg)) + "\n")


def parse_config_lines(
    lines: list[str], first_line: int = 1
) -> ScenarioConfig:
    """Parse key=value config lines; '#' starts a comment."""
    seen: dict[str, str] = {}
    for k, raw in enumerate(lines, start=first_line):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key=value", line=k)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ParseError(f"unknown config key {key!r}", line=k)
        if key in seen:
            raise ParseError(f"duplicate config key {key!r}", line=k)
        seen[key] = value
    missing = [key for key in CONFIG_KEYS if key not in seen]
    if missing:
        raise ParseError(f"missing config keys: {', '.join(missing)}")

    def as_float(key: str) -> float:
        try:
            return float(seen[key])
        except ValueError:
            raise ParseError(f"config key {key!r} is not a number") from None

    try:
        n = int(seen["n"])
        if str(n) != seen["n"]:
            raise ValueError
    except ValueError:
        raise ParseError("config key 'n' must be an integer") from None
    try:
        boundary = BoundaryKind.from_label(seen["boundary"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    snapshot_raw = seen["snapshot_times"]
    try:
        snapshot_times = tuple(
            float(tok) for tok in snapshot_raw.split(",") if tok.strip() != ""
        )
    except ValueError:
        raise ParseError("snapshot_times must be comma-separated numbers") from None

    params = ModelParams(**{name: as_float(name) for name in PARAM_NAMES})
    try:
        grid = GridSpec(L=as_float("L"), n=n, boundary=boundary)
    except ValueError as exc:
        raise ParseError(f"bad grid: {exc}") from None
    cfg = ScenarioConfig(
        params=params,
        grid=grid,
        t_end=as_float("t_end"),
        snapshot_times=snapshot_times,
        init=InitRecipe(
            N0_const=as_float("N0"),
            A0_amplitude=as_float("A0"),
            A0_decay=as_float("delta_A"),
            H0_const=as_float("H0"),
        ),
        cfl_safety=as_float("cfl_safety"),
        tol=as_float("tol"),
    )
    problems = cfg.validate()
    if problems:
        raise ParseError("invalid config: " + "; ".join(problems))
    return cfg


def read_config(path: str | Path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SnapshotIoError(f"cannot read {path}: {exc}") from exc
    return parse_config_lines(lines)


@dataclass
class RunManifest:
    """Everything needed to reload and verify a finished run directory."""

    format_version: int
    config: ScenarioConfig
    dt_used: float
    step_count: int
    snapshot_times: tuple[float, ...]
    snapshot_labels: tuple[str, ...]
    files: tuple[str, ...]
    trajectory_nodes: tuple[tuple[int, int], ...]
    report: ViolationReport


def write_manifest(out_dir: str | Path, manifest: RunManifest) -> Path:
    r = manifest.report
    lines = [
        f"format_version={manifest.format_version}",
        f"dt_used={_fmt(manifest.dt_used)}",
        f"step_count={manifest.step_count}",
        "snapshot_times=" + ",".join(_fmt(t) for t in manifest.snapshot_times),
        "snapshot_labels=" + ",".join(manifest.snapshot_labels),
        "files=" + ",".join(manifest.files),
        "trajectory_nodes="
        + ";".join(f"{i}:{j}" for i, j in manifest.trajectory_nodes),
        f"violation_count={r.violation_count}",
        f"worst_negative_N={_fmt(r.worst_negative_N)}",
        f"worst_negative_A={_fmt(r.worst_negative_A)}",
        f"worst_negative_H={_fmt(r.worst_negative_H)}",
        f"worst_A_excess_over_kA={_fmt(r.worst_A_excess_over_kA)}",
        f"worst_N_excess_over_bound={_fmt(r.worst_N_excess_over_bound)}",
        "first_violation_time="
        + ("none" if r.first_violation_time is None else _fmt(r.first_violation_time)),
    ]
    lines.extend("config." + line for line in config_lines(manifest.config))
    path = Path(out_dir) / "manifest.txt"
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def read_manifest(out_dir: str | Path) -> RunManifest:
    path = Path(out_dir) / "manifest.txt"
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise SnapshotIoError(f"cannot read {path}: {exc}") from exc
    plain: dict[str, str] = {}
    config_raw: list[str] = []
    for k, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("config."):
            config_raw.append(line[len("config."):])
            continue
        if "=" not in line:
            raise ParseError("expected key=value", line=k)
        key, _, value = line.partition("=")
        plain[key] = value
    if plain.get("format_version") != str(MANIFEST_VERSION):
        raise ParseError(
            f"unsupported manifest format_version {plain.get('format_version')!r}"
        )
    cfg = parse_config_lines(config_raw)

    def fval(key: str) -> float:
        try:
            return float(plain[key])
        except (KeyError, ValueError):
            raise ParseError(f"manifest key {key!r} missing or invalid") from None

    labels = tuple(s for s in plain.get("snapshot_labels", "").split(",") if s)
    times = tuple(
        float(tok) for tok in plain.get("snapshot_times", "").split(",") if tok
    )
    if len(labels) != len(times):
        raise ParseError("snapshot_labels and snapshot_times disagree")
    nodes = []
    for tok in plain.get("trajectory_nodes", "").split(";"):
        if not tok:
            continue
        i_str, _, j_str = tok.partition(":")
        nodes.append((int(i_str), int(j_str)))
    first = plain.get("first_violation_time", "none")
    report = ViolationReport(
        worst_negative_N=fval("worst_negative_N"),
        worst_negative_A=fval("worst_negative_A"),
        worst_negative_H=fval("worst_negative_H"),
        worst_A_excess_over_kA=fval("worst_A_excess_over_kA"),
        worst_N_excess_over_bound=fval("worst_N_excess_over_bound"),
        first_violation_time=None if first == "none" else float(first),
        violation_count=int(plain.get("violation_count", "0")),
    )
    return RunManifest(
        format_version=MANIFEST_VERSION,
        config=cfg,
        dt_used=fval("dt_used"),
        step_count=int(plain.get("step_count", "0")),
        snapshot_times=times,
        snapshot_labels=labels,
        files=tuple(s for s in plain.get("files", "").split(",") if s),
        trajectory_nodes=tuple(nodes),
        report=report,
    )
