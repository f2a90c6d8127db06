"""Fixed-step RK4 time integration of the discretized system.

The time loop is sequential and deterministic: the same configuration
always produces bit-identical results. Snapshot times are landed exactly
by shortening the step, and step times are computed by counting steps
from the segment start rather than accumulating dt.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    BoundaryKind,
    GridSpec,
    ModelParams,
    ScenarioConfig,
    SimState,
    build_initial_state,
)
from .kernels import rk4_step_into
from .monitor import ViolationReport, check_state
from .theta import NodeTrajectory


class NonFiniteStateError(RuntimeError):
    """The state picked up NaN or Inf values (integration unstable)."""


class ToleranceExceededError(RuntimeError):
    """The invariant monitor found violations beyond tolerance."""

    def __init__(self, message: str, report: ViolationReport):
        super().__init__(message)
        self.report = report


@dataclass
class RunResult:
    """Outcome of one scenario run.

    snapshots hold (time, state) pairs at exactly the requested times;
    trajectories (if recorded) map grid nodes to their per-step A and H
    histories. Immutable after completion.
    """

    config: ScenarioConfig
    dt_used: float
    step_count: int
    snapshots: list[tuple[float, SimState]]
    invariant_report: ViolationReport
    trajectories: dict[tuple[int, int], NodeTrajectory] | None = None


def stable_dt(
    p: ModelParams,
    grid: GridSpec,
    safety: float,
    n0_max: float | None = None,
) -> float:
    """Stability-bounded step size for the explicit scheme.

    With diffusion present this is the standard 2D explicit limit
    dx^2/(4*max(xi)); without diffusion the step is capped by the fastest
    reaction rate scale (and 0.01 as an absolute fallback).
    """
    if not (0.0 < safety <= 1.0):
        raise ValueError("safety must be in (0, 1]")
    xi = max(p.xi_A, p.xi_H)
    if xi > 0.0:
        return safety * grid.dx * grid.dx / (4.0 * xi)
    if n0_max is None:
        n0_max = p.r_N / p.mu_N if p.mu_N > 0.0 else 0.0
    n_bar = max(n0_max, p.r_N / p.mu_N) if p.mu_N > 0.0 else n0_max
    rate = max(
        p.mu_N + p.beta_1 * p.k_A,
        p.r_A + p.mu_A + p.eps_A + p.beta_3 * n_bar,
        p.tau_H,
    )
    cap = 1.0 / rate if rate > 0.0 else math.inf
    return safety * min(0.01, cap)


class _Rk4Scratch:
    """Preallocated stage buffers for the stacked RK4 update."""

    def __init__(self, grid: GridSpec):
        shape = (3, grid.n, grid.n)
        self.k1 = np.empty(shape)
        self.k2 = np.empty(shape)
        self.k3 = np.empty(shape)
        self.k4 = np.empty(shape)
        self.yt = np.empty(shape)


def step_rk4(
    s: SimState,
    dt: float,
    p: ModelParams,
    grid: GridSpec,
    scratch: _Rk4Scratch | None = None,
) -> SimState:
    """Advance one state by a single classical RK4 step of length dt.

    All three fields update simultaneously; under Dirichlet boundaries
    the A and H rims stay exactly at their pinned values.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if scratch is None:
        scratch = _Rk4Scratch(grid)
    y = np.stack([s.N, s.A, s.H])
    rk4_step_into(y, scratch, dt, p, grid, grid.boundary is BoundaryKind.NEUMANN)
    if not np.isfinite(y).all():
        raise NonFiniteStateError(f"non-finite state after step from t={s.t!r}")
    return SimState(t=s.t + dt, N=y[0], A=y[1], H=y[2])


def default_record_nodes(n: int) -> list[tuple[int, int]]:
    """3x3 uniformly spaced interior nodes (quarter positions, center included)."""
    last = n - 1
    idx = (last // 4, last // 2, (3 * last) // 4)
    return [(i, j) for i in idx for j in idx]


def _segments(snapshot_times: Sequence[float], t_end: float):
    """Event times with snapshot flags, partitioning (0, t_end]."""
    events: list[tuple[float, bool]] = []
    for t in snapshot_times:
        if t > 0.0:
            events.append((t, True))
    if not events or events[-1][0] < t_end:
        events.append((t_end, False))
    return events


def run(
    cfg: ScenarioConfig,
    record_nodes: Sequence[tuple[int, int]] | None = None,
    fatal_violations: bool = True,
) -> RunResult:
    """Integrate the scenario from t = 0 to t_end.

    The step size is fixed at stable_dt, shortened on the final step of
    each inter-snapshot segment so every requested snapshot time is hit
    exactly. The invariant monitor runs after every step; with
    fatal_violations the run aborts on the first violation beyond
    tolerance, otherwise violations are merged into the result's report
    and the run continues.

    record_nodes enables per-step (A, H) history recording at the given
    grid nodes, as needed by the N-field verification.
    """
    cfg.require_valid()
    p, grid = cfg.params, cfg.grid
    neumann = grid.boundary is BoundaryKind.NEUMANN
    state0 = build_initial_state(cfg)
    dt = stable_dt(p, grid, cfg.cfl_safety, n0_max=cfg.init.N0_const)
    n0_max = float(state0.N.max())

    scratch = _Rk4Scratch(grid)
    y = np.stack([state0.N, state0.A, state0.H])

    nodes: list[tuple[int, int]] = (
        [(int(i), int(j)) for i, j in record_nodes] if record_nodes is not None else []
    )
    for i, j in nodes:
        if not (0 <= i < grid.n and 0 <= j < grid.n):
            raise ValueError(f"record node ({i}, {j}) outside grid")
    rec_times: list[float] = [0.0] if nodes else []
    rec_a: dict[tuple[int, int], list[float]] = {nd: [float(y[1][nd])] for nd in nodes}
    rec_h: dict[tuple[int, int], list[float]] = {nd: [float(y[2][nd])] for nd in nodes}

    snapshots: list[tuple[float, SimState]] = []
    if cfg.snapshot_times and cfg.snapshot_times[0] == 0.0:
        snapshots.append((0.0, state0.copy()))

    report = check_state(state0, p, n0_max, cfg.t_end, cfg.tol)
    step_count = 0
    t = 0.0

    for target, is_snapshot in _segments(cfg.snapshot_times, cfg.t_end):
        seg = target - t
        if seg <= 0.0:
            continue
        m = max(1, int(math.ceil(seg / dt - 1e-9)))
        t_start = t
        for j in range(m):
            if j < m - 1:
                h = dt
                t_next = t_start + (j + 1) * dt
            else:
                h = target - t
                t_next = target
            rk4_step_into(y, scratch, h, p, grid, neumann)
            step_count += 1
            t = t_next
            if not np.isfinite(y).all():
                raise NonFiniteStateError(f"non-finite state at t={t!r}")
            step_report = check_state(
                SimState(t=t, N=y[0], A=y[1], H=y[2]), p, n0_max, cfg.t_end, cfg.tol
            )
            report = report.merged(step_report)
            if fatal_violations and not step_report.clean:
                raise ToleranceExceededError(
                    f"invariant violation at t={t!r}: "
                    f"{step_report.violation_count} node checks beyond tol",
                    report,
                )
            if nodes:
                rec_times.append(t)
                for nd in nodes:
                    rec_a[nd].append(float(y[1][nd]))
                    rec_h[nd].append(float(y[2][nd]))
        if is_snapshot:
            snapshots.append(
                (target, SimState(t=target, N=y[0].copy(), A=y[1].copy(), H=y[2].copy()))
            )

    trajectories = None
    if nodes:
        times_arr = np.array(rec_times)
        trajectories = {
            nd: NodeTrajectory(
                times=times_arr.copy(),
                a_values=np.array(rec_a[nd]),
                h_values=np.array(rec_h[nd]),
            )
            for nd in nodes
        }
    return RunResult(
        config=cfg,
        dt_used=dt,
        step_count=step_count,
        snapshots=snapshots,
        invariant_report=report,
        trajectories=trajectories,
    )
