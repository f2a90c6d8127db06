"""Closed-form verification of the N field from recorded A and H histories.

At each spatial point the N equation is a linear ODE in N whose exact
solution is a functional of the local A and H histories:

    N(t) = [N0 + r_N * int_0^t exp(g(s)) ds] * exp(-g(t)),
    g(s) = mu_N*s + alpha_H*gamma_H * int_0^s |H| + beta_1 * int_0^s |A|.

Evaluating this quadrature on trajectories recorded by the solver gives an
independent cross-check of the computed N field. The inner history
integrals use cumulative trapezoids on the recorded samples; the outer
integral interpolates the exponent g linearly on each panel and integrates
the resulting exponential exactly, which makes the rule exact whenever the
coupling vanishes (A = H = 0) and keeps every intermediate exponent
nonpositive, so nothing overflows however long the horizon.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .core import ModelParams
from .reaction import reaction_rhs

if TYPE_CHECKING:  # pragma: no cover
    from .integrator import RunResult


class TrajectoryRangeError(ValueError):
    """Requested evaluation time exceeds the recorded trajectory."""


class NonPositiveSamplesError(ValueError):
    """ratio_g requires strictly positive samples."""


class MissingTrajectoriesError(ValueError):
    """The run result carries no recorded trajectories."""


@dataclass
class NodeTrajectory:
    """Per-step A and H samples at one grid node.

    times must be strictly increasing and start at 0; the three arrays
    have equal length.
    """

    times: np.ndarray
    a_values: np.ndarray
    h_values: np.ndarray

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.a_values = np.asarray(self.a_values, dtype=float)
        self.h_values = np.asarray(self.h_values, dtype=float)
        if not (len(self.times) == len(self.a_values) == len(self.h_values)):
            raise ValueError("trajectory arrays must have equal length")
        if len(self.times) == 0:
            raise ValueError("trajectory must not be empty")
        if self.times[0] != 0.0:
            raise ValueError("trajectory must start at t = 0")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("trajectory times must be strictly increasing")

    def refined(self, factor: int) -> "NodeTrajectory":
        """Linearly subsample each panel ``factor`` times.

        Used to quantify quadrature error: the refined trajectory carries
        the same information, so the change in a computed functional
        estimates its discretization error.
        """
        if factor < 1:
            raise ValueError("factor must be >= 1")
        if factor == 1:
            return self
        t = self.times
        fine = np.concatenate(
            [
                np.linspace(t[k], t[k + 1], factor, endpoint=False)
                for k in range(len(t) - 1)
            ]
            + [t[-1:]]
        )
        return NodeTrajectory(
            times=fine,
            a_values=np.interp(fine, t, self.a_values),
            h_values=np.interp(fine, t, self.h_values),
        )


def _cumtrapz(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Cumulative trapezoidal integral, zero at the first node."""
    panels = 0.5 * (values[1:] + values[:-1]) * np.diff(times)
    out = np.empty_like(times)
    out[0] = 0.0
    np.cumsum(panels, out=out[1:])
    return out


def _truncate(traj: NodeTrajectory, t: float):
    """Samples up to time ``t``, appending an interpolated endpoint if needed."""
    times = traj.times
    if t < 0.0:
        raise TrajectoryRangeError("t must be >= 0")
    if t > times[-1] * (1.0 + 1e-12) + 1e-300:
        raise TrajectoryRangeError(
            f"t={t!r} exceeds recorded trajectory end {times[-1]!r}"
        )
    t = min(t, float(times[-1]))
    k = int(np.searchsorted(times, t, side="left"))
    if k < len(times) and times[k] == t:
        sl = slice(0, k + 1)
        return times[sl], traj.a_values[sl], traj.h_values[sl]
    ts = np.concatenate([times[:k], [t]])
    a = np.concatenate([traj.a_values[:k], [np.interp(t, times, traj.a_values)]])
    h = np.concatenate([traj.h_values[:k], [np.interp(t, times, traj.h_values)]])
    return ts, a, h


def theta(traj: NodeTrajectory, n0: float, p: ModelParams, t: float) -> float:
    """Exact-ODE value of N at time t from the node's A and H histories."""
    times, a, h = _truncate(traj, t)
    if len(times) == 1:
        return float(n0)
    g = (
        p.mu_N * times
        + (p.alpha_H * p.gamma_H) * _cumtrapz(np.abs(h), times)
        + p.beta_1 * _cumtrapz(np.abs(a), times)
    )
    shifted = g - g[-1]  # <= 0 because g is nondecreasing
    dg = np.diff(g)
    # integral of exp(shifted) with the exponent linear on each panel
    phi = np.ones_like(dg)
    nz = dg != 0.0
    phi[nz] = np.expm1(dg[nz]) / dg[nz]
    integral = float(np.sum(np.diff(times) * np.exp(shifted[:-1]) * phi))
    return float(n0 * np.exp(shifted[0]) + p.r_N * integral)


def ratio_g(f_samples: Sequence[float], times: Sequence[float]) -> np.ndarray:
    """Running integral of f divided by its current value, per sample.

    For positive nondecreasing f this ratio never exceeds the elapsed
    time, which is the mechanism bounding the N quadrature above.
    """
    f = np.asarray(f_samples, dtype=float)
    ts = np.asarray(times, dtype=float)
    if f.shape != ts.shape or f.ndim != 1 or len(f) == 0:
        raise ValueError("f_samples and times must be equal-length 1D arrays")
    if np.any(f <= 0.0):
        raise NonPositiveSamplesError("all samples must be > 0")
    if np.any(np.diff(ts) <= 0.0):
        raise ValueError("times must be strictly increasing")
    return _cumtrapz(f, ts) / f


@dataclass(frozen=True)
class ThetaBounds:
    """A-priori bounds on the N quadrature over a horizon T."""

    upper: float
    lipschitz_c1: float


def theta_upper_bound(n0_max: float, p: ModelParams, t_horizon: float) -> float:
    return n0_max + p.r_N * t_horizon


def lipschitz_c1(
    p: ModelParams,
    t_horizon: float,
    n0_max: float,
    sup_h1: float,
    sup_h2: float,
    sup_a1: float,
    sup_a2: float,
) -> float:
    """Explicit constant bounding |theta_1 - theta_2| by the history gap.

    Assembled term by term from the sup-norms of the two history pairs;
    multiplied by max(||A1 - A2||_inf, ||H1 - H2||_inf) it dominates the
    change of the quadrature value. The acid-history direction carries
    alpha_H*gamma_H, the tumor direction beta_1.
    """
    ag = p.alpha_H * p.gamma_H
    b1 = p.beta_1
    T = t_horizon
    emt = np.exp(p.mu_N * T)
    base = n0_max * (b1 * T + ag * T)
    grow = p.r_N * (
        emt * T * T * np.exp(ag * sup_h2) * b1
        + emt * T * T * np.exp(b1 * T * sup_a1) * ag
        + b1 * T * T * emt * np.exp(ag * T * sup_h2) * np.exp(b1 * T * sup_a2)
        + ag * T * T * emt * np.exp(ag * T * sup_h2) * np.exp(b1 * T * sup_a2)
    )
    return float(base + grow)


def theta_bounds(
    p: ModelParams,
    t_horizon: float,
    n0_max: float,
    sup_h: float,
    sup_a: float,
) -> ThetaBounds:
    """Bounds for trajectory pairs dominated by the given sup-norms."""
    return ThetaBounds(
        upper=theta_upper_bound(n0_max, p, t_horizon),
        lipschitz_c1=lipschitz_c1(
            p, t_horizon, n0_max, sup_h, sup_h, sup_a, sup_a
        ),
    )


def ode_reference_run(
    p: ModelParams,
    n0: float,
    a0: float,
    h0: float,
    t_end: float,
    dt: float,
):
    """RK4 trajectory of the spatially homogeneous (0-D) system.

    Serves as an oracle for full grid runs started from constant fields:
    diffusion of a constant field vanishes, so every node must follow
    this trajectory. Steps and final-step shortening mirror the grid
    integrator. Returns (times, N, A, H) arrays including t = 0.
    """
    if min(n0, a0, h0) < 0.0:
        raise ValueError("initial values must be nonnegative")
    if a0 > p.k_A:
        raise ValueError("a0 must not exceed k_A")
    if not (dt > 0.0 and t_end > 0.0):
        raise ValueError("dt and t_end must be positive")

    def step(n, a, h, hstep):
        k1 = reaction_rhs(n, a, h, p)
        k2 = reaction_rhs(
            n + 0.5 * hstep * k1[0], a + 0.5 * hstep * k1[1], h + 0.5 * hstep * k1[2], p
        )
        k3 = reaction_rhs(
            n + 0.5 * hstep * k2[0], a + 0.5 * hstep * k2[1], h + 0.5 * hstep * k2[2], p
        )
        k4 = reaction_rhs(
            n + hstep * k3[0], a + hstep * k3[1], h + hstep * k3[2], p
        )
        w = hstep / 6.0
        return (
            n + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            a + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            h + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        )

    m = max(1, int(np.ceil(t_end / dt - 1e-9)))
    times = [0.0]
    ns, as_, hs = [float(n0)], [float(a0)], [float(h0)]
    n, a, h = float(n0), float(a0), float(h0)
    for j in range(m):
        if j < m - 1:
            hstep = dt
            t_next = (j + 1) * dt
        else:
            hstep = t_end - (m - 1) * dt
            t_next = t_end
        n, a, h = step(n, a, h, hstep)
        times.append(t_next)
        ns.append(n)
        as_.append(a)
        hs.append(h)
    return np.array(times), np.array(ns), np.array(as_), np.array(hs)


def verify_n_field(
    result: "RunResult",
    p: ModelParams,
    sample_nodes: Sequence[tuple[int, int]] | None = None,
) -> float:
    """Largest relative gap between solver N and the quadrature value.

    Compares every requested node at every snapshot time against the
    quadrature applied to that node's recorded history. The run must have
    been made with trajectory recording enabled.
    """
    if not result.trajectories:
        raise MissingTrajectoriesError(
            "run result has no recorded trajectories; rerun with recording enabled"
        )
    nodes = list(sample_nodes) if sample_nodes is not None else sorted(
        result.trajectories
    )
    n0 = result.config.init.N0_const
    worst = 0.0
    for node in nodes:
        traj = result.trajectories.get(tuple(node))
        if traj is None:
            raise MissingTrajectoriesError(f"no trajectory recorded at node {node}")
        for t_snap, state in result.snapshots:
            expected = theta(traj, n0, p, t_snap)
            actual = float(state.N[node[0], node[1]])
            rel = abs(actual - expected) / max(abs(expected), 1e-300)
            worst = max(worst, rel)
    return worst
