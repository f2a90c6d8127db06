"""Seeded randomized sweeps of the quadrature and bound properties.

Each sweep draws its cases from an independent deterministic stream, so
the same seed always reproduces the same cases, counts, and margins.
A margin is (measured quantity - bound): nonpositive means the property
held for that case.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams
from .scenarios import BASELINE_PARAMS
from .theta import NodeTrajectory, lipschitz_c1, ratio_g, theta, theta_upper_bound

SLACK = 1e-9


@dataclass(frozen=True)
class SweepResult:
    name: str
    cases: int
    violations: int
    worst_margin: float

    @property
    def clean(self) -> bool:
        return self.violations == 0

    def line(self) -> str:
        return (
            f"{self.name}: cases={self.cases} violations={self.violations} "
            f"worst_margin={self.worst_margin!r}"
        )


def _random_times(rng: np.random.Generator, t_horizon: float) -> np.ndarray:
    k = int(rng.integers(2, 40))
    interior = rng.uniform(0.0, t_horizon, size=k)
    return np.unique(np.concatenate([[0.0], interior, [t_horizon]]))


def _random_values(
    rng: np.random.Generator, m: int, amplitude: float
) -> np.ndarray:
    style = int(rng.integers(0, 3))
    if style == 0:
        return rng.uniform(0.0, amplitude, size=m)
    if style == 1:
        return np.full(m, rng.uniform(0.0, amplitude))
    steps = rng.uniform(0.0, amplitude / max(m, 1), size=m)
    return np.minimum(np.cumsum(steps), amplitude)


def _random_trajectory(
    rng: np.random.Generator, t_horizon: float, max_a: float, max_h: float
) -> NodeTrajectory:
    times = _random_times(rng, t_horizon)
    return NodeTrajectory(
        times=times,
        a_values=_random_values(rng, len(times), max_a),
        h_values=_random_values(rng, len(times), max_h),
    )


def sweep_theta_bound(
    p: ModelParams, seed, cases: int = 1000
) -> SweepResult:
    """0 <= theta <= n0 + r_N*T, plus the sharper r_N/mu_N cap when it applies."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -np.inf
    for _ in range(cases):
        t_horizon = float(rng.uniform(0.2, 5.0))
        traj = _random_trajectory(rng, t_horizon, max_a=1.0, max_h=2.5)
        n0 = float(rng.uniform(0.0, 2.0))
        upper = theta_upper_bound(n0, p, t_horizon)
        sharp = max(n0, p.r_N / p.mu_N) if p.mu_N > 0.0 else np.inf
        for frac in (0.3, 1.0):
            value = theta(traj, n0, p, frac * t_horizon)
            margin = max(-value, value - min(upper, sharp))
            worst = max(worst, margin)
            if margin > SLACK:
                violations += 1
    return SweepResult("theta_bound", cases, violations, worst)


def sweep_theta_monotonicity(
    p: ModelParams, seed, cases: int = 1000
) -> SweepResult:
    """Raising the A or H history pointwise never raises theta."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -np.inf
    for _ in range(cases):
        t_horizon = float(rng.uniform(0.2, 5.0))
        base = _random_trajectory(rng, t_horizon, max_a=1.0, max_h=2.0)
        bump_a = _random_values(rng, len(base.times), 0.5)
        bump_h = _random_values(rng, len(base.times), 0.5)
        if rng.integers(0, 2):
            bump_h = np.zeros_like(bump_h)
        raised = NodeTrajectory(
            times=base.times.copy(),
            a_values=base.a_values + bump_a,
            h_values=base.h_values + bump_h,
        )
        n0 = float(rng.uniform(0.0, 2.0))
        margin = theta(raised, n0, p, t_horizon) - theta(base, n0, p, t_horizon)
        worst = max(worst, margin)
        if margin > SLACK:
            violations += 1
    return SweepResult("theta_monotonicity", cases, violations, worst)


def sweep_lipschitz(
    p: ModelParams, seed, cases: int = 1000, c1_scale: float = 1.0
) -> SweepResult:
    """|theta_1 - theta_2| <= C1 * max(||dA||, ||dH||) with the explicit C1.

    c1_scale is a test hook: scaling the constant below 1 must produce
    violations, demonstrating the sweep is sensitive.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -np.inf
    for case in range(cases):
        if case % 3 == 0:
            # near-tight corner: short horizon, zero base, equal constant
            # perturbations in both directions (bound ratio approaches 1)
            t_horizon = float(np.exp(rng.uniform(np.log(0.02), np.log(0.5))))
            times = _random_times(rng, t_horizon)
            base = NodeTrajectory(
                times, np.zeros(len(times)), np.zeros(len(times))
            )
            eps = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.1))))
            da = np.full(len(times), eps)
            dh = np.full(len(times), eps)
            n0 = float(rng.uniform(0.5, 2.0))
        else:
            t_horizon = float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
            base = _random_trajectory(rng, t_horizon, max_a=1.0, max_h=1.5)
            scale = float(np.exp(rng.uniform(np.log(1e-4), np.log(0.5))))
            da = _random_values(rng, len(base.times), scale)
            dh = _random_values(rng, len(base.times), scale)
            n0 = float(rng.uniform(0.0, 2.0))
        other = NodeTrajectory(
            times=base.times.copy(),
            a_values=base.a_values + da,
            h_values=base.h_values + dh,
        )
        gap = max(float(np.max(np.abs(da))), float(np.max(np.abs(dh))))
        if gap == 0.0:
            continue
        c1 = lipschitz_c1(
            p,
            t_horizon,
            n0,
            sup_h1=float(np.max(base.h_values)),
            sup_h2=float(np.max(other.h_values)),
            sup_a1=float(np.max(base.a_values)),
            sup_a2=float(np.max(other.a_values)),
        )
        bound = c1_scale * c1 * gap
        diff = 0.0
        for frac in (0.5, 1.0):
            t_eval = frac * t_horizon
            diff = max(
                diff,
                abs(theta(base, n0, p, t_eval) - theta(other, n0, p, t_eval)),
            )
        margin = diff - bound
        worst = max(worst, margin)
        if margin > SLACK:
            violations += 1
    return SweepResult("theta_lipschitz", cases, violations, worst)


def sweep_ratio_g(seed, cases: int = 1000, t_horizon: float = 50.0) -> SweepResult:
    """Running-integral ratio of positive nondecreasing samples stays <= min(t, T)."""
    rng = np.random.default_rng(seed)
    violations = 0
    worst = -np.inf
    for _ in range(cases):
        times = _random_times(rng, t_horizon)
        start = float(rng.uniform(1e-6, 2.0))
        increments = rng.uniform(0.0, 1.0, size=len(times))
        increments[rng.uniform(size=len(times)) < 0.5] = 0.0  # step plateaus
        f = start + np.cumsum(increments)
        g = ratio_g(f, times)
        margin = float(np.max(g - np.minimum(times, t_horizon)))
        worst = max(worst, margin)
        if margin > SLACK:
            violations += 1
    return SweepResult("ratio_g", cases, violations, worst)


def run_property_sweeps(
    seed: int,
    cases: int = 1000,
    p: ModelParams = BASELINE_PARAMS,
    c1_scale: float = 1.0,
) -> list[SweepResult]:
    """All four sweeps on independent substreams of the given seed."""
    return [
        sweep_theta_bound(p, [seed, 1], cases),
        sweep_theta_monotonicity(p, [seed, 2], cases),
        sweep_lipschitz(p, [seed, 3], cases, c1_scale=c1_scale),
        sweep_ratio_g([seed, 4], cases),
    ]
