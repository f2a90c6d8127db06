"""Runtime checks of the solution bounds the model is known to satisfy.

A valid trajectory keeps N, A, H nonnegative, A at or below the carrying
capacity k_A, and N at or below max(N0_max, r_N/mu_N) (with the weaker
horizon ceiling N0_max + r_N*T kept as a sanity check). The monitor only
reports; whether a violation aborts the run is the caller's decision.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams, SimState


@dataclass(frozen=True)
class ViolationReport:
    """Worst bound violations seen in one or more states (magnitudes >= 0)."""

    worst_negative_N: float = 0.0
    worst_negative_A: float = 0.0
    worst_negative_H: float = 0.0
    worst_A_excess_over_kA: float = 0.0
    worst_N_excess_over_bound: float = 0.0
    first_violation_time: float | None = None
    violation_count: int = 0

    @property
    def clean(self) -> bool:
        return self.violation_count == 0

    def merged(self, other: "ViolationReport") -> "ViolationReport":
        """Combine reports from different states (union of violations)."""
        times = [
            t for t in (self.first_violation_time, other.first_violation_time)
            if t is not None
        ]
        return ViolationReport(
            worst_negative_N=max(self.worst_negative_N, other.worst_negative_N),
            worst_negative_A=max(self.worst_negative_A, other.worst_negative_A),
            worst_negative_H=max(self.worst_negative_H, other.worst_negative_H),
            worst_A_excess_over_kA=max(
                self.worst_A_excess_over_kA, other.worst_A_excess_over_kA
            ),
            worst_N_excess_over_bound=max(
                self.worst_N_excess_over_bound, other.worst_N_excess_over_bound
            ),
            first_violation_time=min(times) if times else None,
            violation_count=self.violation_count + other.violation_count,
        )


def n_upper_bounds(p: ModelParams, n0_max: float, t_horizon: float) -> tuple[float, float]:
    """(sharp, ceiling) upper bounds for N.

    The sharp bound max(n0_max, r_N/mu_N) follows from dN/dt <= r_N - mu_N*N;
    it degenerates to infinity when mu_N = 0. The ceiling n0_max + r_N*T
    always holds on [0, T].
    """
    sharp = max(n0_max, p.r_N / p.mu_N) if p.mu_N > 0.0 else float("inf")
    ceiling = n0_max + p.r_N * t_horizon
    return sharp, ceiling


def check_state(
    s: SimState,
    p: ModelParams,
    n0_max: float,
    t_horizon: float,
    tol: float,
) -> ViolationReport:
    """Scan one state for bound violations beyond ``tol``.

    Pure function: checking the same state twice yields the same report.
    violation_count counts violating (node, check) pairs.
    """
    sharp, ceiling = n_upper_bounds(p, n0_max, t_horizon)
    n_bound = min(sharp, ceiling)

    min_n = float(s.N.min())
    min_a = float(s.A.min())
    min_h = float(s.H.min())
    max_a = float(s.A.max())
    max_n = float(s.N.max())

    count = 0
    worst_neg_n = worst_neg_a = worst_neg_h = 0.0
    worst_a_excess = worst_n_excess = 0.0

    if min_n < -tol:
        worst_neg_n = -min_n
        count += int(np.count_nonzero(s.N < -tol))
    if min_a < -tol:
        worst_neg_a = -min_a
        count += int(np.count_nonzero(s.A < -tol))
    if min_h < -tol:
        worst_neg_h = -min_h
        count += int(np.count_nonzero(s.H < -tol))
    if max_a > p.k_A + tol:
        worst_a_excess = max_a - p.k_A
        count += int(np.count_nonzero(s.A > p.k_A + tol))
    if max_n > n_bound + tol:
        worst_n_excess = max_n - n_bound
        count += int(np.count_nonzero(s.N > n_bound + tol))

    return ViolationReport(
        worst_negative_N=worst_neg_n,
        worst_negative_A=worst_neg_a,
        worst_negative_H=worst_neg_h,
        worst_A_excess_over_kA=worst_a_excess,
        worst_N_excess_over_bound=worst_n_excess,
        first_violation_time=s.t if count else None,
        violation_count=count,
    )
