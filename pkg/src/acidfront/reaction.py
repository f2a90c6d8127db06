"""Pointwise reaction terms and the full method-of-lines right-hand side.

The three coupled equations are

    dN/dt =                r_N - mu_N*N - beta_1*N*A - alpha_H*gamma_H*N*H
    dA/dt = xi_A*lap(A) + r_A*A*(1 - A/k_A) - (mu_A + eps_A)*A - beta_3*N*A
    dH/dt = xi_H*lap(H) + nu*A - tau_H*H - gamma_H*N*H

Negative undershoots or capacity overshoots are never clamped here;
positivity is a property of the scheme that the invariant monitor checks,
and silent clamping would mask integrator defects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BoundaryKind, GridSpec, ModelParams, SimState
from .stencil import LaplacianWorkspace, laplacian


@dataclass
class StateDerivative:
    """Time derivative of the (N, A, H) triple on the grid."""

    dN: np.ndarray
    dA: np.ndarray
    dH: np.ndarray


def reaction_rhs(n, a, h, p: ModelParams):
    """Reaction right-hand side at one state; works on scalars or arrays."""
    dn = p.r_N - p.mu_N * n - p.beta_1 * n * a - p.alpha_H * p.gamma_H * n * h
    da = p.r_A * a * (1.0 - a / p.k_A) - (p.mu_A + p.eps_A) * a - p.beta_3 * n * a
    dh = p.nu * a - p.tau_H * h - p.gamma_H * n * h
    return dn, da, dh


def full_rhs(
    s: SimState,
    p: ModelParams,
    grid: GridSpec,
    ws: LaplacianWorkspace | None = None,
) -> StateDerivative:
    """Method-of-lines RHS: reaction everywhere plus diffusion of A and H.

    Under Dirichlet boundaries the A and H derivatives are zero on the
    boundary rim (those values are pinned); N has no boundary condition
    and follows its reaction ODE at every node.
    """
    if ws is None:
        ws = LaplacianWorkspace(grid)
    dn, da, dh = reaction_rhs(s.N, s.A, s.H, p)
    if p.xi_A != 0.0:
        da += p.xi_A * laplacian(s.A, grid, ws)
    if p.xi_H != 0.0:
        dh += p.xi_H * laplacian(s.H, grid, ws)
    if grid.boundary is BoundaryKind.DIRICHLET:
        for d in (da, dh):
            d[0, :] = 0.0
            d[-1, :] = 0.0
            d[:, 0] = 0.0
            d[:, -1] = 0.0
    return StateDerivative(dN=dn, dA=da, dH=dh)
