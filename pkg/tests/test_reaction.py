from dataclasses import replace

import numpy as np
import pytest

from acidfront import (
    BoundaryKind,
    GridSpec,
    ScenarioConfig,
    SimState,
    build_initial_state,
    full_rhs,
    reaction_rhs,
)
from acidfront.kernels import rhs_into
from acidfront.scenarios import BASELINE_INIT, BASELINE_PARAMS

P = BASELINE_PARAMS


def test_healthy_equilibrium_is_stationary():
    # N = r_N/mu_N with no tumor and no acid kills every term
    dn, da, dh = reaction_rhs(1.0, 0.0, 0.0, P)
    assert (dn, da, dh) == (0.0, 0.0, 0.0)


def test_coexistence_point_hand_value():
    # independent evaluation of the three formulas at (1, 1, 0):
    #   dn = 1 - 1 - 1.5*1*1 - 0        = -1.5
    #   da = 1*(1 - 1) - 0.1*1 - 1*1*1  = -1.1
    #   dh = 2*1 - 0 - 0                =  2.0
    dn, da, dh = reaction_rhs(1.0, 1.0, 0.0, P)
    assert dn == pytest.approx(-1.5, abs=1e-15)
    assert da == pytest.approx(-1.1, abs=1e-15)
    assert dh == pytest.approx(2.0, abs=1e-15)


def test_acid_balance_without_normal_cells():
    h_star = P.nu * P.k_A / P.tau_H  # production balances clearance at n = 0
    _, _, dh = reaction_rhs(0.0, P.k_A, h_star, P)
    assert dh == pytest.approx(0.0, abs=1e-15)


def _analytic_jacobian(n, a, h, p):
    return np.array([
        [-p.mu_N - p.beta_1 * a - p.alpha_H * p.gamma_H * h,
         -p.beta_1 * n,
         -p.alpha_H * p.gamma_H * n],
        [-p.beta_3 * a,
         p.r_A * (1.0 - 2.0 * a / p.k_A) - (p.mu_A + p.eps_A) - p.beta_3 * n,
         0.0],
        [-p.gamma_H * h, p.nu, -p.tau_H - p.gamma_H * n],
    ])


def test_jacobian_matches_finite_differences(rng):
    for _ in range(20):
        state = rng.uniform(0.0, 2.0, size=3)
        jac = _analytic_jacobian(*state, P)
        fd = np.zeros((3, 3))
        eps = 1e-6
        for k in range(3):
            up, dn_ = state.copy(), state.copy()
            up[k] += eps
            dn_[k] -= eps
            fd[:, k] = (np.array(reaction_rhs(*up, P)) -
                        np.array(reaction_rhs(*dn_, P))) / (2 * eps)
        scale = np.abs(jac).max()
        assert np.abs(fd - jac).max() <= 1e-6 * max(scale, 1.0)


def test_tumor_axis_invariance(rng):
    # a = 0 decouples the tumor equation and strips acid production
    for _ in range(10):
        n, h = rng.uniform(0.0, 3.0, size=2)
        dn, da, dh = reaction_rhs(n, 0.0, h, P)
        assert da == 0.0
        assert dh == pytest.approx(-P.tau_H * h - P.gamma_H * n * h, abs=1e-14)


def test_no_growth_beyond_capacity(rng):
    for _ in range(20):
        n = float(rng.uniform(0.0, 3.0))
        _, da, _ = reaction_rhs(n, P.k_A, 0.0, P)
        assert da <= 0.0


def _state(n, boundary=BoundaryKind.NEUMANN, init=BASELINE_INIT):
    cfg = ScenarioConfig(
        params=P,
        grid=GridSpec(L=1.0, n=n, boundary=boundary),
        t_end=1.0,
        snapshot_times=(),
        init=init,
    )
    return cfg.grid, build_initial_state(cfg)


def test_full_rhs_without_diffusion_equals_reaction(rng):
    p0 = replace(P, xi_A=0.0, xi_H=0.0)
    grid = GridSpec(L=1.0, n=13)
    s = SimState(0.0, rng.uniform(0, 2, (13, 13)), rng.uniform(0, 1, (13, 13)),
                 rng.uniform(0, 2, (13, 13)))
    d = full_rhs(s, p0, grid)
    dn, da, dh = reaction_rhs(s.N, s.A, s.H, p0)
    assert np.array_equal(d.dN, dn)
    assert np.array_equal(d.dA, da)
    assert np.array_equal(d.dH, dh)


def test_homogeneous_equilibrium_has_zero_derivative():
    grid = GridSpec(L=1.0, n=21)
    s = SimState(0.0, np.ones((21, 21)), np.zeros((21, 21)), np.zeros((21, 21)))
    d = full_rhs(s, P, grid)
    assert np.all(d.dN == 0.0) and np.all(d.dA == 0.0) and np.all(d.dH == 0.0)


def test_bump_with_no_acid_production():
    p0 = replace(P, nu=0.0)
    grid, s = _state(41)
    d = full_rhs(s, p0, grid)
    assert np.all(d.dH == 0.0)  # nothing produced, nothing to clear
    assert np.all(d.dN[s.A > 0.0] <= 0.0)  # tumor only damages normal cells


def test_single_node_perturbation_spreads():
    grid = GridSpec(L=1.0, n=21)
    A = np.zeros((21, 21))
    A[10, 10] = 1e-3
    s = SimState(0.0, np.ones((21, 21)), A, np.zeros((21, 21)))
    d = full_rhs(s, P, grid)
    assert d.dA[10, 10] < 0.0
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        assert d.dA[10 + di, 10 + dj] > 0.0


def test_dirichlet_rhs_pins_diffusing_fields():
    grid, s = _state(15, boundary=BoundaryKind.DIRICHLET,
                     init=replace(BASELINE_INIT, A0_decay=2.0, H0_const=0.0))
    d = full_rhs(s, P, grid)
    for arr in (d.dA, d.dH):
        assert np.all(arr[0, :] == 0.0) and np.all(arr[-1, :] == 0.0)
        assert np.all(arr[:, 0] == 0.0) and np.all(arr[:, -1] == 0.0)
    # N has no boundary condition: its reaction keeps acting on the rim
    dn_rim = d.dN[0, :]
    expected = reaction_rhs(s.N[0, :], s.A[0, :], s.H[0, :], P)[0]
    assert np.array_equal(dn_rim, expected)


@pytest.mark.parametrize("boundary", [BoundaryKind.NEUMANN, BoundaryKind.DIRICHLET])
def test_compiled_kernel_agrees_with_public_rhs(boundary, rng):
    grid = GridSpec(L=1.0, n=19, boundary=boundary)
    s = SimState(0.0, rng.uniform(0, 2, (19, 19)), rng.uniform(0, 1, (19, 19)),
                 rng.uniform(0, 2, (19, 19)))
    if boundary is BoundaryKind.DIRICHLET:
        for f in (s.A, s.H):
            f[0, :] = f[-1, :] = f[:, 0] = f[:, -1] = 0.0
    d = full_rhs(s, P, grid)
    y = np.stack([s.N, s.A, s.H])
    out = np.empty_like(y)
    rhs_into(y, out, P, grid, boundary is BoundaryKind.NEUMANN)
    scale = max(np.abs(out).max(), 1.0)
    assert np.abs(out[0] - d.dN).max() <= 1e-13 * scale
    assert np.abs(out[1] - d.dA).max() <= 1e-13 * scale
    assert np.abs(out[2] - d.dH).max() <= 1e-13 * scale
