import numpy as np
import pytest

from acidfront import GridSpec, InitRecipe, ModelParams, ScenarioConfig, SimState


def tumor_mass(state: SimState, grid: GridSpec) -> float:
    """Trapezoid-weighted total tumor burden."""
    return float(np.sum(grid.quad_weights() * state.A))


def make_violating_cfg() -> ScenarioConfig:
    """Configuration whose single giant step provably breaks the N bound.

    A tiny diffusion coefficient makes the stability formula allow a step
    far beyond the reaction scale, so RK4 amplifies the decaying N mode to
    a huge positive value that the monitor must flag.
    """
    params = ModelParams(
        r_N=0.0, mu_N=0.0, beta_1=2000.0, beta_3=0.0, alpha_H=0.0,
        gamma_H=0.0, r_A=0.0, k_A=1.0, mu_A=0.0, eps_A=0.0, nu=0.0,
        tau_H=0.0, xi_A=0.0, xi_H=1e-6,
    )
    return ScenarioConfig(
        params=params,
        grid=GridSpec(L=1.0, n=11),
        t_end=5.0,
        snapshot_times=(5.0,),
        init=InitRecipe(N0_const=1.0, A0_amplitude=0.5, A0_decay=0.0,
                        H0_const=0.0),
    )


def random_state(rng, n: int, t: float = 1.25) -> SimState:
    return SimState(
        t,
        rng.uniform(0.0, 2.0, (n, n)),
        rng.uniform(0.0, 1.0, (n, n)),
        rng.uniform(0.0, 3.0, (n, n)),
    )


def random_config(rng) -> ScenarioConfig:
    from dataclasses import replace

    from acidfront import BoundaryKind
    from acidfront.core import PARAM_NAMES

    params = ModelParams(**{
        name: float(np.round(rng.uniform(0.0, 3.0), 6)) for name in PARAM_NAMES
    })
    params = replace(params, k_A=float(rng.uniform(0.5, 2.0)),
                     mu_N=float(rng.uniform(0.1, 2.0)))
    n = int(rng.integers(3, 40))
    k = int(rng.integers(0, 4))
    t_end = float(rng.uniform(1.0, 20.0))
    snaps = tuple(np.sort(rng.uniform(0.0, t_end, k)).tolist())
    if len(set(snaps)) != len(snaps):
        snaps = ()
    boundary = BoundaryKind.NEUMANN if rng.integers(0, 2) else BoundaryKind.DIRICHLET
    return ScenarioConfig(
        params=params,
        grid=GridSpec(L=float(rng.uniform(0.5, 3.0)), n=n, boundary=boundary),
        t_end=t_end,
        snapshot_times=snaps,
        init=InitRecipe(
            N0_const=float(rng.uniform(0.0, 2.0)),
            A0_amplitude=float(rng.uniform(0.0, params.k_A)),
            A0_decay=float(rng.uniform(0.0, 2000.0)),
            H0_const=float(rng.uniform(0.0, 1.0)),
        ),
        cfl_safety=float(rng.uniform(0.1, 1.0)),
        tol=float(rng.uniform(0.0, 1e-6)),
    )


@pytest.fixture
def violating_cfg() -> ScenarioConfig:
    return make_violating_cfg()


@pytest.fixture
def rng():
    return np.random.default_rng(987123)
