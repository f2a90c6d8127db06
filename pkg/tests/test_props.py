from acidfront.props import (
    run_property_sweeps,
    sweep_lipschitz,
    sweep_ratio_g,
    sweep_theta_bound,
    sweep_theta_monotonicity,
)
from acidfront.scenarios import BASELINE_PARAMS

P = BASELINE_PARAMS
SEED = 20240
CASES = 300


def test_theta_bound_sweep_clean():
    res = sweep_theta_bound(P, SEED, CASES)
    assert res.violations == 0
    assert res.worst_margin <= 1e-9


def test_monotonicity_sweep_clean():
    res = sweep_theta_monotonicity(P, SEED, CASES)
    assert res.violations == 0


def test_lipschitz_sweep_clean():
    res = sweep_lipschitz(P, SEED, CASES)
    assert res.violations == 0


def test_ratio_g_sweep_clean():
    res = sweep_ratio_g(SEED, CASES)
    assert res.violations == 0
    assert res.worst_margin <= 1e-9


def test_lipschitz_sweep_detects_weakened_constant():
    # sensitivity hook: the sweep must notice a constant that is too small
    res = sweep_lipschitz(P, SEED, CASES, c1_scale=0.5)
    assert res.violations > 0


def test_sweeps_are_seed_deterministic():
    a = run_property_sweeps(SEED, 50)
    b = run_property_sweeps(SEED, 50)
    assert a == b
    c = run_property_sweeps(SEED + 1, 50)
    assert any(x.worst_margin != y.worst_margin for x, y in zip(a, c))
