"""Model parameters, grid geometry, and scenario configuration.

The simulator evolves three scalar fields on a uniform square grid:
normal-cell density N, tumor-cell density A, and excess lactic-acid
concentration H. N follows a pointwise ODE (normal cells do not move);
A and H diffuse. All quantities are double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

PARAM_NAMES = (
    "r_N", "mu_N", "beta_1", "beta_3", "alpha_H", "gamma_H",
    "r_A", "k_A", "mu_A", "eps_A", "nu", "tau_H", "xi_A", "xi_H",
)


class ConfigError(ValueError):
    """Scenario configuration failed validation."""


class InvalidRecipeError(ValueError):
    """Initial-condition recipe violates nonnegativity or capacity limits."""


@dataclass(frozen=True)
class ParamViolation:
    """One violated parameter constraint; ``code`` is machine-readable."""

    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class ModelParams:
    """Rate and diffusion constants of the three-field invasion model.

    Attributes:
        r_N: constant inflow of normal cells [1/time]
        mu_N: natural mortality of normal cells [1/time]
        beta_1: damage of tumor cells on normal cells [1/(density*time)]
        beta_3: damage of normal cells on tumor cells [1/(density*time)]
        alpha_H: cell kill per unit of absorbed acid [dimensionless]
        gamma_H: acid absorption rate by normal cells [1/(density*time)]
        r_A: tumor growth rate [1/time]
        k_A: tumor carrying capacity [density]
        mu_A: tumor natural mortality [1/time]
        eps_A: tumor apoptosis rate [1/time]
        nu: acid production rate per tumor cell [1/time]
        tau_H: acid clearance rate by the vasculature [1/time]
        xi_A: tumor diffusion coefficient [length^2/time]
        xi_H: acid diffusion coefficient [length^2/time]

    All rates must be nonnegative and finite; ``k_A`` must be positive.
    Zero diffusion coefficients are legal (pure-ODE degenerate case).
    """

    r_N: float
    mu_N: float
    beta_1: float
    beta_3: float
    alpha_H: float
    gamma_H: float
    r_A: float
    k_A: float
    mu_A: float
    eps_A: float
    nu: float
    tau_H: float
    xi_A: float
    xi_H: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}


def validate_params(p: ModelParams) -> list[ParamViolation]:
    """Check every parameter constraint; an empty list means ok."""
    violations = []
    for name in PARAM_NAMES:
        value = getattr(p, name)
        if not math.isfinite(value):
            violations.append(ParamViolation("non_finite", f"{name} is not finite"))
        elif value < 0.0:
            violations.append(ParamViolation("negative_rate", f"{name} must be >= 0"))
    if math.isfinite(p.k_A) and p.k_A <= 0.0:
        violations.append(
            ParamViolation("zero_carrying_capacity", "k_A must be > 0")
        )
    return violations


class BoundaryKind(Enum):
    """Boundary condition applied to the diffusing fields A and H."""

    NEUMANN = "neumann"      # zero flux, mirrored ghost nodes
    DIRICHLET = "dirichlet"  # fields pinned to zero on the boundary

    @classmethod
    def from_label(cls, label: str) -> "BoundaryKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(f"unknown boundary kind {label!r}")

    @property
    def label(self) -> str:
        return self.value


@dataclass(frozen=True)
class GridSpec:
    """Uniform square grid on [0, L] x [0, L], boundary nodes included.

    Node (i, j) sits at (i*dx, j*dx) with dx = L/(n-1). dx is fixed at
    construction so that dx*(n-1) reproduces L exactly as stored.
    """

    L: float
    n: int
    boundary: BoundaryKind = BoundaryKind.NEUMANN
    dx: float = field(init=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and self.L > 0.0):
            raise ValueError("L must be positive and finite")
        if self.n < 3:
            raise ValueError("n must be >= 3")
        object.__setattr__(self, "dx", self.L / (self.n - 1))

    def coords(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return np.arange(self.n) * self.dx

    def quad_weights(self) -> np.ndarray:
        """2D trapezoidal quadrature weights, shape (n, n)."""
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return np.outer(w, w)

    def midline_index(self) -> int:
        """Row index of the x1 = L/2 grid line; requires odd n."""
        if self.n % 2 == 0:
            raise ValueError(f"midline L/2 is off-grid for even n={self.n}")
        return (self.n - 1) // 2


def require_field(values: np.ndarray, grid: GridSpec, name: str = "field") -> None:
    """Raise unless ``values`` is a finite n-by-n float array."""
    if values.shape != (grid.n, grid.n):
        raise ValueError(
            f"{name} has shape {values.shape}, expected {(grid.n, grid.n)}"
        )
    if not np.isfinite(values).all():
        raise ValueError(f"{name} contains non-finite values")


@dataclass
class SimState:
    """Solution triple (N, A, H) sampled on one grid at time t.

    Treated as immutable once constructed; integrators return new states
    instead of mutating, so states can be shared freely across threads.
    """

    t: float
    N: np.ndarray
    A: np.ndarray
    H: np.ndarray

    def copy(self) -> "SimState":
        return SimState(self.t, self.N.copy(), self.A.copy(), self.H.copy())

    def validate(self, grid: GridSpec) -> None:
        if self.t < 0.0:
            raise ValueError("t must be >= 0")
        require_field(self.N, grid, "N")
        require_field(self.A, grid, "A")
        require_field(self.H, grid, "H")


@dataclass(frozen=True)
class InitRecipe:
    """Initial-condition family: constant N and H, Gaussian bump in A.

    A(x, 0) = A0_amplitude * exp(-A0_decay * |x - center|^2), with the
    center defaulting to the domain midpoint. A0_decay = 0 gives a
    spatially constant tumor field.
    """

    N0_const: float
    A0_amplitude: float
    A0_decay: float
    H0_const: float
    A0_center: tuple[float, float] | None = None

    def center(self, grid: GridSpec) -> tuple[float, float]:
        if self.A0_center is not None:
            return self.A0_center
        return (grid.L / 2.0, grid.L / 2.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one run.

    snapshot_times must be strictly increasing within [0, t_end]; the
    integrator lands on them exactly. cfl_safety scales the stable step
    size; tol is the invariant-monitor tolerance.
    """

    params: ModelParams
    grid: GridSpec
    t_end: float
    snapshot_times: tuple[float, ...]
    init: InitRecipe
    cfl_safety: float = 0.9
    tol: float = 1e-8

    def validate(self) -> list[str]:
        problems = [str(v) for v in validate_params(self.params)]
        if not (math.isfinite(self.t_end) and self.t_end > 0.0):
            problems.append("t_end must be positive and finite")
        times = self.snapshot_times
        if any(not math.isfinite(t) for t in times):
            problems.append("snapshot_times must be finite")
        elif times:
            if any(b <= a for a, b in zip(times, times[1:])):
                problems.append("snapshot_times must be strictly increasing")
            if times[0] < 0.0 or times[-1] > self.t_end:
                problems.append("snapshot_times must lie within [0, t_end]")
        if not (0.0 < self.cfl_safety <= 1.0):
            problems.append("cfl_safety must be in (0, 1]")
        if not (math.isfinite(self.tol) and self.tol >= 0.0):
            problems.append("tol must be >= 0")
        problems.extend(recipe_problems(self.init, self.params))
        return problems

    def require_valid(self) -> None:
        problems = self.validate()
        if problems:
            raise ConfigError("; ".join(problems))


def recipe_problems(init: InitRecipe, params: ModelParams) -> list[str]:
    """Nonnegativity and capacity checks on the initial-condition recipe."""
    problems = []
    for name in ("N0_const", "A0_amplitude", "A0_decay", "H0_const"):
        if not math.isfinite(getattr(init, name)):
            problems.append(f"{name} must be finite")
    if init.N0_const < 0.0:
        problems.append("N0_const must be >= 0")
    if init.H0_const < 0.0:
        problems.append("H0_const must be >= 0")
    if init.A0_amplitude < 0.0:
        problems.append("A0_amplitude must be >= 0")
    elif math.isfinite(params.k_A) and init.A0_amplitude > params.k_A:
        problems.append("A0_amplitude must not exceed k_A")
    if init.A0_decay < 0.0:
        problems.append("A0_decay must be >= 0")
    return problems


def build_initial_state(cfg: ScenarioConfig) -> SimState:
    """Evaluate the initial-condition recipe on the grid at t = 0.

    The Gaussian bump is assembled from per-axis squared distances so that
    a center on the diagonal yields an exactly symmetric array. Under
    Dirichlet boundaries the A and H boundary rims are pinned to zero.
    """
    problems = recipe_problems(cfg.init, cfg.params)
    if problems:
        raise InvalidRecipeError("; ".join(problems))
    grid = cfg.grid
    init = cfg.init
    N = np.full((grid.n, grid.n), float(init.N0_const))
    H = np.full((grid.n, grid.n), float(init.H0_const))
    cx, cy = init.center(grid)
    x = grid.coords()
    dx2 = (x - cx) ** 2
    dy2 = (x - cy) ** 2
    r2 = dx2[:, None] + dy2[None, :]
    A = init.A0_amplitude * np.exp(-init.A0_decay * r2)
    if grid.boundary is BoundaryKind.DIRICHLET:
        for f in (A, H):
            f[0, :] = 0.0
            f[-1, :] = 0.0
            f[:, 0] = 0.0
            f[:, -1] = 0.0
    return SimState(t=0.0, N=N, A=A, H=H)
