"""Discrete velocity space: grids, moments, Maxwellians and relaxation physics.

The kinetic state at a spatial point is a pair of reduced distributions
(g1, g2) sampled on a fixed uniform velocity grid.  All routines here are
pure functions and broadcast over an arbitrary number of leading axes, so a
whole point cloud can be processed in one call with arrays of shape
``(N, K)`` where ``K`` is the number of velocity nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOLTZMANN_CONSTANT = 1.380649e-23

#: Hard-sphere argon diameter; reproduces a mean free path of 1.10e-4 at
#: rho = 1e-3, R = 208 to better than 1%.
DEFAULT_MOLECULAR_DIAMETER = 3.68e-10


@dataclass(frozen=True)
class GasProperties:
    """Gas constant per unit mass and hard-sphere molecular diameter."""

    R: float
    d: float = DEFAULT_MOLECULAR_DIAMETER
    kB: float = BOLTZMANN_CONSTANT

    def __post_init__(self):
        if self.R <= 0 or self.d <= 0 or self.kB <= 0:
            raise ValueError("gas properties must be strictly positive")


@dataclass(frozen=True)
class MacroState:
    """Macroscopic state (density, mean velocity, temperature) at a point."""

    rho: float
    U: np.ndarray
    T: float

    def __post_init__(self):
        object.__setattr__(self, "U", np.atleast_1d(np.asarray(self.U, dtype=float)))
        if self.rho < 0:
            raise ValueError(f"negative density {self.rho}")
        if self.T < 0:
            raise ValueError(f"negative temperature {self.T}")

    def internal_energy(self, R: float) -> float:
        return 1.5 * R * self.T

    def total_energy(self, R: float) -> float:
        return self.rho * self.internal_energy(R) + 0.5 * self.rho * float(self.U @ self.U)

    def pressure(self, R: float) -> float:
        return self.rho * R * self.T


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform tensor grid on [-vmax, vmax]^dim with trapezoidal weights.

    ``nodes`` is the flattened tensor product, shape (K, dim); ``weights``
    are the matching quadrature weights summing to (2*vmax)**dim.
    """

    dim: int
    vmax: float
    Nv: int
    axis_nodes: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def dv(self) -> float:
        return 2.0 * self.vmax / self.Nv

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]


def make_velocity_grid(dim: int, vmax: float, Nv: int) -> VelocityGrid:
    """Build the discrete velocity grid v_j = -vmax + (j-1)*dv, j=1..Nv+1."""
    if dim not in (1, 2):
        raise ValueError(f"velocity dimension must be 1 or 2, got {dim}")
    if Nv < 1:
        raise ValueError(f"Nv must be >= 1, got {Nv}")
    if vmax <= 0:
        raise ValueError(f"vmax must be positive, got {vmax}")
    axis = np.linspace(-vmax, vmax, Nv + 1)
    dv = 2.0 * vmax / Nv
    w1 = np.full(Nv + 1, dv)
    w1[0] = w1[-1] = 0.5 * dv
    if dim == 1:
        nodes = axis[:, None]
        weights = w1
    else:
        vx, vy = np.meshgrid(axis, axis, indexing="ij")
        nodes = np.column_stack([vx.ravel(), vy.ravel()])
        weights = np.outer(w1, w1).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    axis.setflags(write=False)
    return VelocityGrid(dim=dim, vmax=vmax, Nv=Nv, axis_nodes=axis, nodes=nodes, weights=weights)


def reduced_maxwellians(rho, U, T, grid: VelocityGrid, R: float):
    """Reduced equilibrium pair (G1, G2) for macroscopic state (rho, U, T).

    1D: G1 = rho/sqrt(2 pi R T) exp(-(v-U)^2/(2RT)),  G2 = 2RT G1.
    2D: G1 = rho/(2 pi R T)  exp(-|v-U|^2/(2RT)),     G2 = RT G1.

    Broadcasts over leading axes of rho, U, T; returns arrays (..., K).
    Vacuum points (rho == 0) yield zero distributions for any T >= 0.
    """
    rho = np.asarray(rho, dtype=float)
    T = np.asarray(T, dtype=float)
    U = np.asarray(U, dtype=float)
    if U.ndim == rho.ndim:  # scalar velocity in 1D
        U = U[..., None]
    if np.any((T <= 0) & (rho > 0)):
        raise ValueError("degenerate Maxwellian: T <= 0 with rho > 0")
    Tsafe = np.where(T > 0, T, 1.0)
    # squared relative speed at every node, shape (..., K)
    dvrel = grid.nodes - U[..., None, :]
    q2 = np.einsum("...kd,...kd->...k", dvrel, dvrel)
    rt = R * Tsafe
    if grid.dim == 1:
        norm = rho / np.sqrt(2.0 * np.pi * rt)
        g2fac = 2.0 * rt
    else:
        norm = rho / (2.0 * np.pi * rt)
        g2fac = rt
    g1 = norm[..., None] * np.exp(-q2 / (2.0 * rt[..., None]))
    g1 = np.where((rho > 0)[..., None], g1, 0.0)
    g2 = g2fac[..., None] * g1
    return g1, g2


def compute_moments(g1, g2, grid: VelocityGrid, R: float):
    """Recover (rho, U, T) from a reduced pair by discrete quadrature.

    3 rho R T = int |v-U|^2 g1 dv + int g2 dv in both 1D and 2D; the g2
    integral supplies the out-of-plane thermal energy.  Vacuum points
    (rho == 0) return U = 0, T = 0.  Raises on negative density.
    """
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    w = grid.weights
    rho = g1 @ w
    if np.any(rho < 0):
        raise ValueError("negative density recovered from distribution")
    mom = np.einsum("...k,k,kd->...d", g1, w, grid.nodes)
    rho_safe = np.where(rho > 0, rho, 1.0)
    U = mom / rho_safe[..., None]
    U = np.where((rho > 0)[..., None], U, 0.0)
    dvrel = grid.nodes - U[..., None, :]
    q2 = np.einsum("...kd,...kd->...k", dvrel, dvrel)
    e2 = np.einsum("...k,k->...", g1 * q2 + g2, w)
    T = e2 / (3.0 * R * rho_safe)
    T = np.where(rho > 0, T, 0.0)
    return rho, U, T


def relaxation_time(rho, T, gas: GasProperties):
    """BGK relaxation time tau = 4 lambda / (pi Cbar) for a hard-sphere gas.

    Cbar = sqrt(8 R T / pi) is the mean thermal speed and
    lambda = kB / (sqrt(2) pi rho R d^2) the mean free path.
    """
    rho = np.asarray(rho, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(rho <= 0) or np.any(T <= 0):
        raise ValueError("relaxation_time requires rho > 0 and T > 0")
    lam = gas.kB / (np.sqrt(2.0) * np.pi * rho * gas.R * gas.d**2)
    cbar = np.sqrt(8.0 * gas.R * T / np.pi)
    return 4.0 * lam / (np.pi * cbar)


def mean_free_path(rho, gas: GasProperties):
    rho = np.asarray(rho, dtype=float)
    return gas.kB / (np.sqrt(2.0) * np.pi * rho * gas.R * gas.d**2)


def stress_tensor(g1, grid: VelocityGrid, Uw):
    """Second moment of g1 about the wall velocity Uw.

    1D: scalar phi = int (v - Uw)^2 g1 dv.
    2D: in-plane 2x2 tensor int (v-Uw) x (v-Uw) g1 dv (the out-of-plane
    g2 contribution does not enter in-plane tractions).
    Broadcasts over leading axes; Uw broadcasts like U in
    :func:`reduced_maxwellians`.
    """
    g1 = np.asarray(g1, dtype=float)
    Uw = np.asarray(Uw, dtype=float)
    if Uw.ndim == g1.ndim - 1:  # scalar wall velocity in 1D
        Uw = Uw[..., None]
    dvrel = grid.nodes - Uw[..., None, :]
    gw = g1 * grid.weights
    phi = np.einsum("...k,...kd,...ke->...de", gw, dvrel, dvrel)
    if grid.dim == 1:
        return phi[..., 0, 0]
    return phi
