"""Kinetic boundary conditions for boundary points of a cloud.

Boundary points carry full distribution pairs and are advanced like
interior points; after each transport stage the incoming half of their
velocity space, the nodes with (v - U_w) . n > 0 for the inward normal n,
is overwritten from the boundary model:

* far field: incoming nodes take the free-stream Maxwellian,
* diffuse wall: incoming nodes take a wall-temperature Maxwellian whose
  density is set by zero net mass flux through the wall.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from alebgk.cloud import INTERIOR, PointCloud
from alebgk.velocity import VelocityGrid, reduced_maxwellians


@dataclass(frozen=True)
class DiffuseWall:
    """Fully diffuse wall at temperature T; wall velocity comes from motion."""

    T: float


@dataclass(frozen=True)
class FarField:
    """Open boundary with fixed free-stream density, velocity, temperature."""

    rho: float
    U: tuple
    T: float


def _normal_speeds(grid: VelocityGrid, normals, wall_velocity):
    """(v - U_w) . n for every (point, velocity node), shape (P, K)."""
    rel = grid.nodes[None, :, :] - wall_velocity[:, None, :]
    return np.einsum("pkd,pd->pk", rel, normals)


def apply_boundary_conditions(g1, g2, cloud: PointCloud, grid: VelocityGrid,
                              R: float, bcs: dict, wall_velocity=None):
    """Overwrite incoming velocity nodes of all boundary points in place.

    ``bcs`` maps cloud bc ids to DiffuseWall/FarField instances;
    ``wall_velocity`` is an (N, dim) array (defaults to zero walls).
    """
    if wall_velocity is None:
        wall_velocity = np.zeros_like(cloud.x)
    boundary = cloud.kind != INTERIOR
    g2_factor = 2.0 * R if cloud.dim == 1 else R
    for bc_id, bc in bcs.items():
        pts = np.where(boundary & (cloud.bc_id == bc_id))[0]
        if len(pts) == 0:
            continue
        uw = wall_velocity[pts]
        cn = _normal_speeds(grid, cloud.normal[pts], uw)
        incoming = cn > 0
        if isinstance(bc, FarField):
            G1, G2 = reduced_maxwellians(bc.rho, np.asarray(bc.U, dtype=float),
                                         bc.T, grid, R)
            g1[pts] = np.where(incoming, G1[None, :], g1[pts])
            g2[pts] = np.where(incoming, G2[None, :], g2[pts])
        elif isinstance(bc, DiffuseWall):
            ghat, _ = reduced_maxwellians(np.ones(len(pts)), uw,
                                          np.full(len(pts), bc.T), grid, R)
            flux = grid.weights[None, :] * cn
            outgoing_flux = np.sum(np.where(incoming, 0.0, flux * g1[pts]), axis=1)
            incoming_flux = np.sum(np.where(incoming, flux * ghat, 0.0), axis=1)
            sigma = -outgoing_flux / incoming_flux
            emitted = sigma[:, None] * ghat
            g1[pts] = np.where(incoming, emitted, g1[pts])
            g2[pts] = np.where(incoming, g2_factor * bc.T * emitted, g2[pts])
        else:
            raise TypeError(f"unknown boundary condition object: {bc!r}")
    return g1, g2


def wall_mass_flux(g1, cloud, grid, wall_velocity=None):
    """Net mass flux through each boundary point (diagnostic); zero for a
    freshly applied diffuse wall."""
    if wall_velocity is None:
        wall_velocity = np.zeros_like(cloud.x)
    pts = np.where(cloud.kind != INTERIOR)[0]
    cn = _normal_speeds(grid, cloud.normal[pts], wall_velocity[pts])
    return pts, np.einsum("k,pk,pk->p", grid.weights, cn, g1[pts])
