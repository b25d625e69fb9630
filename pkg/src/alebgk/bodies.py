"""Rigid bodies immersed in the gas: kinematics, loads, motion.

A body owns a set of boundary samples given in body-local coordinates
(offsets from the center of mass at zero rotation) together with normals
pointing into the gas and per-sample surface measure.  The matching
cloud points are rigidly carried along; gas loads are surface sums of
the kinetic stress tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import shapely
import shapely.affinity

from alebgk.velocity import VelocityGrid, stress_tensor


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def prescribed_motion(name: str, dim: int, **params):
    """Velocity-versus-time laws for driven bodies and walls.

    * ``none``: rest.
    * ``piston_sin``: amp * sin(freq * t) along x.
    * ``shuttle_cos``: amp * cos(2 pi freq * t) along y.
    """
    if name == "none":
        return lambda t: np.zeros(dim)
    if name == "piston_sin":
        amp = params.get("amp", 0.25)
        freq = params.get("freq", 1.0)

        def u(t, amp=amp, freq=freq):
            out = np.zeros(dim)
            out[0] = amp * np.sin(freq * t)
            return out
        return u
    if name == "shuttle_cos":
        amp = params.get("amp", 1.0)
        freq = params.get("freq", 1.0)

        def u(t, amp=amp, freq=freq):
            out = np.zeros(dim)
            out[1] = amp * np.cos(2.0 * np.pi * freq * t)
            return out
        return u
    raise ValueError(f"unknown prescribed motion {name!r}")


def polygon_inertia(coords, mass: float) -> float:
    """Moment of inertia about the centroid of a uniform polygon lamina."""
    poly = shapely.Polygon(coords)
    cx, cy = poly.centroid.x, poly.centroid.y
    pts = np.asarray(poly.exterior.coords, dtype=float) - (cx, cy)
    x, y = pts[:-1, 0], pts[:-1, 1]
    x1, y1 = pts[1:, 0], pts[1:, 1]
    cross = x * y1 - x1 * y
    num = np.sum(cross * (x**2 + x * x1 + x1**2 + y**2 + y * y1 + y1**2))
    signed_area = 0.5 * np.sum(cross)
    return float(mass * num / (12.0 * signed_area))


@dataclass
class RigidBody:
    """Rigid body state plus its body-local boundary sampling."""

    body_id: int
    mass: float
    Xc: np.ndarray
    local_x: np.ndarray  # (S, dim) sample offsets from Xc at theta = 0
    local_n: np.ndarray  # (S, dim) normals into the gas at theta = 0
    area: np.ndarray  # (S,) surface measure per sample
    V: np.ndarray = None
    inertia: float = 0.0
    omega: float = 0.0
    theta: float = 0.0
    translate_free: bool = True
    rotate_free: bool = False
    motion: str = "none"
    motion_params: dict = field(default_factory=dict)
    shape: shapely.Geometry = None  # body-local footprint, for point exclusion

    def __post_init__(self):
        self.Xc = np.asarray(self.Xc, dtype=float)
        self.local_x = np.atleast_2d(np.asarray(self.local_x, dtype=float))
        self.local_n = np.atleast_2d(np.asarray(self.local_n, dtype=float))
        self.area = np.asarray(self.area, dtype=float)
        if self.V is None:
            self.V = np.zeros_like(self.Xc)
        self.V = np.asarray(self.V, dtype=float)
        self._law = (None if self.motion == "none" else
                     prescribed_motion(self.motion, self.dim, **self.motion_params))

    @property
    def dim(self) -> int:
        return len(self.Xc)

    @property
    def prescribed(self) -> bool:
        return self._law is not None

    def copy(self) -> "RigidBody":
        out = RigidBody(self.body_id, self.mass, self.Xc.copy(), self.local_x,
                        self.local_n, self.area, V=self.V.copy(),
                        inertia=self.inertia, omega=self.omega, theta=self.theta,
                        translate_free=self.translate_free,
                        rotate_free=self.rotate_free, motion=self.motion,
                        motion_params=self.motion_params, shape=self.shape)
        return out

    # -- kinematics ----------------------------------------------------------
    def surface_positions(self) -> np.ndarray:
        if self.dim == 1:
            return self.Xc + self.local_x
        return self.Xc + self.local_x @ _rotation(self.theta).T

    def surface_normals(self) -> np.ndarray:
        if self.dim == 1:
            return self.local_n.copy()
        return self.local_n @ _rotation(self.theta).T

    def wall_velocity(self, x: np.ndarray) -> np.ndarray:
        """Material velocity of the body surface at positions x (Q, dim)."""
        x = np.atleast_2d(x)
        if self.dim == 1:
            return np.broadcast_to(self.V, x.shape).copy()
        r = x - self.Xc
        spin = self.omega * np.column_stack([-r[:, 1], r[:, 0]])
        return self.V + spin

    def set_prescribed_state(self, t: float):
        if self._law is not None:
            self.V = self._law(t)

    def footprint(self):
        """Current-pose shapely geometry (2D bodies only)."""
        if self.shape is None:
            return None
        g = shapely.affinity.rotate(self.shape, self.theta, origin=(0, 0),
                                    use_radians=True)
        return shapely.affinity.translate(g, xoff=self.Xc[0], yoff=self.Xc[1])

    def sync_cloud(self, cloud, point_ids):
        """Write current sample positions/normals into the cloud points."""
        cloud.x[point_ids] = self.surface_positions()
        cloud.normal[point_ids] = self.surface_normals()
        cloud.area_weight[point_ids] = self.area
        cloud.touch()


def body_force_torque(body: RigidBody, g1, grid: VelocityGrid, point_ids):
    """Net gas force (and torque about Xc in 2D) on the body.

    The traction on a surface element with into-gas normal n is -phi . n
    where phi is the kinetic stress tensor evaluated in the wall frame.
    """
    xs = body.surface_positions()
    ns = body.surface_normals()
    uw = body.wall_velocity(xs)
    if body.dim == 1:
        force = 0.0
        for s, pid in enumerate(point_ids):
            phi = stress_tensor(g1[pid], grid, uw[s])
            force += -phi * ns[s, 0] * body.area[s]
        return np.array([force]), 0.0
    force = np.zeros(2)
    torque = 0.0
    for s, pid in enumerate(point_ids):
        phi = stress_tensor(g1[pid], grid, uw[s])
        t_vec = -(phi @ ns[s]) * body.area[s]
        force += t_vec
        r = xs[s] - body.Xc
        torque += r[0] * t_vec[1] - r[1] * t_vec[0]
    return force, torque


def advance_body(body: RigidBody, force, torque, dt: float):
    """Explicit Euler step of the rigid-body state (position with the
    pre-step velocity, then velocity with the given load)."""
    if body.prescribed:
        body.Xc = body.Xc + dt * body.V
        return
    body.Xc = body.Xc + dt * body.V
    if body.translate_free:
        body.V = body.V + dt * np.asarray(force) / body.mass
    if body.rotate_free and body.inertia > 0:
        body.theta = body.theta + dt * body.omega
        body.omega = body.omega + dt * torque / body.inertia
