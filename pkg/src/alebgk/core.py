"""Time integration of the reduced relaxation system on a moving cloud.

The gas state is a pair of reduced distributions (g1, g2) sampled at the
cloud points.  Points ride along characteristics of the mean flow
(interior: local bulk velocity, boundary: wall velocity), so transport
only involves the relative velocity (v - U) and the stiff relaxation
toward the local Maxwellian is handled point-implicitly.

Schemes:

* ``first_order``: explicit upwind transport with linear stencils,
  implicit relaxation, forward-Euler point motion.
* ``ars222``: two-stage, second-order IMEX pair (diagonal weight
  beta = 1 - 1/sqrt(2)) with WENO-blended quadratic stencils.
* ``ars221``: midpoint-flavored two-stage IMEX pair, also with WENO
  stencils.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from alebgk.boundaries import apply_boundary_conditions
from alebgk.bodies import RigidBody, advance_body, body_force_torque
from alebgk.cloud import INTERIOR, PointCloud
from alebgk.derivatives import DerivativeWorkspace
from alebgk.errors import CflViolationError, ConfigurationError
from alebgk.velocity import VelocityGrid, compute_moments, reduced_maxwellians

ARS_BETA = 1.0 - 1.0 / np.sqrt(2.0)

SCHEMES = ("first_order", "ars222", "ars221")


def scheme_order(name: str) -> int:
    """Spatial stencil order used by a scheme (1: upwind, 2: WENO)."""
    if name not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {name!r}; choose from {SCHEMES}")
    return 1 if name == "first_order" else 2


def cfl_dt(dx: float, vmax: float, safety: float = 0.5) -> float:
    """Advective step size dt = safety * dx / vmax."""
    return safety * dx / vmax


def recover_parameters(g1t, g2t, grid: VelocityGrid, R: float):
    """Maxwellian parameters consistent with the post-relaxation state.

    Relaxation preserves density, momentum and total energy, so the
    parameters of the implicit Maxwellian are the moments of the
    transported state itself; no iteration is required.
    """
    return compute_moments(g1t, g2t, grid, R)


def relax_implicit(g1t, g2t, grid: VelocityGrid, R: float, tau, dt: float):
    """Point-implicit relaxation step toward the local Maxwellian.

    Solves g = g_tilde - (dt/tau)(g - G) exactly:
    g = (tau g_tilde + dt G) / (tau + dt).  Returns the updated pair and
    the recovered (rho, U, T).
    """
    rho, U, T = recover_parameters(g1t, g2t, grid, R)
    G1, G2 = reduced_maxwellians(rho, U, T, grid, R)
    tau = np.broadcast_to(np.asarray(tau, dtype=float), rho.shape)[..., None]
    g1 = (tau * g1t + dt * G1) / (tau + dt)
    g2 = (tau * g2t + dt * G2) / (tau + dt)
    return g1, g2, rho, U, T


def transport_terms(ws: DerivativeWorkspace, g1, g2, grid: VelocityGrid, Upt):
    """(v - U) . grad g for both reduced distributions, shape (N, K) each.

    The upwind/WENO side at each (point, velocity node) follows the sign
    of the relative velocity component.
    """
    T1 = np.zeros_like(g1)
    T2 = np.zeros_like(g2)
    for ax in range(ws.dim):
        rel = grid.nodes[None, :, ax] - Upt[:, ax][:, None]
        sign = np.sign(rel)
        T1 += rel * ws.gradient_component(g1, sign, ax)
        T2 += rel * ws.gradient_component(g2, sign, ax)
    return T1, T2


@dataclass
class BodyRecord:
    """Per-step body diagnostics."""

    t: float
    Xc: np.ndarray
    V: np.ndarray
    theta: float
    omega: float
    force: np.ndarray
    torque: float


class Simulation:
    """Owns the cloud, the distributions and the step orchestration."""

    def __init__(self, *, cloud: PointCloud, grid: VelocityGrid, R: float,
                 g1, g2, tau, scheme: str = "first_order", bcs: dict | None = None,
                 wall_motion: dict | None = None, bodies: list | None = None,
                 admissible=None, manage: bool = True, cfl_limit: float = 1.0,
                 t0: float = 0.0):
        self.cloud = cloud
        self.grid = grid
        self.R = float(R)
        self.g1 = np.asarray(g1, dtype=float)
        self.g2 = np.asarray(g2, dtype=float)
        self.tau = tau  # float or callable(rho, T) -> (N,)
        self.scheme = scheme
        self.order = scheme_order(scheme)
        self.bcs = bcs or {}
        # bc_id -> callable (t, x (Q, dim)) -> velocity vector or (Q, dim)
        self.wall_motion = wall_motion or {}
        self.bodies: list[RigidBody] = list(bodies or [])
        self.admissible = admissible
        self.manage = manage
        self.cfl_limit = cfl_limit
        self.t = t0
        self._drift = 0.0
        self.body_history: list[BodyRecord] = []
        self._refresh_body_points()
        self.rho, self.U, self.T = compute_moments(self.g1, self.g2, grid, R)

    # -- helpers ---------------------------------------------------------------
    def _refresh_body_points(self):
        self._body_pts = {b.body_id: np.where(self.cloud.body_id == b.body_id)[0]
                          for b in self.bodies}

    def _tau_of(self, rho, T):
        if callable(self.tau):
            return self.tau(rho, T)
        return float(self.tau)

    def _wall_velocities(self, t, bodies):
        """ALE velocity of boundary points at time t: wall/body material speed."""
        W = np.zeros_like(self.cloud.x)
        for bc_id, law in self.wall_motion.items():
            pts = self.cloud.bc_id == bc_id
            if np.any(pts):
                W[pts] = law(t, self.cloud.x[pts])
        for b in bodies:
            pts = self._body_pts[b.body_id]
            if len(pts):
                W[pts] = b.wall_velocity(self.cloud.x[pts])
        return W

    def _point_velocities(self, U, W):
        Upt = U.copy()
        boundary = self.cloud.kind != INTERIOR
        Upt[boundary] = W[boundary]
        return Upt

    def _check_cfl(self, dt, Upt):
        speed = self.grid.vmax + np.max(np.abs(Upt))
        if dt * speed / self.cloud.h > self.cfl_limit:
            raise CflViolationError(
                f"dt {dt:g} exceeds stencil reach: dt*(vmax+|U|)/h = "
                f"{dt * speed / self.cloud.h:.3f} > {self.cfl_limit}")

    def _stage_prep(self, t, bodies):
        """Apply boundary data, refresh moments, build stencils."""
        for b in bodies:
            b.set_prescribed_state(t)
        W = self._wall_velocities(t, bodies)
        apply_boundary_conditions(self.g1, self.g2, self.cloud, self.grid,
                                  self.R, self.bcs, wall_velocity=W)
        rho, U, T = compute_moments(self.g1, self.g2, self.grid, self.R)
        Upt = self._point_velocities(U, W)
        ws = DerivativeWorkspace(self.cloud, order=self.order)
        return W, rho, U, T, Upt, ws

    def _body_loads(self, bodies, g1):
        loads = []
        for b in bodies:
            pts = self._body_pts[b.body_id]
            if b.prescribed or len(pts) == 0:
                loads.append((np.zeros(self.cloud.dim), 0.0))
            else:
                loads.append(body_force_torque(b, g1, self.grid, pts))
        return loads

    def _sync_bodies(self, bodies):
        for b in bodies:
            pts = self._body_pts[b.body_id]
            if len(pts):
                b.sync_cloud(self.cloud, pts)

    def _finish_step(self, dt, loads, Upt=None):
        self.t += dt
        for b, (f, tq) in zip(self.bodies, loads):
            self.body_history.append(BodyRecord(self.t, b.Xc.copy(), b.V.copy(),
                                                b.theta, b.omega,
                                                np.asarray(f, dtype=float), tq))
        self.cloud.rebuild_index()
        # point insertion/merging only once accumulated drift is a
        # meaningful fraction of the spacing; it is O(N log N) and would
        # otherwise dominate slow-moving scenarios
        if Upt is not None and len(Upt):
            self._drift += dt * float(np.max(np.abs(Upt)))
        else:
            self._drift = np.inf
        if self.manage and self._drift >= 0.2 * self.cloud.dx:
            self._drift = 0.0
            fields = {"g1": self.g1, "g2": self.g2}
            report = self.cloud.manage_points(fields, admissible=self.admissible)
            if report.changed:
                self.g1, self.g2 = fields["g1"], fields["g2"]
                self._refresh_body_points()
        self.rho, self.U, self.T = compute_moments(self.g1, self.g2,
                                                   self.grid, self.R)

    # -- schemes ---------------------------------------------------------------
    def step(self, dt: float):
        if self.scheme == "first_order":
            self._step_first_order(dt)
        elif self.scheme == "ars221":
            self._step_ars221(dt)
        else:
            self._step_ars222(dt)

    def _step_first_order(self, dt):
        t = self.t
        W, rho, U, T, Upt, ws = self._stage_prep(t, self.bodies)
        self._check_cfl(dt, Upt)
        T1, T2 = transport_terms(ws, self.g1, self.g2, self.grid, Upt)
        g1t = self.g1 - dt * T1
        g2t = self.g2 - dt * T2
        loads = self._body_loads(self.bodies, self.g1)

        self.cloud.x += dt * Upt
        self.cloud.touch()
        for b, (f, tq) in zip(self.bodies, loads):
            advance_body(b, f, tq, dt)
        self._sync_bodies(self.bodies)

        rho_t, _, T_t = recover_parameters(g1t, g2t, self.grid, self.R)
        tau = self._tau_of(rho_t, T_t)
        self.g1, self.g2, *_ = relax_implicit(g1t, g2t, self.grid, self.R, tau, dt)
        self._finish_step(dt, loads, Upt)

    def _step_ars221(self, dt):
        t = self.t
        x_n = self.cloud.x.copy()
        g1_n, g2_n = self.g1.copy(), self.g2.copy()
        bodies_n = [b.copy() for b in self.bodies]

        # stage 1: half step to the midpoint state
        W, rho, U, T, Upt, ws = self._stage_prep(t, self.bodies)
        self._check_cfl(dt, Upt)
        T1n, T2n = transport_terms(ws, self.g1, self.g2, self.grid, Upt)
        g1t = self.g1 - 0.5 * dt * T1n
        g2t = self.g2 - 0.5 * dt * T2n
        loads_n = self._body_loads(self.bodies, self.g1)

        self.cloud.x = x_n + 0.5 * dt * Upt
        self.cloud.touch()
        for b, (f, tq) in zip(self.bodies, loads_n):
            advance_body(b, f, tq, 0.5 * dt)
        self._sync_bodies(self.bodies)
        self.cloud.rebuild_index()

        rho_t, _, T_t = recover_parameters(g1t, g2t, self.grid, self.R)
        tau = self._tau_of(rho_t, T_t)
        self.g1, self.g2, *_ = relax_implicit(g1t, g2t, self.grid, self.R,
                                              tau, 0.5 * dt)

        # stage 2: full step using midpoint gradients and velocities
        Wh, rho_h, U_h, T_h, Upt_h, ws_h = self._stage_prep(t + 0.5 * dt, self.bodies)
        self._check_cfl(dt, Upt_h)
        T1h, T2h = transport_terms(ws_h, self.g1, self.g2, self.grid, Upt_h)
        g1t2 = g1_n - dt * T1h
        g2t2 = g2_n - dt * T2h
        loads_h = self._body_loads(self.bodies, self.g1)

        self.cloud.x = x_n + dt * Upt_h
        self.cloud.touch()
        for b_n, b, (f, tq) in zip(bodies_n, self.bodies, loads_h):
            self._body_full_from_midpoint(b_n, b, f, tq, dt, t)
        self._sync_bodies(self.bodies)

        rho_t, _, T_t = recover_parameters(g1t2, g2t2, self.grid, self.R)
        tau = self._tau_of(rho_t, T_t)
        self.g1, self.g2, *_ = relax_implicit(g1t2, g2t2, self.grid, self.R, tau, dt)
        self._finish_step(dt, loads_h, Upt_h)

    def _body_full_from_midpoint(self, b_n, b, force_h, torque_h, dt, t):
        """Midpoint rule: advance from the time-n state with midpoint rates."""
        if b.prescribed:
            b.set_prescribed_state(t + 0.5 * dt)
            b.Xc = b_n.Xc + dt * b.V
            b.set_prescribed_state(t + dt)
            return
        V_half, omega_half = b.V.copy(), b.omega
        b.Xc = b_n.Xc + dt * V_half
        if b.translate_free:
            b.V = b_n.V + dt * np.asarray(force_h) / b.mass
        if b.rotate_free and b.inertia > 0:
            b.theta = b_n.theta + dt * omega_half
            b.omega = b_n.omega + dt * torque_h / b.inertia

    def _step_ars222(self, dt):
        beta = ARS_BETA
        t = self.t
        x_n = self.cloud.x.copy()
        g1_n, g2_n = self.g1.copy(), self.g2.copy()
        bodies_n = [b.copy() for b in self.bodies]

        # stage 1
        W, rho, U, T, Upt_n, ws = self._stage_prep(t, self.bodies)
        self._check_cfl(dt, Upt_n)
        T1n, T2n = transport_terms(ws, self.g1, self.g2, self.grid, Upt_n)
        g1t = self.g1 - beta * dt * T1n
        g2t = self.g2 - beta * dt * T2n
        loads_n = self._body_loads(self.bodies, self.g1)

        self.cloud.x = x_n + beta * dt * Upt_n
        self.cloud.touch()
        for b, (f, tq) in zip(self.bodies, loads_n):
            advance_body(b, f, tq, beta * dt)
        self._sync_bodies(self.bodies)
        self.cloud.rebuild_index()

        rho_t, U_t, T_t = recover_parameters(g1t, g2t, self.grid, self.R)
        tau1 = np.broadcast_to(np.asarray(self._tau_of(rho_t, T_t), dtype=float),
                               rho_t.shape)[..., None]
        M1_1, M1_2 = reduced_maxwellians(rho_t, U_t, T_t, self.grid, self.R)
        self.g1 = (tau1 * g1t + beta * dt * M1_1) / (tau1 + beta * dt)
        self.g2 = (tau1 * g2t + beta * dt * M1_2) / (tau1 + beta * dt)
        # stiff contribution carried to stage 2, written without 1/tau:
        # (dt/tau)(M - f_stage1) = dt (M - g_tilde) / (tau + beta dt)
        stiff1 = dt * (M1_1 - g1t) / (tau1 + beta * dt)
        stiff2 = dt * (M1_2 - g2t) / (tau1 + beta * dt)

        # stage 2
        Wh, rho_h, U_h, T_h, Upt_h, ws_h = self._stage_prep(t + beta * dt, self.bodies)
        self._check_cfl(dt, Upt_h)
        T1h, T2h = transport_terms(ws_h, self.g1, self.g2, self.grid, Upt_h)
        loads_h = self._body_loads(self.bodies, self.g1)

        g1t2 = g1_n - (2 - beta) * dt * T1h + (1 - beta) * dt * T1n + (1 - beta) * stiff1
        g2t2 = g2_n - (2 - beta) * dt * T2h + (1 - beta) * dt * T2n + (1 - beta) * stiff2

        self.cloud.x = x_n + dt * ((beta - 1) * Upt_n + (2 - beta) * Upt_h)
        self.cloud.touch()
        for b_n, b, (f_n, tq_n), (f_h, tq_h) in zip(bodies_n, self.bodies,
                                                    loads_n, loads_h):
            self._body_full_ars222(b_n, b, f_n, tq_n, f_h, tq_h, dt, t)
        self._sync_bodies(self.bodies)

        rho_t, _, T_t = recover_parameters(g1t2, g2t2, self.grid, self.R)
        tau2 = self._tau_of(rho_t, T_t)
        self.g1, self.g2, *_ = relax_implicit(g1t2, g2t2, self.grid, self.R,
                                              tau2, beta * dt)
        self._finish_step(dt, loads_h, Upt_h)

    def _body_full_ars222(self, b_n, b, f_n, tq_n, f_h, tq_h, dt, t):
        beta = ARS_BETA
        if b.prescribed:
            V1 = b.V  # velocity at the stage-1 time
            b_n.set_prescribed_state(t)
            b.Xc = b_n.Xc + dt * ((beta - 1) * b_n.V + (2 - beta) * V1)
            b.set_prescribed_state(t + dt)
            return
        V1, omega1 = b.V.copy(), b.omega
        b.Xc = b_n.Xc + dt * ((beta - 1) * b_n.V + (2 - beta) * V1)
        if b.translate_free:
            b.V = b_n.V + dt * ((beta - 1) * np.asarray(f_n)
                                + (2 - beta) * np.asarray(f_h)) / b.mass
        if b.rotate_free and b.inertia > 0:
            b.theta = b_n.theta + dt * ((beta - 1) * b_n.omega + (2 - beta) * omega1)
            b.omega = b_n.omega + dt * ((beta - 1) * tq_n + (2 - beta) * tq_h) / b.inertia

    # -- driver ------------------------------------------------------------------
    def run(self, t_final: float, dt: float, callback=None):
        """Advance to t_final with fixed dt (last step shortened to land)."""
        while self.t < t_final - 1e-14 * max(1.0, t_final):
            step = min(dt, t_final - self.t)
            self.step(step)
            if callback is not None:
                callback(self)
        return self
