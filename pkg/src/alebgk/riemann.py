"""Exact Riemann solver for the 1D compressible Euler equations.

Used as the analytic oracle for the shock-tube benchmark in the
hydrodynamic (small relaxation time) limit, with gamma = 5/3 for a
monatomic gas.  Star-region pressure is found by Newton iteration on the
standard pressure function (Toro, ch. 4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RiemannSolution:
    """Self-similar solution of a Riemann problem, sample with __call__."""

    rho_l: float
    u_l: float
    p_l: float
    rho_r: float
    u_r: float
    p_r: float
    gamma: float
    p_star: float
    u_star: float
    rho_star_l: float
    rho_star_r: float

    @property
    def left_shock(self) -> bool:
        return self.p_star > self.p_l

    @property
    def right_shock(self) -> bool:
        return self.p_star > self.p_r

    @property
    def shock_speed_right(self) -> float:
        g = self.gamma
        a_r = np.sqrt(g * self.p_r / self.rho_r)
        return self.u_r + a_r * np.sqrt((g + 1) / (2 * g) * self.p_star / self.p_r + (g - 1) / (2 * g))

    @property
    def shock_speed_left(self) -> float:
        g = self.gamma
        a_l = np.sqrt(g * self.p_l / self.rho_l)
        return self.u_l - a_l * np.sqrt((g + 1) / (2 * g) * self.p_star / self.p_l + (g - 1) / (2 * g))

    @property
    def contact_speed(self) -> float:
        return self.u_star

    def __call__(self, xi):
        """Sample (rho, u, p) at similarity coordinates xi = x/t."""
        xi = np.asarray(xi, dtype=float)
        g = self.gamma
        rho = np.empty_like(xi)
        u = np.empty_like(xi)
        p = np.empty_like(xi)
        a_l = np.sqrt(g * self.p_l / self.rho_l)
        a_r = np.sqrt(g * self.p_r / self.rho_r)

        left_of_contact = xi <= self.u_star
        # left wave
        if self.left_shock:
            s = self.shock_speed_left
            outside = xi < s
            rho_in, u_in, p_in = self.rho_star_l, self.u_star, self.p_star
            mask_in = left_of_contact & ~outside
            rho[mask_in], u[mask_in], p[mask_in] = rho_in, u_in, p_in
            mask_out = left_of_contact & outside
            rho[mask_out], u[mask_out], p[mask_out] = self.rho_l, self.u_l, self.p_l
        else:
            a_star = a_l * (self.p_star / self.p_l) ** ((g - 1) / (2 * g))
            head = self.u_l - a_l
            tail = self.u_star - a_star
            pre = left_of_contact & (xi < head)
            rho[pre], u[pre], p[pre] = self.rho_l, self.u_l, self.p_l
            star = left_of_contact & (xi >= tail)
            rho[star], u[star], p[star] = self.rho_star_l, self.u_star, self.p_star
            fan = left_of_contact & (xi >= head) & (xi < tail)
            uf = (2 / (g + 1)) * (a_l + (g - 1) / 2 * self.u_l + xi[fan])
            af = uf - xi[fan]
            rho[fan] = self.rho_l * (af / a_l) ** (2 / (g - 1))
            u[fan] = uf
            p[fan] = self.p_l * (af / a_l) ** (2 * g / (g - 1))

        right = ~left_of_contact
        if self.right_shock:
            s = self.shock_speed_right
            outside = xi > s
            mask_in = right & ~outside
            rho[mask_in], u[mask_in], p[mask_in] = self.rho_star_r, self.u_star, self.p_star
            mask_out = right & outside
            rho[mask_out], u[mask_out], p[mask_out] = self.rho_r, self.u_r, self.p_r
        else:
            a_star = a_r * (self.p_star / self.p_r) ** ((g - 1) / (2 * g))
            head = self.u_r + a_r
            tail = self.u_star + a_star
            post = right & (xi > head)
            rho[post], u[post], p[post] = self.rho_r, self.u_r, self.p_r
            star = right & (xi <= tail)
            rho[star], u[star], p[star] = self.rho_star_r, self.u_star, self.p_star
            fan = right & (xi <= head) & (xi > tail)
            uf = (2 / (g + 1)) * (-a_r + (g - 1) / 2 * self.u_r + xi[fan])
            af = xi[fan] - uf
            rho[fan] = self.rho_r * (af / a_r) ** (2 / (g - 1))
            u[fan] = uf
            p[fan] = self.p_r * (af / a_r) ** (2 * g / (g - 1))
        return rho, u, p


def _pressure_fn(p, rho_k, p_k, a_k, gamma):
    """f_k(p) and derivative for the star-pressure equation."""
    if p > p_k:  # shock
        A = 2.0 / ((gamma + 1) * rho_k)
        B = (gamma - 1) / (gamma + 1) * p_k
        f = (p - p_k) * np.sqrt(A / (p + B))
        df = np.sqrt(A / (p + B)) * (1 - (p - p_k) / (2 * (p + B)))
    else:  # rarefaction
        f = 2 * a_k / (gamma - 1) * ((p / p_k) ** ((gamma - 1) / (2 * gamma)) - 1)
        df = 1 / (rho_k * a_k) * (p / p_k) ** (-(gamma + 1) / (2 * gamma))
    return f, df


def euler_riemann_exact(left, right, gamma: float = 5.0 / 3.0, tol: float = 1e-12) -> RiemannSolution:
    """Solve the Riemann problem for states (rho, u, p) left and right."""
    rho_l, u_l, p_l = (float(v) for v in left)
    rho_r, u_r, p_r = (float(v) for v in right)
    if min(rho_l, rho_r, p_l, p_r) <= 0:
        raise ValueError("densities and pressures must be positive")
    a_l = np.sqrt(gamma * p_l / rho_l)
    a_r = np.sqrt(gamma * p_r / rho_r)
    du = u_r - u_l
    if 2 * (a_l + a_r) / (gamma - 1) <= du:
        raise ValueError("initial data generate vacuum")

    p = max(0.5 * (p_l + p_r), tol * min(p_l, p_r))
    for _ in range(200):
        f_l, df_l = _pressure_fn(p, rho_l, p_l, a_l, gamma)
        f_r, df_r = _pressure_fn(p, rho_r, p_r, a_r, gamma)
        g = f_l + f_r + du
        step = g / (df_l + df_r)
        p_new = p - step
        if p_new <= 0:
            p_new = 0.5 * p
        if abs(p_new - p) <= tol * max(p_new, p):
            p = p_new
            break
        p = p_new
    else:
        raise RuntimeError("star-pressure Newton iteration did not converge")

    f_l, _ = _pressure_fn(p, rho_l, p_l, a_l, gamma)
    f_r, _ = _pressure_fn(p, rho_r, p_r, a_r, gamma)
    u_star = 0.5 * (u_l + u_r) + 0.5 * (f_r - f_l)

    def star_density(rho_k, p_k):
        r = p / p_k
        if p > p_k:
            gr = (gamma - 1) / (gamma + 1)
            return rho_k * (r + gr) / (gr * r + 1)
        return rho_k * r ** (1 / gamma)

    return RiemannSolution(
        rho_l=rho_l, u_l=u_l, p_l=p_l,
        rho_r=rho_r, u_r=u_r, p_r=p_r,
        gamma=gamma, p_star=p, u_star=u_star,
        rho_star_l=star_density(rho_l, p_l),
        rho_star_r=star_density(rho_r, p_r),
    )
