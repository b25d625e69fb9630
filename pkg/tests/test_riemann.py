import numpy as np
import pytest

from alebgk.riemann import euler_riemann_exact

GAMMA = 5.0 / 3.0


def test_equal_states_constant():
    sol = euler_riemann_exact((1.0, 0.5, 2.0), (1.0, 0.5, 2.0), GAMMA)
    rho, u, p = sol(np.linspace(-5, 5, 11))
    np.testing.assert_allclose(rho, 1.0, rtol=1e-12)
    np.testing.assert_allclose(u, 0.5, rtol=1e-12)
    np.testing.assert_allclose(p, 2.0, rtol=1e-12)


def test_far_left_is_left_state():
    sol = euler_riemann_exact((1.0, 0.0, 1.0), (0.125, 0.0, 0.1), GAMMA)
    rho, u, p = sol(np.array([-1e6]))
    assert rho[0] == 1.0 and u[0] == 0.0 and p[0] == 1.0


def test_sod_like_residuals():
    # rho_l / rho_r = 8, equal temperature 273, R = 208
    R = 208.0
    rho_l, rho_r = 1e-3, 1e-3 / 8
    left = (rho_l, 0.0, rho_l * R * 273.0)
    right = (rho_r, 0.0, rho_r * R * 273.0)
    sol = euler_riemann_exact(left, right, GAMMA)
    g = GAMMA

    # Rankine-Hugoniot residuals across the right shock
    s = sol.shock_speed_right
    states = [(sol.rho_star_r, sol.u_star, sol.p_star), (rho_r, 0.0, right[2])]
    flux = []
    for rho, u, p in states:
        E = p / (g - 1) + 0.5 * rho * u * u
        cons = np.array([rho, rho * u, E])
        f = np.array([rho * u, rho * u * u + p, (E + p) * u])
        flux.append(f - s * cons)
    resid = np.abs(flux[0] - flux[1])
    scale = np.abs(flux[1]) + rho_l * R * 273.0
    assert np.all(resid / scale <= 1e-10)

    # Riemann invariants across the left rarefaction
    a_l = np.sqrt(g * left[2] / rho_l)
    a_star = np.sqrt(g * sol.p_star / sol.rho_star_l)
    inv_left = 0.0 + 2 * a_l / (g - 1)
    inv_star = sol.u_star + 2 * a_star / (g - 1)
    assert abs(inv_left - inv_star) / abs(inv_left) <= 1e-10
    # entropy constant through the fan
    s_left = left[2] / rho_l**g
    s_star = sol.p_star / sol.rho_star_l**g
    assert abs(s_left - s_star) / s_left <= 1e-10


def test_interior_sampling_consistency():
    sol = euler_riemann_exact((1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 1.4)
    # classic Sod solution values (Toro)
    assert sol.p_star == pytest.approx(0.30313, rel=1e-4)
    assert sol.u_star == pytest.approx(0.92745, rel=1e-4)
    rho, u, p = sol(np.array([sol.u_star - 1e-9, sol.u_star + 1e-9]))
    # pressure and velocity continuous across the contact, density jumps
    assert p[0] == pytest.approx(p[1], rel=1e-6)
    assert u[0] == pytest.approx(u[1], rel=1e-6)
    assert rho[0] != pytest.approx(rho[1], rel=1e-2)


def test_vacuum_rejected():
    with pytest.raises(ValueError):
        euler_riemann_exact((1.0, -100.0, 1.0), (1.0, 100.0, 1.0), GAMMA)
    with pytest.raises(ValueError):
        euler_riemann_exact((-1.0, 0.0, 1.0), (1.0, 0.0, 1.0), GAMMA)
