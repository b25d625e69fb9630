"""Least-squares Taylor derivatives on scattered neighbors.

Two layers:

* per-point reference functions (`ls_derivatives`, `upwind_first_order`,
  `weno_derivative`) that realize the operation contracts one stencil at
  a time, and
* :class:`DerivativeWorkspace`, a vectorized form of the same formulas
  operating on whole (point x velocity-node) arrays, which the time
  integrator uses.  The two layers are cross-checked in the test suite.

Weighted normal equations a = (D^T W D)^{-1} D^T W b are solved per
stencil; monomials are scaled by h for conditioning.  Stencils with
condition number above 1e12 are degenerate: the per-point API raises,
the vectorized blend shifts the candidate's weight to the central set.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from alebgk.cloud import PointCloud
from alebgk.errors import DegenerateStencilError

COND_LIMIT = 1e12
WENO_EPS = 1e-6

#: matrix-vs-gather application threshold (elements of the (N, M, K) cube)
_GATHER_BUDGET = 2.0e7


def _basis_quadratic(z: np.ndarray) -> np.ndarray:
    """Taylor monomial rows for scaled offsets z, shape (..., m, p)."""
    if z.shape[-1] == 1:
        d = z[..., 0]
        return np.stack([d, 0.5 * d * d], axis=-1)
    dx, dy = z[..., 0], z[..., 1]
    return np.stack([dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy], axis=-1)


def _basis_linear(z: np.ndarray) -> np.ndarray:
    return z.copy()


def _solve_stencil(dxv, w, h, quadratic=True):
    """Solve one weighted stencil; returns derivative vector a (unscaled)."""
    z = dxv / h
    D = _basis_quadratic(z) if quadratic else _basis_linear(z)
    A = (D * w[:, None]).T @ D
    ev = np.linalg.eigvalsh(A)
    if ev[0] <= 0 or ev[-1] / ev[0] > COND_LIMIT:
        raise DegenerateStencilError("singular or ill-conditioned stencil")
    coef = np.linalg.solve(A, (D * w[:, None]).T)
    dim = dxv.shape[1]
    scale = _deriv_scales(dim, h) if quadratic else np.full(dim, 1.0 / h)
    return coef * scale[:, None]


def _deriv_scales(dim, h):
    if dim == 1:
        return np.array([1.0 / h, 1.0 / h**2])
    return np.array([1.0 / h, 1.0 / h, 1.0 / h**2, 1.0 / h**2, 1.0 / h**2])


def ls_derivatives(values, positions, center, h, alpha=6.0):
    """Gradient and Hessian at ``center`` from neighbor values.

    Exact for polynomials of total degree <= 2.  Raises
    :class:`DegenerateStencilError` on singular stencils.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    if positions.shape[0] == 1 and positions.shape[1] > 2:
        positions = positions.T
    center = np.atleast_1d(np.asarray(center, dtype=float))
    values = np.asarray(values, dtype=float)
    dim = positions.shape[1]
    dxv = positions - center
    r2 = np.sum(dxv**2, axis=1)
    w = np.maximum(np.exp(-alpha * r2 / h**2) - np.exp(-alpha), 0.0)
    p = 2 if dim == 1 else 5
    if np.count_nonzero(w) < p:
        raise DegenerateStencilError(f"only {np.count_nonzero(w)} usable neighbors, need {p}")
    # interpolate center value from the stencil itself when not supplied:
    # b uses differences to the value at center, taken as the closest point
    i0 = int(np.argmin(r2))
    f0 = values[i0] if r2[i0] < 1e-28 else None
    if f0 is None:
        raise DegenerateStencilError("center must coincide with a stencil point")
    b = values - f0
    coef = _solve_stencil(dxv, w, h, quadratic=True)
    a = coef @ b
    if dim == 1:
        return np.array([a[0]]), np.array([[a[1]]])
    grad = a[:2]
    hess = np.array([[a[2], a[3]], [a[3], a[4]]])
    return grad, hess


def upwind_first_order(cloud: PointCloud, i: int, transport_sign: float,
                       axis: int, values) -> float:
    """First derivative from the upwind directional neighbor set.

    transport_sign > 0 uses left neighbors, < 0 right neighbors, 0 the
    central set; linear Taylor basis.  Falls back to the central set when
    the directional set is empty beyond self.
    """
    values = np.asarray(values, dtype=float)
    ns = cloud.neighbors_within(i)
    if transport_sign > 0:
        ids = ns.left[axis]
    elif transport_sign < 0:
        ids = ns.right[axis]
    else:
        ids = ns.all
    for attempt in (ids, ns.all):
        if len(attempt) < 1 + cloud.dim:
            continue  # deficient directional set: fall back to all neighbors
        dxv = cloud.x[attempt] - cloud.x[i]
        r2 = np.sum(dxv**2, axis=1)
        w = np.maximum(np.exp(-cloud.alpha * r2 / cloud.h**2)
                       - np.exp(-cloud.alpha), 0.0)
        try:
            coef = _solve_stencil(dxv, w, cloud.h, quadratic=False)
        except DegenerateStencilError:
            if attempt is ns.all:
                raise
            continue
        return float(coef[axis] @ (values[attempt] - values[i]))
    raise DegenerateStencilError(f"no usable upwind stencil at point {i}")


def _candidate(cloud, ids, i, values, axis):
    """Quadratic-stencil derivatives (fx.., axis-relevant set) at point i."""
    dxv = cloud.x[ids] - cloud.x[i]
    r2 = np.sum(dxv**2, axis=1)
    w = np.maximum(np.exp(-cloud.alpha * r2 / cloud.h**2)
                   - np.exp(-cloud.alpha), 0.0)
    coef = _solve_stencil(dxv, w, cloud.h, quadratic=True)
    return coef @ (np.asarray(values, dtype=float)[ids] - values[i])


def _smoothness(a, dim, dx, eps):
    if dim == 1:
        denom = a[0] ** 2 * dx**2 + a[1] ** 2 * dx**4 + eps
    else:
        denom = (a[0] ** 2 * dx**2 + a[1] ** 2 * dx**2
                 + a[2] ** 2 * dx**4 + a[3] ** 2 * dx**4 + a[4] ** 2 * dx**4 + eps)
    return 1.0 / denom**2


def weno_derivative(cloud: PointCloud, i: int, transport_sign: float,
                    axis: int, values, dx_nominal: float,
                    eps: float = WENO_EPS) -> float:
    """WENO-blended first derivative along ``axis`` at point i."""
    ns = cloud.neighbors_within(i)
    sets = {"L": ns.left[axis], "C": ns.all, "R": ns.right[axis]}
    if transport_sign > 0:
        C = {"L": 0.5, "C": 0.5, "R": 0.0}
    elif transport_sign < 0:
        C = {"L": 0.0, "C": 0.5, "R": 0.5}
    else:
        C = {"L": 0.0, "C": 1.0, "R": 0.0}
    grad_index = axis
    cand = {}
    for k, ids in sets.items():
        if C[k] == 0.0:
            continue
        try:
            cand[k] = _candidate(cloud, ids, i, values, axis)
        except DegenerateStencilError:
            if k == "C":
                raise DegenerateStencilError(f"central stencil degenerate at point {i}")
            C["C"] += C[k]  # one-sided candidate unsolvable: shift its mass
            C[k] = 0.0
    beta = {k: C[k] * _smoothness(a, cloud.dim, dx_nominal, eps) for k, a in cand.items()}
    total = sum(beta.values())
    assert total > 0, "all smoothness weights vanished despite eps > 0"
    return sum(beta[k] / total * cand[k][grad_index] for k in cand)


# ---------------------------------------------------------------------------
# vectorized workspace
# ---------------------------------------------------------------------------

_STENCILS_1D = ("L", "C", "R")
_STENCILS_2D = ("L", "C", "R", "B", "T")


class DerivativeWorkspace:
    """Vectorized derivative operators on a frozen cloud snapshot.

    Precomputes, per point and per directional stencil, the least-squares
    coefficient rows mapping neighbor value differences to derivatives.
    ``order`` selects the linear upwind basis (1) or the quadratic WENO
    machinery (2).
    """

    def __init__(self, cloud: PointCloud, order: int, dx_nominal: float | None = None,
                 eps: float = WENO_EPS):
        self.cloud = cloud
        self.order = order
        self.dx_nominal = dx_nominal if dx_nominal is not None else cloud.dx
        self.eps = eps
        self.dim = cloud.dim
        idx, mask = cloud.neighbor_table()
        self.idx = idx
        self.n, self.m = idx.shape
        x = cloud.x
        self.dxv = x[idx] - x[:, None, :]  # (N, M, dim)
        r2 = np.einsum("nmd,nmd->nm", self.dxv, self.dxv)
        self.w = np.where(mask, np.maximum(
            np.exp(-cloud.alpha * r2 / cloud.h**2) - np.exp(-cloud.alpha),
            0.0), 0.0)

        names = _STENCILS_1D if self.dim == 1 else _STENCILS_2D
        self._smask = {}
        for name in names:
            self._smask[name] = self._stencil_mask(name, mask)
        self._coef = {}  # (name) -> (coef (N, p, M), ok (N,))
        self._mat_cache = {}
        quadratic = order >= 2
        for name in names:
            if order == 1 and name == "C":
                pass  # central set still needed as the sign-0 fallback
            self._coef[name] = self._build(self._smask[name], quadratic)
        # directional stencils that failed fall back to central coefficients
        c_coef, c_ok = self._coef["C"]
        if not np.all(c_ok):
            bad = np.where(~c_ok)[0]
            raise DegenerateStencilError(f"central stencil degenerate at points {bad[:5]}")
        self._fallback = {}
        for name in names:
            coef, ok = self._coef[name]
            if not np.all(ok):
                coef = np.where(ok[:, None, None], coef, c_coef)
            self._fallback[name] = ~ok
            self._coef[name] = (coef, ok)

    # -- construction -------------------------------------------------------
    def _stencil_mask(self, name, mask):
        if name == "C":
            return mask
        axis = 0 if name in ("L", "R") else 1
        delta = self.dxv[..., axis]
        if name in ("L", "B"):
            return mask & (delta <= 0)
        return mask & (delta >= 0)

    def _build(self, smask, quadratic):
        h = self.cloud.h
        z = self.dxv / h
        D = _basis_quadratic(z) if quadratic else _basis_linear(z)
        p = D.shape[-1]
        w = self.w * smask
        Dw = D * w[..., None]  # (N, M, p)
        A = np.einsum("nmp,nmq->npq", Dw, D)
        ev = np.linalg.eigvalsh(A)
        n_eff = (w > 0).sum(axis=1)
        ok = (ev[:, 0] > 0) & (ev[:, -1] <= COND_LIMIT * np.maximum(ev[:, 0], 1e-300)) \
            & (n_eff >= p + 1)  # center contributes nothing: need p informative rows
        A_safe = np.where(ok[:, None, None], A, np.eye(p))
        coef = np.linalg.solve(A_safe, np.swapaxes(Dw, 1, 2))  # (N, p, M)
        scale = _deriv_scales(self.dim, h) if quadratic else np.full(self.dim, 1.0 / h)
        coef = coef * scale[None, :, None]
        return coef, ok

    # -- application ----------------------------------------------------------
    def _apply(self, name, comp, values):
        """Apply coefficient rows (stencil, derivative component) to values (N, K)."""
        coef = self._coef[name][0][:, comp, :]
        if self.n * self.m * values.shape[1] <= _GATHER_BUDGET:
            diffs = values[self.idx] - values[:, None, :]
            return np.einsum("nm,nmk->nk", coef, diffs)
        key = (name, comp)
        mat = self._mat_cache.get(key)
        if mat is None:
            rows = np.repeat(np.arange(self.n), self.m)
            cols = self.idx.ravel()
            data = coef.ravel()
            diag = -coef.sum(axis=1)
            rows = np.concatenate([rows, np.arange(self.n)])
            cols = np.concatenate([cols, np.arange(self.n)])
            data = np.concatenate([data, diag])
            mat = sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
            self._mat_cache[key] = mat
        return mat @ values

    def directional_first(self, values, sign, axis):
        """Linear-basis upwind first derivative along axis; sign is (N, K)."""
        left = "L" if axis == 0 else "B"
        right = "R" if axis == 0 else "T"
        dL = self._apply(left, axis, values)
        dR = self._apply(right, axis, values)
        out = np.where(sign > 0, dL, dR)
        zero = sign == 0
        if zero.any():
            out = np.where(zero, self._apply("C", axis, values), out)
        return out

    def weno_first(self, values, sign, axis):
        """WENO-blended quadratic-stencil first derivative along axis."""
        left = "L" if axis == 0 else "B"
        right = "R" if axis == 0 else "T"
        dx = self.dx_nominal
        comps = range(2) if self.dim == 1 else range(5)
        cand = {}
        smooth = {}
        for name in (left, "C", right):
            derivs = [self._apply(name, c, values) for c in comps]
            cand[name] = derivs[axis]
            if self.dim == 1:
                denom = derivs[0] ** 2 * dx**2 + derivs[1] ** 2 * dx**4 + self.eps
            else:
                denom = ((derivs[0] ** 2 + derivs[1] ** 2) * dx**2
                         + (derivs[2] ** 2 + derivs[3] ** 2 + derivs[4] ** 2) * dx**4
                         + self.eps)
            smooth[name] = 1.0 / denom**2

        pos = sign > 0
        neg = sign < 0
        cl = np.where(pos, 0.5, 0.0)
        cr = np.where(neg, 0.5, 0.0)
        cc = np.where(pos | neg, 0.5, 1.0)
        # degenerate one-sided candidates hand their mass to the center
        fb_l = self._fallback[left][:, None]
        fb_r = self._fallback[right][:, None]
        cc = cc + np.where(fb_l, cl, 0.0) + np.where(fb_r, cr, 0.0)
        cl = np.where(fb_l, 0.0, cl)
        cr = np.where(fb_r, 0.0, cr)

        bl = cl * smooth[left]
        bc = cc * smooth["C"]
        br = cr * smooth[right]
        total = bl + bc + br
        return (bl * cand[left] + bc * cand["C"] + br * cand[right]) / total

    def gradient_component(self, values, sign, axis):
        if self.order == 1:
            return self.directional_first(values, sign, axis)
        return self.weno_first(values, sign, axis)
