"""Moving point cloud with voxel neighbor search and point management.

Points are stored in flat numpy arrays (positions, kinds, normals, ...) so
the solver can operate on whole-cloud views.  The voxel index bins points
into cells of side ``h``; ball queries inspect a cell and its adjacent
cells only, giving O(N log N) rebuild + query cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from alebgk.errors import InsufficientNeighborsError

INTERIOR = 0
DOMAIN_BOUNDARY = 1
BODY_BOUNDARY = 2

#: default dx/h ratio per physical dimension
DEFAULT_BETA = {1: 0.35, 2: 0.4}
#: pairs closer than theta_merge * dx are merged
THETA_MERGE = 0.55
#: neighbor gaps wider than this (times dx) are hole-fill candidates
HOLE_GAP = 1.8
#: a filler point must keep this clearance (times dx) to existing points
FILL_CLEARANCE = 0.75
#: minimum neighbors for a solvable second-order stencil
M_MIN = {1: 3, 2: 6}


def weight(dx_vec, h: float, alpha: float = 6.0):
    """Shifted Gaussian stencil weight, decaying to exactly zero at |dx| = h.

    The shift keeps the weight continuous in the point positions as
    neighbors enter or leave the support ball, so the derivative
    operators do not jump while points move.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    dx_vec = np.asarray(dx_vec, dtype=float)
    r2 = np.sum(np.atleast_1d(dx_vec) ** 2, axis=-1)
    w = np.exp(-alpha * r2 / h**2) - np.exp(-alpha)
    return np.maximum(np.where(r2 <= h**2 * (1 + 1e-14), w, 0.0), 0.0)


@dataclass
class NeighborSets:
    """Ball neighbors of one point and their per-axis sign partitions."""

    all: np.ndarray
    left: list  # per axis: ids with x_k[axis] <= x_i[axis]  (self included)
    right: list  # per axis: ids with x_k[axis] >= x_i[axis] (self included)


class VoxelIndex:
    """Uniform grid of cells with side h mapping cell -> point ids."""

    def __init__(self, x: np.ndarray, h: float):
        self.x = x
        self.h = h
        self.dim = x.shape[1]
        cells = np.floor(x / h).astype(np.int64)
        self._origin = cells.min(axis=0) if len(x) else np.zeros(self.dim, dtype=np.int64)
        shifted = cells - self._origin
        self._extent = shifted.max(axis=0) + 1 if len(x) else np.ones(self.dim, dtype=np.int64)
        self._keys = self._linearize(shifted)
        order = np.argsort(self._keys, kind="stable")
        self._order = order
        sorted_keys = self._keys[order]
        uniq, starts = np.unique(sorted_keys, return_index=True)
        self._cell_of = dict(zip(uniq.tolist(), range(len(uniq))))
        self._starts = np.append(starts, len(order))
        self._uniq = uniq

    def _linearize(self, shifted):
        if self.dim == 1:
            return shifted[:, 0]
        return shifted[:, 0] * (self._extent[1] + 2) + shifted[:, 1]

    def _cell_members(self, key: int) -> np.ndarray:
        slot = self._cell_of.get(key)
        if slot is None:
            return np.empty(0, dtype=np.int64)
        return self._order[self._starts[slot]:self._starts[slot + 1]]

    def _candidate_ids(self, cell_key_coords) -> np.ndarray:
        """Points in the cell and its adjacent cells (3 in 1D, 9 in 2D)."""
        parts = []
        if self.dim == 1:
            (cx,) = cell_key_coords
            for ox in (-1, 0, 1):
                parts.append(self._cell_members(cx + ox))
        else:
            cx, cy = cell_key_coords
            for ox in (-1, 0, 1):
                for oy in (-1, 0, 1):
                    parts.append(self._cell_members((cx + ox) * (self._extent[1] + 2) + (cy + oy)))
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    def query_radius(self, q: np.ndarray) -> list:
        """Ids within distance h of each query position (one array per query)."""
        q = np.atleast_2d(np.asarray(q, dtype=float))
        out = []
        for p in q:
            cell = np.floor(p / self.h).astype(np.int64) - self._origin
            cand = self._candidate_ids(tuple(cell))
            if len(cand) == 0:
                out.append(cand)
                continue
            d2 = np.sum((self.x[cand] - p) ** 2, axis=1)
            out.append(cand[d2 <= self.h**2 * (1 + 1e-14)])
        return out

    def neighbor_table(self):
        """Padded all-points neighbor table (idx, mask), idx[i] within h of i."""
        n = len(self.x)
        counts = np.zeros(n, dtype=np.int64)
        h2 = self.h**2 * (1 + 1e-14)
        row_chunks, id_chunks = [], []
        for slot, key in enumerate(self._uniq):
            members = self._order[self._starts[slot]:self._starts[slot + 1]]
            if self.dim == 1:
                coords = (key,)
            else:
                coords = (key // (self._extent[1] + 2), key % (self._extent[1] + 2))
            cand = self._candidate_ids(coords)
            diff = self.x[members][:, None, :] - self.x[cand][None, :, :]
            d2 = np.einsum("mcd,mcd->mc", diff, diff)
            inside = d2 <= h2
            r, c = np.nonzero(inside)
            counts[members] = inside.sum(axis=1)
            row_chunks.append(members[r])
            id_chunks.append(cand[c])
        m_max = int(counts.max()) if n else 0
        idx = np.zeros((n, m_max), dtype=np.int64)
        mask = np.zeros((n, m_max), dtype=bool)
        if n:
            rows = np.concatenate(row_chunks)
            ids = np.concatenate(id_chunks)
            order = np.argsort(rows, kind="stable")
            rows, ids = rows[order], ids[order]
            offsets = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=offsets[1:])
            pos = np.arange(len(rows)) - offsets[rows]
            idx[rows, pos] = ids
            mask[rows, pos] = True
        return idx, mask


@dataclass
class ChangeReport:
    """Ids removed from and positions appended by a management pass."""

    removed: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    added: np.ndarray = field(default_factory=lambda: np.empty((0,), dtype=np.int64))

    @property
    def changed(self) -> bool:
        return len(self.removed) > 0 or len(self.added) > 0


class PointCloud:
    """Movable physical-space point set with spatial index."""

    def __init__(self, x, kind, normal=None, area_weight=None, body_id=None,
                 bc_id=None, *, h: float, dx: float, alpha: float = 6.0):
        self.x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.x.shape[0] == 1 and self.x.shape[1] > 2:
            self.x = self.x.T
        n, dim = self.x.shape
        if dx >= h:
            raise ValueError(f"dx ({dx}) must be smaller than h ({h})")
        self.kind = np.asarray(kind, dtype=np.int8)
        self.normal = (np.zeros((n, dim)) if normal is None
                       else np.asarray(normal, dtype=float).reshape(n, dim))
        self.area_weight = (np.zeros(n) if area_weight is None
                            else np.asarray(area_weight, dtype=float))
        self.body_id = (np.full(n, -1, dtype=np.int64) if body_id is None
                        else np.asarray(body_id, dtype=np.int64))
        self.bc_id = (np.full(n, -1, dtype=np.int64) if bc_id is None
                      else np.asarray(bc_id, dtype=np.int64))
        self.h = float(h)
        self.dx = float(dx)
        self.alpha = float(alpha)
        self._version = 0
        self._index_version = -1
        self._index: VoxelIndex | None = None
        self._nbr_idx = None
        self._nbr_mask = None
        self._x_indexed = None
        # fraction of h points may drift before the neighbor table is
        # rebuilt; membership at radius ~h carries weight ~e^-alpha, so a
        # small tolerance does not affect the stencils materially
        self.index_stale_tol = 0.05

    # -- basic introspection -------------------------------------------------
    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def interior_mask(self) -> np.ndarray:
        return self.kind == INTERIOR

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.kind != INTERIOR

    # -- mutation ------------------------------------------------------------
    def touch(self):
        """Mark positions as changed; queries require rebuild_index afterwards."""
        self._version += 1

    def move(self, displacement):
        self.x = self.x + displacement
        self.touch()

    def remove_points(self, ids) -> None:
        keep = np.ones(self.n, dtype=bool)
        keep[ids] = False
        self._apply_keep(keep)

    def _apply_keep(self, keep):
        self.x = self.x[keep]
        self.kind = self.kind[keep]
        self.normal = self.normal[keep]
        self.area_weight = self.area_weight[keep]
        self.body_id = self.body_id[keep]
        self.bc_id = self.bc_id[keep]
        self.touch()

    def add_interior_points(self, positions) -> None:
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        m = positions.shape[0]
        self.x = np.vstack([self.x, positions])
        self.kind = np.append(self.kind, np.zeros(m, dtype=np.int8))
        self.normal = np.vstack([self.normal, np.zeros((m, self.dim))])
        self.area_weight = np.append(self.area_weight, np.zeros(m))
        self.body_id = np.append(self.body_id, np.full(m, -1, dtype=np.int64))
        self.bc_id = np.append(self.bc_id, np.full(m, -1, dtype=np.int64))
        self.touch()

    # -- spatial index -------------------------------------------------------
    def rebuild_index(self) -> None:
        if (self._index is not None and self._x_indexed is not None
                and self.x.size > 0
                and self._x_indexed.shape == self.x.shape
                and float(np.max(np.abs(self.x - self._x_indexed)))
                <= self.index_stale_tol * self.h):
            # reuse cell/neighbor structure; measure from live positions
            self._index.x = self.x
            self._index_version = self._version
            return
        self._index = VoxelIndex(self.x, self.h)
        self._nbr_idx, self._nbr_mask = self._index.neighbor_table()
        self._x_indexed = self.x.copy()
        self._index_version = self._version

    def _check_index(self):
        assert self._index_version == self._version, (
            "stale spatial index: call rebuild_index() after moving points")

    @property
    def index(self) -> VoxelIndex:
        self._check_index()
        return self._index

    def neighbor_table(self):
        """Padded (idx, mask) arrays of ball neighbors for every point."""
        self._check_index()
        return self._nbr_idx, self._nbr_mask

    def neighbors_within(self, i: int) -> NeighborSets:
        self._check_index()
        ids = self._nbr_idx[i][self._nbr_mask[i]]
        left, right = [], []
        for ax in range(self.dim):
            delta = self.x[ids, ax] - self.x[i, ax]
            left.append(ids[delta <= 0])
            right.append(ids[delta >= 0])
        return NeighborSets(all=ids, left=left, right=right)

    # -- interpolation ---------------------------------------------------------
    def mls_interpolate(self, x_query, values, *, min_neighbors=None, widen=1.0):
        """Weighted moving least squares interpolation at query positions.

        ``values`` has shape (n, ...) over cloud points; the result has the
        query count as leading axis.  Uses the quadratic Taylor basis and
        Gaussian weights of the derivative stencils; exact for polynomials
        up to degree 2.
        """
        self._check_index()
        x_query = np.atleast_2d(np.asarray(x_query, dtype=float))
        values = np.asarray(values, dtype=float)
        if min_neighbors is None:
            min_neighbors = M_MIN[self.dim]
        neigh = self.index.query_radius(x_query)
        flat = values.reshape(self.n, -1)
        out = np.empty((x_query.shape[0], flat.shape[1]))
        for q, (xq, ids) in enumerate(zip(x_query, neigh)):
            r_eff = self.h
            while len(ids) < min_neighbors and widen > 1.0 and r_eff < widen * self.h:
                r_eff = min(widen * self.h, r_eff * 1.5)
                d2 = np.sum((self.x - xq) ** 2, axis=1)
                ids = np.where(d2 <= r_eff**2)[0]
            if len(ids) < min_neighbors:
                raise InsufficientNeighborsError(
                    f"query {xq} has {len(ids)} neighbors, needs {min_neighbors}")
            dxv = self.x[ids] - xq
            w = np.exp(-self.alpha * np.sum(dxv**2, axis=1) / r_eff**2)
            basis = _mls_basis(dxv / r_eff)
            A = (basis * w[:, None]).T @ basis
            rhs = (basis * w[:, None]).T @ flat[ids]
            try:
                coef = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                coef = np.linalg.lstsq(A, rhs, rcond=None)[0]
            out[q] = coef[0]
        return out.reshape((x_query.shape[0],) + values.shape[1:])

    # -- management ------------------------------------------------------------
    def manage_points(self, fields: dict | None = None, admissible=None) -> ChangeReport:
        """Merge clustered points and fill holes; interpolate carried fields.

        ``fields`` maps names to (n, ...) arrays; they are updated in place
        (re-bound values returned in the dict).  ``admissible`` is a callable
        positions -> bool mask accepting candidate fill locations; ``None``
        accepts everything.
        """
        self._check_index()
        fields = fields if fields is not None else {}
        merge_thr = THETA_MERGE * self.dx
        report = ChangeReport()

        removed_ids = []
        new_positions = []

        # --- iterative merging of clustered pairs ---
        pos = self.x.copy()
        alive = np.ones(self.n, dtype=bool)
        # synthetic points created by merging: (position, parents)
        synth = []
        for _ in range(64):
            pts, ids = self._alive_points(pos, alive, synth)
            if len(pts) < 2:
                break
            pairs = _close_pairs(pts, merge_thr, self.h)
            if not len(pairs):
                break
            done = set()
            progressed = False
            for a, b in pairs:
                ia, ib = ids[a], ids[b]
                if ia in done or ib in done:
                    continue
                ka = self._kind_of(ia)
                kb = self._kind_of(ib)
                if ka != INTERIOR and kb != INTERIOR:
                    continue  # boundary spacing is owned by the geometry
                done.add(ia)
                done.add(ib)
                progressed = True
                if ka != INTERIOR or kb != INTERIOR:
                    # interior point crowding a boundary point: drop interior
                    drop = ia if ka == INTERIOR else ib
                    self._deactivate(drop, alive, synth)
                else:
                    mid = 0.5 * (self._pos_of(ia, pos, synth) + self._pos_of(ib, pos, synth))
                    self._deactivate(ia, alive, synth)
                    self._deactivate(ib, alive, synth)
                    synth.append([mid, True])
            if not progressed:
                break

        removed_ids = np.where(~alive)[0]
        new_positions = [s[0] for s in synth if s[1]]

        # --- hole filling on the surviving configuration ---
        pts, ids = self._alive_points(pos, alive, synth)
        gap_pairs = _gapped_pairs(pts, HOLE_GAP * self.dx, self.h)
        accepted = []
        for a, b in gap_pairs:
            mid = 0.5 * (pts[a] + pts[b])
            if admissible is not None and not bool(np.atleast_1d(admissible(mid[None, :]))[0]):
                continue
            d2 = np.sum((pts - mid) ** 2, axis=1)
            if d2.min() < (FILL_CLEARANCE * self.dx) ** 2:
                continue
            if accepted and np.min(np.sum((np.array(accepted) - mid) ** 2, axis=1)) \
                    < (FILL_CLEARANCE * self.dx) ** 2:
                continue
            accepted.append(mid)
        new_positions.extend(accepted)

        if len(removed_ids) == 0 and len(new_positions) == 0:
            return report

        # interpolate carried fields at the new positions from survivors
        new_positions = np.array(new_positions).reshape(-1, self.dim)
        survivor_cloud = self._survivor_view(alive)
        interp = {}
        if len(new_positions):
            for name, arr in fields.items():
                interp[name] = survivor_cloud.mls_interpolate(
                    new_positions, arr[alive], widen=3.0)

        keep = alive
        self._apply_keep(keep)
        for name, arr in fields.items():
            kept = arr[keep]
            fields[name] = (np.concatenate([kept, interp[name]], axis=0)
                            if len(new_positions) else kept)
        first_new = self.n
        if len(new_positions):
            self.add_interior_points(new_positions)
        self.rebuild_index()
        report.removed = removed_ids
        report.added = np.arange(first_new, self.n, dtype=np.int64)
        return report

    # management helpers keep a unified id space: original ids 0..n-1,
    # synthetic merge products get ids n, n+1, ...
    def _kind_of(self, i):
        return INTERIOR if i >= self.n else self.kind[i]

    def _pos_of(self, i, pos, synth):
        return synth[i - self.n][0] if i >= self.n else pos[i]

    def _deactivate(self, i, alive, synth):
        if i >= self.n:
            synth[i - self.n][1] = False
        else:
            alive[i] = False

    def _alive_points(self, pos, alive, synth):
        pts = [pos[alive]]
        ids = [np.where(alive)[0]]
        live_synth = [(j, s[0]) for j, s in enumerate(synth) if s[1]]
        if live_synth:
            pts.append(np.array([p for _, p in live_synth]))
            ids.append(np.array([self.n + j for j, _ in live_synth]))
        return np.vstack(pts), np.concatenate(ids)

    def _survivor_view(self, alive) -> "PointCloud":
        view = PointCloud(self.x[alive], self.kind[alive], self.normal[alive],
                          self.area_weight[alive], self.body_id[alive],
                          self.bc_id[alive], h=self.h, dx=self.dx, alpha=self.alpha)
        view.rebuild_index()
        return view


def _pairs_within(pts, radius):
    """All index pairs (a < b) with |x_a - x_b| <= radius (brute via voxel)."""
    idx = VoxelIndex(pts, max(radius, 1e-300))
    out = []
    for i, ids in enumerate(idx.query_radius(pts)):
        for j in ids:
            if j > i:
                out.append((i, int(j)))
    return out


def _close_pairs(pts, thr, h):
    pairs = _pairs_within(pts, thr)
    pairs.sort(key=lambda ab: np.sum((pts[ab[0]] - pts[ab[1]]) ** 2))
    return pairs


def _gapped_pairs(pts, gap, h):
    """Neighbor pairs within h separated by more than gap."""
    idx = VoxelIndex(pts, h)
    out = []
    g2 = gap * gap
    for i, ids in enumerate(idx.query_radius(pts)):
        d2 = np.sum((pts[ids] - pts[i]) ** 2, axis=1)
        for j, dd in zip(ids, d2):
            if j > i and dd > g2:
                out.append((i, int(j)))
    return out


def _mls_basis(dxv):
    """Quadratic Taylor basis rows [1, dx, dx^2/2] / [1, dx, dy, ...]."""
    if dxv.shape[1] == 1:
        d = dxv[:, 0]
        return np.column_stack([np.ones_like(d), d, 0.5 * d * d])
    dx, dy = dxv[:, 0], dxv[:, 1]
    return np.column_stack([np.ones_like(dx), dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy])
