"""Cloud initialization for intervals, rectangles and polygonal domains.

Boundary points are laid out at spacing ~dx along every boundary (domain
and immersed bodies); interior points fill the gas region on a lattice of
spacing dx, keeping clearance from all boundaries.  Normals point from the
boundary into the gas.
"""

from __future__ import annotations

import numpy as np
import shapely
from shapely.geometry import Polygon

from alebgk.cloud import BODY_BOUNDARY, DOMAIN_BOUNDARY, INTERIOR, PointCloud

#: interior lattice points keep this clearance (times dx) from boundaries
BOUNDARY_CLEARANCE = 0.6


def interval_interior(a: float, b: float, dx: float) -> np.ndarray:
    """Uniform interior points of [a, b] at spacing ~dx (endpoints excluded)."""
    n = int(round((b - a) / dx))
    if n < 2 or (b - a) <= dx:
        return np.empty(0)
    return np.linspace(a, b, n + 1)[1:-1]


def initialize_cloud_1d(a: float, b: float, dx: float, h: float, *,
                        alpha: float = 6.0,
                        holes=None,
                        bc_left: int = 0, bc_right: int = 1,
                        hole_bcs=None) -> PointCloud:
    """1D gas domain [a, b] minus solid ``holes`` = [(lo, hi), ...].

    Boundary points: domain ends (bc_left/bc_right), then per hole its two
    faces with bc ids from ``hole_bcs`` = [(bc_lo_face, bc_hi_face), ...]
    and body_id = hole index.
    """
    if dx >= h:
        raise ValueError("dx must be smaller than h")
    holes = sorted(holes or [])
    hole_bcs = hole_bcs or [(2 + 2 * i, 3 + 2 * i) for i in range(len(holes))]

    xs, kinds, normals, bcs, bids = [], [], [], [], []

    def add(x, kind, nrm, bc, bid=-1):
        xs.append(x)
        kinds.append(kind)
        normals.append(nrm)
        bcs.append(bc)
        bids.append(bid)

    add(a, DOMAIN_BOUNDARY, 1.0, bc_left)
    add(b, DOMAIN_BOUNDARY, -1.0, bc_right)
    segments = []
    lo_prev = a
    for i, (lo, hi) in enumerate(holes):
        add(lo, BODY_BOUNDARY, -1.0, hole_bcs[i][0], i)  # face seen by left gas
        add(hi, BODY_BOUNDARY, 1.0, hole_bcs[i][1], i)
        segments.append((lo_prev, lo))
        lo_prev = hi
    segments.append((lo_prev, b))

    for lo, hi in segments:
        for x in interval_interior(lo, hi, dx):
            add(x, INTERIOR, 0.0, -1)

    cloud = PointCloud(np.array(xs)[:, None], kinds,
                       normal=np.array(normals)[:, None],
                       area_weight=np.ones(len(xs)),
                       body_id=bids, bc_id=bcs, h=h, dx=dx, alpha=alpha)
    cloud.rebuild_index()
    return cloud


def initialize_cloud_rect_lattice(xmin, xmax, ymin, ymax, dx, h, *,
                                  alpha: float = 6.0, bc_id: int = 0) -> PointCloud:
    """Full lattice over a rectangle; edge points are domain boundary.

    Used by the smooth 2D benchmark where all four sides share one far-field
    condition; corner normals are the normalized diagonal.
    """
    nx = int(round((xmax - xmin) / dx)) + 1
    ny = int(round((ymax - ymin) / dx)) + 1
    gx = np.linspace(xmin, xmax, nx)
    gy = np.linspace(ymin, ymax, ny)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    on_left = np.isclose(pts[:, 0], xmin)
    on_right = np.isclose(pts[:, 0], xmax)
    on_bottom = np.isclose(pts[:, 1], ymin)
    on_top = np.isclose(pts[:, 1], ymax)
    boundary = on_left | on_right | on_bottom | on_top
    normal = np.zeros_like(pts)
    normal[on_left, 0] += 1.0
    normal[on_right, 0] -= 1.0
    normal[on_bottom, 1] += 1.0
    normal[on_top, 1] -= 1.0
    norms = np.linalg.norm(normal, axis=1)
    normal[boundary] /= norms[boundary, None]
    kind = np.where(boundary, DOMAIN_BOUNDARY, INTERIOR).astype(np.int8)
    bc = np.where(boundary, bc_id, -1)
    area = np.where(boundary, (gx[1] - gx[0]), 0.0)
    cloud = PointCloud(pts, kind, normal=normal, area_weight=area,
                       bc_id=bc, h=h, dx=dx, alpha=alpha)
    cloud.rebuild_index()
    return cloud


def sample_ring(coords: np.ndarray, dx: float):
    """Points, into-left normals and arc weights along a closed polyline.

    ``coords`` is the ring vertex list (first == last).  Normals point to
    the left of the traversal direction, i.e. inward for a CCW exterior
    ring and outward into the gas for a CW-oriented body outline.
    """
    pts, nrms, das = [], [], []
    for p0, p1 in zip(coords[:-1], coords[1:]):
        edge = np.asarray(p1) - np.asarray(p0)
        length = np.hypot(*edge)
        if length == 0:
            continue
        n_seg = max(int(round(length / dx)), 1)
        t = np.arange(n_seg) / n_seg
        seg_pts = np.asarray(p0) + t[:, None] * edge
        d = edge / length
        left_normal = np.array([-d[1], d[0]])
        pts.append(seg_pts)
        nrms.append(np.repeat(left_normal[None, :], n_seg, axis=0))
        das.append(np.full(n_seg, length / n_seg))
    return np.vstack(pts), np.vstack(nrms), np.concatenate(das)


def initialize_cloud_polygon(domain: Polygon, dx: float, h: float, *,
                             alpha: float = 6.0,
                             boundary_bc=0,
                             body_samples=(),
                             exclude=()) -> PointCloud:
    """General polygonal gas domain with immersed bodies.

    ``boundary_bc`` is an int or a callable (point, normal) -> bc id for
    domain boundary points.  ``body_samples`` is a list of tuples
    (positions, normals, areas, body_id, bc_id) supplied by rigid bodies;
    ``exclude`` are shapely geometries interior points must avoid.
    """
    domain = shapely.geometry.polygon.orient(domain)  # CCW exterior
    ring = np.asarray(domain.exterior.coords)
    bpts, bnrm, bda = sample_ring(ring, dx)
    if callable(boundary_bc):
        bbc = np.array([boundary_bc(p, n) for p, n in zip(bpts, bnrm)], dtype=np.int64)
    else:
        bbc = np.full(len(bpts), boundary_bc, dtype=np.int64)

    xs = [bpts]
    kinds = [np.full(len(bpts), DOMAIN_BOUNDARY, dtype=np.int8)]
    normals = [bnrm]
    areas = [bda]
    bids = [np.full(len(bpts), -1, dtype=np.int64)]
    bcs = [bbc]

    for pos, nrm, da, body_id, bc_id in body_samples:
        xs.append(pos)
        kinds.append(np.full(len(pos), BODY_BOUNDARY, dtype=np.int8))
        normals.append(nrm)
        areas.append(da)
        bids.append(np.full(len(pos), body_id, dtype=np.int64))
        bcs.append(np.full(len(pos), bc_id, dtype=np.int64))

    # interior lattice with clearance from all boundaries
    xmin, ymin, xmax, ymax = domain.bounds
    gx = np.arange(xmin + dx, xmax - 0.5 * dx, dx)
    gy = np.arange(ymin + dx, ymax - 0.5 * dx, dx)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    cand = np.column_stack([X.ravel(), Y.ravel()])
    inside = shapely.contains_xy(domain, cand[:, 0], cand[:, 1])
    cand = cand[inside]
    clearance = BOUNDARY_CLEARANCE * dx
    pts_geom = shapely.points(cand[:, 0], cand[:, 1])
    keep = shapely.distance(pts_geom, domain.exterior) >= clearance
    for geom in exclude:
        keep &= ~shapely.contains_xy(geom, cand[:, 0], cand[:, 1])
        keep &= shapely.distance(pts_geom, geom) >= clearance
    cand = cand[keep]

    xs.append(cand)
    kinds.append(np.full(len(cand), INTERIOR, dtype=np.int8))
    normals.append(np.zeros_like(cand))
    areas.append(np.zeros(len(cand)))
    bids.append(np.full(len(cand), -1, dtype=np.int64))
    bcs.append(np.full(len(cand), -1, dtype=np.int64))

    cloud = PointCloud(np.vstack(xs), np.concatenate(kinds),
                       normal=np.vstack(normals),
                       area_weight=np.concatenate(areas),
                       body_id=np.concatenate(bids),
                       bc_id=np.concatenate(bcs), h=h, dx=dx, alpha=alpha)
    cloud.rebuild_index()
    return cloud
