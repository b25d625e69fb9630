"""Scenario configuration, presets, run loop, probes and convergence.

A scenario is described by a flat key/value tree (YAML on disk).  The
``layout`` key selects the geometry/boundary builder; everything else is
plain physics and numerics parameters.  Shipped presets cover a smooth
1D pulse, a shock tube, a driven piston, a two-way-coupled 1D plate
between reservoirs at different temperatures, a smooth 2D pulse, an
oscillating rectangular shuttle, immersed particles in a heated channel
and a multi-particle driven cavity (presets example1 ... example8).
"""

from __future__ import annotations

import importlib.resources
import time
from dataclasses import dataclass, field as dc_field

import numpy as np
import shapely
import yaml

from alebgk.boundaries import DiffuseWall, FarField
from alebgk.bodies import RigidBody, polygon_inertia
from alebgk.cloud import DEFAULT_BETA, PointCloud
from alebgk.core import Simulation, cfl_dt
from alebgk.errors import ConfigurationError
from alebgk.geometry import (
    initialize_cloud_1d,
    initialize_cloud_polygon,
    sample_ring,
)
from alebgk.velocity import (
    GasProperties,
    make_velocity_grid,
    reduced_maxwellians,
    relaxation_time,
)

SCHEME_NAMES = {
    "first-order": "first_order", "first_order": "first_order",
    "ARS(2,2,2)": "ars222", "ars222": "ars222",
    "ARS(2,2,1)": "ars221", "ars221": "ars221",
}


@dataclass
class ScenarioConfig:
    """Flat scenario description; unknown layout keys live in ``params``."""

    name: str
    layout: str
    dim: int
    R: float
    rho0: float
    T0: float
    tau_mode: str  # "fixed" | "physical"
    vmax: float
    Nv: int
    dx: float
    t_final: float
    scheme: str = "first_order"
    cfl: float = 0.5
    dt: float | None = None
    tau_value: float | None = None
    molecular_diameter: float | None = None
    dx_over_h: float | None = None
    alpha: float = 6.0
    U0: dict = dc_field(default_factory=lambda: {"profile": "zero"})
    probe_points: int = 100
    manage: bool = True
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.scheme not in SCHEME_NAMES:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if self.t_final < 0:
            raise ConfigurationError("t_final must be nonnegative")
        if self.dx_over_h is None:
            self.dx_over_h = DEFAULT_BETA[self.dim]

    @property
    def h(self) -> float:
        return self.dx / self.dx_over_h

    @property
    def scheme_key(self) -> str:
        return SCHEME_NAMES[self.scheme]

    def timestep(self) -> float:
        return self.dt if self.dt is not None else cfl_dt(self.dx, self.vmax, self.cfl)

    def tau(self):
        """Fixed value or a state-dependent callable (rho, T) -> tau."""
        if self.tau_mode == "fixed":
            if self.tau_value is None:
                raise ConfigurationError("fixed tau mode requires tau_value")
            return float(self.tau_value)
        gas = (GasProperties(R=self.R) if self.molecular_diameter is None
               else GasProperties(R=self.R, d=self.molecular_diameter))
        return lambda rho, T: relaxation_time(rho, T, gas)

    def replace(self, **kw) -> "ScenarioConfig":
        data = dict(self.__dict__)
        data.pop("params")
        data["params"] = dict(self.params)
        data.update(kw)
        return ScenarioConfig(**data)


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ScenarioConfig:
    raw = dict(raw)
    known = {f for f in ScenarioConfig.__dataclass_fields__ if f != "params"}
    params = dict(raw.pop("params", {}))
    extra = {k: raw.pop(k) for k in list(raw) if k not in known}
    params.update(extra)
    return ScenarioConfig(params=params, **raw)


def load_preset(name: str) -> ScenarioConfig:
    ref = importlib.resources.files("alebgk") / "presets" / f"{name}.yaml"
    if not ref.is_file():
        raise ConfigurationError(f"no preset named {name!r}")
    return config_from_dict(yaml.safe_load(ref.read_text()))


def preset_names():
    root = importlib.resources.files("alebgk") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


# ---------------------------------------------------------------------------
# initial velocity profiles
# ---------------------------------------------------------------------------

def velocity_profile(spec: dict, x: np.ndarray) -> np.ndarray:
    """Initial bulk velocity field from a named profile."""
    kind = spec.get("profile", "zero")
    dim = x.shape[1]
    if kind == "zero":
        return np.zeros_like(x)
    if kind == "twin_pulse_x":
        # two opposing Gaussian pulses along x (1D smooth benchmark)
        s = spec.get("sigma", 10.0)
        xs = x[:, 0]
        u = (np.exp(-((s * xs - 1) ** 2)) - 2 * np.exp(-((s * xs + 3) ** 2))) / s
        out = np.zeros_like(x)
        out[:, 0] = u
        return out
    if kind == "ring_pulses_2d":
        # ring-shaped pulses around four centers (2D smooth benchmark)
        s = spec.get("sigma", 10.0)
        xs, ys = x[:, 0], x[:, 1]

        def ring(cx, cy):
            r = np.sqrt((xs - cx) ** 2 + (ys - cy) ** 2)
            return np.exp(-((s * r - 1) ** 2))

        out = np.zeros_like(x)
        out[:, 0] = (ring(0.2, 0.0) - 2 * ring(-0.2, 0.0)) / s
        out[:, 1] = (ring(0.0, 0.2) - 2 * ring(0.0, -0.2)) / s
        return out
    raise ConfigurationError(f"unknown velocity profile {kind!r}")


def density_profile(spec, x: np.ndarray) -> np.ndarray:
    if np.isscalar(spec):
        return np.full(x.shape[0], float(spec))
    kind = spec.get("profile")
    if kind == "step_x":
        split = spec.get("split", 0.5)
        return np.where(x[:, 0] < split, spec["left"], spec["right"])
    raise ConfigurationError(f"unknown density profile {spec!r}")


# ---------------------------------------------------------------------------
# layout builders
# ---------------------------------------------------------------------------

def _bc_object(spec: dict, cfg: ScenarioConfig):
    kind = spec["type"]
    if kind == "far_field":
        return FarField(rho=spec.get("rho", cfg.rho0),
                        U=tuple(spec.get("U", (0.0,) * cfg.dim)),
                        T=spec.get("T", cfg.T0))
    if kind == "diffuse":
        return DiffuseWall(T=spec.get("T", cfg.T0))
    raise ConfigurationError(f"unknown boundary type {kind!r}")


def _chiral_outline(r: float) -> np.ndarray:
    """Closed CW outline of a particle without mirror symmetry (an S of
    square blocks), scaled so the outline fits in a circle of radius r."""
    unit = np.array([
        (0, 0), (0, 1), (-1, 1), (-1, 3), (0, 3), (0, 4), (2, 4), (2, 3),
        (1, 3), (1, 1), (2, 1), (2, 0), (0, 0)], dtype=float)
    centroid = shapely.Polygon(unit).centroid
    unit -= (centroid.x, centroid.y)
    unit /= np.max(np.linalg.norm(unit, axis=1))
    ring = unit * r
    x, y = ring[:-1, 0], ring[:-1, 1]
    if np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) > 0:  # CCW -> flip
        ring = ring[::-1]
    return ring  # CW ring: left-of-travel normals point outward


def _body_from_spec(spec: dict, cfg: ScenarioConfig, body_id: int):
    shape = spec["shape"]
    center = np.asarray(spec["center"], dtype=float)
    sample_dx = spec.get("sample_dx", cfg.dx)
    if shape == "circle":
        r = spec["radius"]
        n = max(int(round(2 * np.pi * r / sample_dx)), 8)
        ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
        local = r * np.column_stack([np.cos(ang), np.sin(ang)])
        normals = local / r
        area = np.full(n, 2 * np.pi * r / n)
        footprint = shapely.Point(0.0, 0.0).buffer(r, quad_segs=max(n // 4, 8))
        mass = spec.get("mass", spec.get("density", 10.0 * cfg.rho0) * np.pi * r**2)
        inertia = 0.5 * mass * r**2
    elif shape == "rectangle":
        w, hgt = spec["width"], spec["height"]
        ring = np.array([(-w / 2, -hgt / 2), (-w / 2, hgt / 2), (w / 2, hgt / 2),
                         (w / 2, -hgt / 2), (-w / 2, -hgt / 2)])  # CW: outward
        local, normals, area = sample_ring(ring, sample_dx)
        footprint = shapely.Polygon(ring)
        mass = spec.get("mass", spec.get("density", 10.0 * cfg.rho0) * w * hgt)
        inertia = polygon_inertia(ring[:-1] + center, mass)
    elif shape == "chiral":
        ring = _chiral_outline(spec["radius"])
        local, normals, area = sample_ring(ring, sample_dx)
        footprint = shapely.Polygon(ring)
        mass = spec.get("mass",
                        spec.get("density", 10.0 * cfg.rho0) * shapely.Polygon(ring).area)
        inertia = abs(polygon_inertia(ring[:-1], mass))
    else:
        raise ConfigurationError(f"unknown body shape {shape!r}")
    return RigidBody(
        body_id=body_id, mass=mass, Xc=center, local_x=local, local_n=normals,
        area=area, inertia=inertia,
        translate_free=spec.get("translate_free", True),
        rotate_free=spec.get("rotate_free", False),
        motion=spec.get("motion", "none"),
        motion_params=spec.get("motion_params", {}),
        shape=footprint)


@dataclass
class BuiltScenario:
    config: ScenarioConfig
    sim: Simulation
    domain: tuple  # extents for probes / admissibility


def build(cfg: ScenarioConfig) -> BuiltScenario:
    builder = _LAYOUTS.get(cfg.layout)
    if builder is None:
        raise ConfigurationError(f"unknown layout {cfg.layout!r}")
    return builder(cfg)


def _make_state(cfg, cloud, grid):
    rho = density_profile(cfg.rho0, cloud.x)
    U = velocity_profile(cfg.U0, cloud.x)
    T = np.full(cloud.n, cfg.T0)
    g1, g2 = reduced_maxwellians(rho, U, T, grid, cfg.R)
    return g1, g2


def _build_interval(cfg: ScenarioConfig) -> BuiltScenario:
    a, b = cfg.params["domain"]
    cloud = initialize_cloud_1d(a, b, cfg.dx, cfg.h, alpha=cfg.alpha)
    grid = make_velocity_grid(dim=1, vmax=cfg.vmax, Nv=cfg.Nv)
    g1, g2 = _make_state(cfg, cloud, grid)
    bcs = {0: _bc_object(cfg.params["bc_left"], cfg),
           1: _bc_object(cfg.params["bc_right"], cfg)}
    wall_motion = {}
    if "wall_motion_left" in cfg.params:
        m = cfg.params["wall_motion_left"]
        amp, freq = m.get("amp", 0.25), m.get("freq", 1.0)
        if m["law"] != "piston_sin":
            raise ConfigurationError(f"unknown wall motion {m['law']!r}")
        wall_motion[0] = lambda t, x: np.array([amp * np.sin(freq * t)])

    def admissible(pts):
        return (pts[:, 0] > a) & (pts[:, 0] < b)

    sim = Simulation(cloud=cloud, grid=grid, R=cfg.R, g1=g1, g2=g2,
                     tau=cfg.tau(), scheme=cfg.scheme_key, bcs=bcs,
                     wall_motion=wall_motion, admissible=admissible,
                     manage=cfg.manage)
    return BuiltScenario(cfg, sim, (a, b))


def _build_interval_with_plate(cfg: ScenarioConfig) -> BuiltScenario:
    a, b = cfg.params["domain"]
    half_width = cfg.params["plate_half_width"]
    mass = cfg.params["plate_mass"]
    cloud = initialize_cloud_1d(a, b, cfg.dx, cfg.h, alpha=cfg.alpha,
                                holes=[(-half_width, half_width)])
    grid = make_velocity_grid(dim=1, vmax=cfg.vmax, Nv=cfg.Nv)
    g1, g2 = _make_state(cfg, cloud, grid)
    T_left = cfg.params.get("T_left", cfg.T0)
    T_right = cfg.params.get("T_right", cfg.T0)
    # bc ids: 0 domain left, 1 domain right, 2 plate left face, 3 plate right
    bcs = {0: DiffuseWall(T=T_left), 1: DiffuseWall(T=T_right),
           2: DiffuseWall(T=T_left), 3: DiffuseWall(T=T_right)}
    plate = RigidBody(body_id=0, mass=mass, Xc=np.zeros(1),
                      local_x=np.array([[-half_width], [half_width]]),
                      local_n=np.array([[-1.0], [1.0]]),
                      area=np.array([1.0, 1.0]))

    def admissible(pts):
        lo, hi = plate.Xc[0] - half_width, plate.Xc[0] + half_width
        inside_gap = (pts[:, 0] > lo - 0.5 * cfg.dx) & (pts[:, 0] < hi + 0.5 * cfg.dx)
        return (pts[:, 0] > a) & (pts[:, 0] < b) & ~inside_gap

    sim = Simulation(cloud=cloud, grid=grid, R=cfg.R, g1=g1, g2=g2,
                     tau=cfg.tau(), scheme=cfg.scheme_key, bcs=bcs,
                     bodies=[plate], admissible=admissible, manage=cfg.manage)
    return BuiltScenario(cfg, sim, (a, b))


def _build_rect(cfg: ScenarioConfig) -> BuiltScenario:
    (x0, x1), (y0, y1) = cfg.params["domain"]
    grid = make_velocity_grid(dim=2, vmax=cfg.vmax, Nv=cfg.Nv)
    outline = shapely.Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    # per-edge boundary conditions: bottom 0, right 1, top 2, left 3
    def side_bc(x, n):
        eps = 0.25 * cfg.dx
        if x[1] < y0 + eps:
            return 0
        if x[0] > x1 - eps:
            return 1
        if x[1] > y1 - eps:
            return 2
        return 3

    bodies = [_body_from_spec(s, cfg, i)
              for i, s in enumerate(cfg.params.get("bodies", []))]
    body_samples = []
    for b in bodies:
        body_samples.append((b.surface_positions(), b.surface_normals(),
                             b.area, b.body_id, 10 + b.body_id))
    exclude = [b.footprint() for b in bodies]
    cloud = initialize_cloud_polygon(outline, cfg.dx, cfg.h, alpha=cfg.alpha,
                                     boundary_bc=side_bc,
                                     body_samples=body_samples, exclude=exclude)
    g1, g2 = _make_state(cfg, cloud, grid)
    bcs = {}
    for j, key in enumerate(("bc_bottom", "bc_right", "bc_top", "bc_left")):
        bcs[j] = _bc_object(cfg.params[key], cfg)
    for b in bodies:
        bspec = cfg.params.get("bodies", [])[b.body_id]
        bcs[10 + b.body_id] = DiffuseWall(T=bspec.get("T_wall", cfg.T0))

    wall_motion = {}
    if "top_wall_slide" in cfg.params:
        m = cfg.params["top_wall_slide"]
        u_max, L = m["u_max"], m["L"]

        def slide(t, x, u_max=u_max, L=L):
            xi = 2.0 * x[:, 0] / L
            out = np.zeros_like(x)
            out[:, 0] = u_max * xi**2 * (2.0 - xi**2)
            return out
        wall_motion[2] = slide

    def admissible(pts):
        inside = (pts[:, 0] > x0) & (pts[:, 0] < x1) & \
                 (pts[:, 1] > y0) & (pts[:, 1] < y1)
        for b in bodies:
            fp = b.footprint()
            clear = shapely.distance(shapely.points(pts), fp) > 0.5 * cfg.dx
            inside &= clear
        return inside

    sim = Simulation(cloud=cloud, grid=grid, R=cfg.R, g1=g1, g2=g2,
                     tau=cfg.tau(), scheme=cfg.scheme_key, bcs=bcs,
                     wall_motion=wall_motion, bodies=bodies,
                     admissible=admissible, manage=cfg.manage)
    return BuiltScenario(cfg, sim, ((x0, x1), (y0, y1)))


def _build_shuttle(cfg: ScenarioConfig) -> BuiltScenario:
    p = cfg.params
    scale = p.get("scale", 1.0)
    ring = np.asarray(p["outline"], dtype=float) * scale
    outline = shapely.Polygon(ring)
    grid = make_velocity_grid(dim=2, vmax=cfg.vmax, Nv=cfg.Nv)
    sx0, sy0, sx1, sy1 = (p["shuttle"][k] * scale for k in ("x0", "y0", "x1", "y1"))
    shuttle = {"shape": "rectangle", "width": sx1 - sx0, "height": sy1 - sy0,
               "center": [0.5 * (sx0 + sx1), 0.5 * (sy0 + sy1)],
               "mass": p.get("mass", 1.0), "translate_free": False,
               "motion": "shuttle_cos",
               "motion_params": {"amp": p.get("v0", 1.0), "freq": p["nu"]},
               "T_wall": cfg.T0}
    body = _body_from_spec(shuttle, cfg, 0)
    openings = [np.asarray(seg, dtype=float) * scale
                for seg in p.get("open_segments", [])]

    def side_bc(x, n):
        eps = 0.25 * cfg.dx
        for (ax0, ay0), (ax1, ay1) in openings:
            if (min(ax0, ax1) - eps <= x[0] <= max(ax0, ax1) + eps and
                    min(ay0, ay1) - eps <= x[1] <= max(ay0, ay1) + eps):
                return 1
        return 0

    cloud = initialize_cloud_polygon(
        outline, cfg.dx, cfg.h, alpha=cfg.alpha, boundary_bc=side_bc,
        body_samples=[(body.surface_positions(), body.surface_normals(),
                       body.area, 0, 10)],
        exclude=[body.footprint()])
    g1, g2 = _make_state(cfg, cloud, grid)
    bcs = {0: DiffuseWall(T=cfg.T0),
           1: FarField(rho=cfg.rho0, U=(0.0, 0.0), T=cfg.T0),
           10: DiffuseWall(T=cfg.T0)}

    def admissible(pts):
        inside = shapely.contains_xy(outline, pts[:, 0], pts[:, 1])
        fp = body.footprint()
        inside &= shapely.distance(shapely.points(pts), fp) > 0.5 * cfg.dx
        return inside

    sim = Simulation(cloud=cloud, grid=grid, R=cfg.R, g1=g1, g2=g2,
                     tau=cfg.tau(), scheme=cfg.scheme_key, bcs=bcs,
                     bodies=[body], admissible=admissible, manage=cfg.manage)
    bounds = outline.bounds
    return BuiltScenario(cfg, sim, ((bounds[0], bounds[2]), (bounds[1], bounds[3])))


_LAYOUTS = {
    "interval": _build_interval,
    "interval_with_plate": _build_interval_with_plate,
    "rect": _build_rect,
    "shuttle": _build_shuttle,
}


# ---------------------------------------------------------------------------
# probes, run loop, convergence
# ---------------------------------------------------------------------------

def probe_positions(domain, dim: int, n: int) -> np.ndarray:
    """Uniform probe grid: n points across the interval (1D) or along the
    midline y = 0 where it lies inside the domain (2D)."""
    if dim == 1:
        a, b = domain
        eps = 1e-9 * (b - a)  # keep endpoints strictly inside the gas
        return np.linspace(a + eps, b - eps, n)[:, None]
    (x0, x1), (y0, y1) = domain
    y = 0.0 if y0 < 0.0 < y1 else 0.5 * (y0 + y1)
    eps = 1e-9 * (x1 - x0)
    xs = np.linspace(x0 + eps, x1 - eps, n)
    return np.column_stack([xs, np.full(n, y)])


def sample_probe(sim: Simulation, domain, n: int = 100):
    """MLS-interpolated (rho, U, T) on the uniform probe grid.

    Probe points falling outside the gas region (inside a body or hole)
    are dropped.
    """
    pos = probe_positions(domain, sim.cloud.dim, n)
    if sim.admissible is not None:
        pos = pos[sim.admissible(pos)]
    fields = np.column_stack([sim.rho, sim.U, sim.T])
    vals = sim.cloud.mls_interpolate(pos, fields, widen=3.0)
    rho = vals[:, 0]
    U = vals[:, 1:1 + sim.cloud.dim]
    T = vals[:, 1 + sim.cloud.dim]
    return pos, rho, U, T


@dataclass
class Snapshot:
    t: float
    x: np.ndarray
    rho: np.ndarray
    U: np.ndarray
    T: np.ndarray


@dataclass
class RunReport:
    config: ScenarioConfig
    snapshots: list
    body_history: list
    wall_time: float
    n_steps: int
    domain: tuple
    sim: Simulation | None = None

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]


def run(cfg: ScenarioConfig, snapshot_every: int = 0,
        progress=None) -> RunReport:
    """Execute a scenario to t_final; deterministic given the config."""
    built = build(cfg)
    sim = built.sim
    dt = cfg.timestep()
    snaps = [Snapshot(sim.t, sim.cloud.x.copy(), sim.rho.copy(),
                      sim.U.copy(), sim.T.copy())]
    t0 = time.perf_counter()
    n_steps = 0
    while sim.t < cfg.t_final - 1e-14 * max(1.0, cfg.t_final):
        sim.step(min(dt, cfg.t_final - sim.t))
        n_steps += 1
        if snapshot_every and n_steps % snapshot_every == 0:
            snaps.append(Snapshot(sim.t, sim.cloud.x.copy(), sim.rho.copy(),
                                  sim.U.copy(), sim.T.copy()))
        if progress is not None:
            progress(sim, n_steps)
    if snaps[-1].t < sim.t:
        snaps.append(Snapshot(sim.t, sim.cloud.x.copy(), sim.rho.copy(),
                              sim.U.copy(), sim.T.copy()))
    return RunReport(cfg, snaps, sim.body_history,
                     time.perf_counter() - t0, n_steps, built.domain, sim)


def probe_errors(sim_coarse: Simulation, sim_ref: Simulation, domain, n: int = 100):
    """L1/L2 probe-grid errors of temperature between two runs."""
    _, _, _, T_c = sample_probe(sim_coarse, domain, n)
    _, _, _, T_r = sample_probe(sim_ref, domain, n)
    e = T_c - T_r
    return np.mean(np.abs(e)), np.sqrt(np.mean(e**2))


def convergence_harness(cfg: ScenarioConfig, dx_ladder, dx_reference=None,
                        n_probe: int = 100, progress=None,
                        dt_mode: str = "shared"):
    """Errors and observed orders of temperature against a reference run.

    The ladder entries and the reference share the configuration except
    for dx.  With ``dt_mode="shared"`` (default) every run uses the
    reference level's time step, so the ladder isolates the spatial
    order: velocity-quadrature and time-integration errors are identical
    across levels and cancel in the differences.  With
    ``dt_mode="scaled"`` dt shrinks proportionally to dx instead.
    Returns a list of row dicts with keys dx, dt, l1, l1_order, l2,
    l2_order.
    """
    if dt_mode not in ("shared", "scaled"):
        raise ConfigurationError(f"unknown dt_mode {dt_mode!r}")
    if dx_reference is None:
        dx_reference = dx_ladder[-1]
        dx_ladder = dx_ladder[:-1]
    if cfg.dt is not None:
        dt_shared = cfg.dt * dx_reference / cfg.dx
    else:
        dt_shared = cfg.replace(dx=dx_reference).timestep()

    def run_at(dx):
        if dt_mode == "shared":
            sub = cfg.replace(dx=dx, dt=dt_shared)
        else:
            scale = dx / cfg.dx
            sub = cfg.replace(dx=dx, dt=None if cfg.dt is None else cfg.dt * scale)
        rep = run(sub, progress=progress)
        return sub, rep

    ref_cfg, ref = run_at(dx_reference)
    rows = []
    for dx in dx_ladder:
        sub, rep = run_at(dx)
        l1, l2 = probe_errors(rep.sim, ref.sim, rep.domain, n_probe)
        rows.append({"dx": dx, "dt": sub.timestep(), "l1": l1, "l2": l2,
                     "l1_order": np.nan, "l2_order": np.nan})
    for prev, cur in zip(rows[:-1], rows[1:]):
        cur["l1_order"] = np.log2(prev["l1"] / cur["l1"])
        cur["l2_order"] = np.log2(prev["l2"] / cur["l2"])
    return rows
