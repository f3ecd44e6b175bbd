"""Discretized 3D flow environment: grid geometry, synthetic fields, stats.

Conventions used throughout the package:

* The domain is an axis-aligned cube ``[0, extent]^3`` with nodes at
  ``i * spacing`` per axis, ``spacing = extent / (n - 1)``, so the first
  and last nodes sit exactly on the boundary.
* ``x`` is streamwise: the lead vehicle's stern faces +x and its jet wake
  extends toward +x, so the max-x face is the downstream (rear) boundary
  where approach trajectories begin. ``z`` is vertical.
* Occupied nodes carry speed 0.0; statistics are computed over
  non-occupied nodes only.

Fields are immutable once built (arrays are flagged read-only) and safe
to share across concurrent searches.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
import math
import zlib

import numpy as np

from .costs import PlannerConfig, energy_rate
from .errors import ConfigurationError, EmptyFieldError, GeometryError


class GridNode(tuple):
    """Integer grid index triple (ix, iy, iz).

    A plain tuple subclass: hashable, lexicographically ordered (which is
    the tie-break order used by the planner), cheap to create in inner
    loops.
    """

    __slots__ = ()

    def __new__(cls, ix: int, iy: int, iz: int):
        return super().__new__(cls, (int(ix), int(iy), int(iz)))

    @property
    def ix(self) -> int:
        return self[0]

    @property
    def iy(self) -> int:
        return self[1]

    @property
    def iz(self) -> int:
        return self[2]


@dataclass(frozen=True)
class GridSpec:
    """Node counts per axis and the physical edge length they span."""

    nx: int = 128
    ny: int = 128
    nz: int = 128
    extent: float = 155.0

    def __post_init__(self):
        for n in (self.nx, self.ny, self.nz):
            if n < 2:
                raise ConfigurationError("grid needs at least 2 nodes per axis")
        if self.extent <= 0:
            raise ConfigurationError("extent must be positive")
        s = self.extent / (self.nx - 1)
        for n in (self.ny, self.nz):
            if abs(s * (n - 1) - self.extent) > 1e-9 * self.extent:
                raise ConfigurationError(
                    "a single extent with differing node counts would give "
                    "unequal spacing per axis; use equal nx, ny, nz"
                )

    @property
    def spacing(self) -> float:
        """Meters between adjacent node centers."""
        return self.extent / (self.nx - 1)

    @property
    def shape(self) -> tuple:
        return (self.nx, self.ny, self.nz)

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny * self.nz

    def contains(self, node) -> bool:
        ix, iy, iz = node
        return 0 <= ix < self.nx and 0 <= iy < self.ny and 0 <= iz < self.nz

    def position(self, node) -> np.ndarray:
        """Physical coordinates of a grid node in meters."""
        return np.asarray(node, dtype=float) * self.spacing

    def nearest_node(self, point) -> GridNode:
        """Grid node closest to a physical point, clipped into bounds."""
        idx = np.rint(np.asarray(point, dtype=float) / self.spacing).astype(int)
        idx = np.clip(idx, 0, np.array([self.nx, self.ny, self.nz]) - 1)
        return GridNode(*idx)

    def axis_coords(self, axis: int) -> np.ndarray:
        n = (self.nx, self.ny, self.nz)[axis]
        return np.arange(n) * self.spacing


@dataclass(frozen=True)
class ScenarioParams:
    """Freestream condition a field was generated for."""

    flow_speed: float = 1.0
    flow_angle: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.1 <= self.flow_speed <= 5.0:
            raise ConfigurationError(
                f"flow_speed {self.flow_speed} outside [0.1, 5.0] m/s"
            )
        if not 0.0 <= self.flow_angle <= 60.0:
            raise ConfigurationError(
                f"flow_angle {self.flow_angle} outside [0, 60] degrees"
            )


@dataclass(frozen=True)
class HullModel:
    """Lead-vehicle geometry: outer hull box with a payload-bay void.

    The hull axis lies along x (rotated about the vertical axis by
    ``heading`` degrees). The bay is centered in the hull and open from
    below: its void spans from the hull's bottom face up to bay_height.
    ``center=None`` means the center of whatever domain the hull is
    placed into.
    """

    center: tuple | None = None
    length: float = 22.0
    width: float = 2.2
    height: float = 2.7
    bay_length: float = 5.5
    bay_width: float = 1.5
    bay_height: float = 2.2
    heading: float = 0.0

    def __post_init__(self):
        if not (
            self.bay_length < self.length
            and self.bay_width < self.width
            and self.bay_height < self.height
        ):
            raise ConfigurationError("bay must be strictly smaller than the hull")

    def resolved_center(self, spec: GridSpec) -> np.ndarray:
        if self.center is None:
            return np.full(3, spec.extent / 2.0)
        return np.asarray(self.center, dtype=float)

    def stern_point(self, spec: GridSpec) -> np.ndarray:
        c = self.resolved_center(spec)
        h = math.radians(self.heading)
        return c + (self.length / 2.0) * np.array([math.cos(h), math.sin(h), 0.0])

    def bay_center(self, spec: GridSpec) -> np.ndarray:
        c = self.resolved_center(spec)
        return c + np.array([0.0, 0.0, -self.height / 2.0 + self.bay_height / 2.0])


@dataclass(frozen=True)
class WakeShapeParams:
    """Shape of the synthetic propeller-jet wake behind the hull stern.

    The wake is an axisymmetric jet: peak ``k_peak * flow_speed`` on the
    centerline at the stern, Gaussian radial profile of width
    ``core_radius + spread_rate * s`` and power-law axial decay
    ``(1 + s / axial_scale)^-decay_exponent`` at axial distance ``s``.
    Parameters must decay the excess below 1% of freestream by
    ``wake_length`` meters downstream.
    """

    k_peak: float = 2.0
    core_radius: float = 6.0
    spread_rate: float = 0.12
    axial_scale: float = 6.0
    decay_exponent: float = 2.0
    wake_length: float = 60.0

    def __post_init__(self):
        if self.k_peak <= 1.0:
            raise ConfigurationError("k_peak must exceed 1.0")
        for name in ("core_radius", "spread_rate", "axial_scale",
                     "decay_exponent", "wake_length"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        tail = (self.k_peak - 1.0) * self.axial_factor(self.wake_length)
        if tail > 0.01:
            raise ConfigurationError(
                f"wake excess at wake_length is {tail:.4f} of freestream; "
                "must be <= 0.01 (lengthen decay or shorten wake_length)"
            )

    def axial_factor(self, s) -> np.ndarray:
        return (1.0 + np.asarray(s, dtype=float) / self.axial_scale) ** (
            -self.decay_exponent
        )

    def sigma(self, s) -> np.ndarray:
        return self.core_radius + self.spread_rate * np.asarray(s, dtype=float)


@dataclass(frozen=True)
class FlowField:
    """Dense voxel field of fluid speed magnitude plus occupancy."""

    spec: GridSpec
    speed: np.ndarray
    occupied: np.ndarray
    scenario: ScenarioParams

    def __post_init__(self):
        speed = np.ascontiguousarray(self.speed, dtype=np.float64)
        occupied = np.ascontiguousarray(self.occupied, dtype=bool)
        if speed.shape != self.spec.shape or occupied.shape != self.spec.shape:
            raise ConfigurationError(
                f"arrays must have shape {self.spec.shape}, got "
                f"{speed.shape} and {occupied.shape}"
            )
        if not np.all(np.isfinite(speed)) or np.any(speed < 0):
            raise ConfigurationError("speeds must be finite and non-negative")
        speed.setflags(write=False)
        occupied.setflags(write=False)
        object.__setattr__(self, "speed", speed)
        object.__setattr__(self, "occupied", occupied)

    @cached_property
    def field_id(self) -> str:
        """Content fingerprint used for stats/metrics provenance checks."""
        crc = zlib.crc32(repr((self.spec, self.scenario)).encode())
        crc = zlib.crc32(self.speed.tobytes(), crc)
        crc = zlib.crc32(self.occupied.tobytes(), crc)
        return f"{crc:08x}"

    @property
    def free_speeds(self) -> np.ndarray:
        return self.speed[~self.occupied]

    def is_free(self, node) -> bool:
        return self.spec.contains(node) and not bool(self.occupied[tuple(node)])


@dataclass(frozen=True)
class FieldStats:
    """Summary statistics of the non-occupied nodes of one field."""

    median_speed: float
    std_speed: float
    mean_speed: float
    mean_energy_rate: float
    min_speed: float
    max_speed: float
    field_id: str


def _node_coords(spec: GridSpec):
    x = spec.axis_coords(0)[:, None, None]
    y = spec.axis_coords(1)[None, :, None]
    z = spec.axis_coords(2)[None, None, :]
    return x, y, z


def _hull_frame(spec: GridSpec, hull: HullModel):
    """Node offsets from the hull center, rotated into the hull frame."""
    cx, cy, cz = hull.resolved_center(spec)
    x, y, z = _node_coords(spec)
    dx = x - cx
    dy = y - cy
    dz = z - cz
    h = math.radians(hull.heading)
    if hull.heading != 0.0:
        hx = math.cos(h) * dx + math.sin(h) * dy
        hy = -math.sin(h) * dx + math.cos(h) * dy
    else:
        hx, hy = dx, dy
    return np.broadcast_arrays(hx, hy, dz)


def hull_occupancy(spec: GridSpec, hull: HullModel) -> np.ndarray:
    """Boolean mask of nodes inside the hull box but outside the bay void."""
    hx, hy, hz = _hull_frame(spec, hull)
    in_hull = (
        (np.abs(hx) <= hull.length / 2)
        & (np.abs(hy) <= hull.width / 2)
        & (np.abs(hz) <= hull.height / 2)
    )
    in_bay = (
        (np.abs(hx) <= hull.bay_length / 2)
        & (np.abs(hy) <= hull.bay_width / 2)
        & (hz >= -hull.height / 2)
        & (hz <= -hull.height / 2 + hull.bay_height)
    )
    return in_hull & ~in_bay


def bay_shell_mask(spec: GridSpec, hull: HullModel) -> np.ndarray:
    """One-node-thick layer just below the bay opening (outside the hull)."""
    hx, hy, hz = _hull_frame(spec, hull)
    return (
        (np.abs(hx) <= hull.bay_length / 2)
        & (np.abs(hy) <= hull.bay_width / 2)
        & (hz < -hull.height / 2)
        & (hz >= -hull.height / 2 - spec.spacing)
    )


def goal_node(spec: GridSpec, hull: HullModel) -> GridNode:
    """Grid node nearest the payload-bay center (the recovery goal)."""
    node = spec.nearest_node(hull.bay_center(spec))
    if hull_occupancy(spec, hull)[tuple(node)]:
        raise GeometryError(
            "bay-center node is occupied; the bay void is unresolved at "
            f"spacing {spec.spacing:.3f} m"
        )
    return node


def _check_hull_fits(spec: GridSpec, hull: HullModel):
    c = hull.resolved_center(spec)
    # circumscribed radius in the horizontal plane covers any heading
    r_xy = math.hypot(hull.length / 2, hull.width / 2)
    half = np.array([r_xy, r_xy, hull.height / 2])
    margin = spec.spacing
    lo = c - half
    hi = c + half
    if np.any(lo < margin) or np.any(hi > spec.extent - margin):
        raise GeometryError(
            "hull does not fit inside the domain with a one-node margin"
        )


def make_uniform_field(spec: GridSpec, scenario: ScenarioParams) -> FlowField:
    """Obstacle-free field with every node at the freestream speed."""
    speed = np.full(spec.shape, scenario.flow_speed, dtype=np.float64)
    occupied = np.zeros(spec.shape, dtype=bool)
    return FlowField(spec, speed, occupied, scenario)


def make_wake_field(
    spec: GridSpec,
    scenario: ScenarioParams,
    hull: HullModel = HullModel(),
    wake: WakeShapeParams = WakeShapeParams(),
) -> FlowField:
    """Freestream background plus a decaying jet wake behind the hull stern.

    The jet centerline starts at the stern and points downstream (+x),
    rotated by the scenario's flow angle about the vertical axis. Nodes in
    the one-node shell under the bay opening get half the local speed to
    stand in for the boundary-layer transition into the bay. Occupancy
    comes from the hull geometry; occupied nodes carry speed 0.

    Raises GeometryError if the hull does not fit with a one-node margin.
    """
    _check_hull_fits(spec, hull)
    v0 = scenario.flow_speed
    stern = hull.stern_point(spec)
    a = math.radians(scenario.flow_angle)
    axis = np.array([math.cos(a), math.sin(a), 0.0])

    x, y, z = _node_coords(spec)
    dx = x - stern[0]
    dy = y - stern[1]
    dz = z - stern[2]
    s = dx * axis[0] + dy * axis[1] + dz * axis[2]
    r2 = (
        (dx - s * axis[0]) ** 2
        + (dy - s * axis[1]) ** 2
        + (dz - s * axis[2]) ** 2
    )
    s_pos = np.maximum(s, 0.0)
    sigma = wake.sigma(s_pos)
    excess = (
        (wake.k_peak - 1.0)
        * wake.axial_factor(s_pos)
        * np.exp(-r2 / (2.0 * sigma * sigma))
    )
    speed = v0 * (1.0 + np.where(s >= 0.0, excess, 0.0))

    speed[bay_shell_mask(spec, hull)] *= 0.5
    occupied = hull_occupancy(spec, hull)
    speed[occupied] = 0.0
    return FlowField(spec, speed, occupied, scenario)


def strip_wake(f: FlowField) -> FlowField:
    """Replace every non-occupied speed with the freestream scenario speed.

    Occupancy is preserved; occupied nodes keep speed 0. Idempotent.
    """
    speed = np.where(f.occupied, 0.0, f.scenario.flow_speed)
    return FlowField(f.spec, speed, f.occupied.copy(), f.scenario)


def field_stats(f: FlowField, cfg: PlannerConfig = PlannerConfig()) -> FieldStats:
    """Median / std / mean speed and mean energy rate over free nodes.

    Standard deviation is the population value: the grid is the whole
    population of cells, not a sample.
    """
    free = f.free_speeds
    if free.size == 0:
        raise EmptyFieldError("field has no non-occupied nodes")
    return FieldStats(
        median_speed=float(np.median(free)),
        std_speed=float(np.std(free)),
        mean_speed=float(np.mean(free)),
        mean_energy_rate=float(np.mean(energy_rate(free, cfg))),
        min_speed=float(np.min(free)),
        max_speed=float(np.max(free)),
        field_id=f.field_id,
    )


def with_scenario(f: FlowField, scenario: ScenarioParams) -> FlowField:
    """Copy of the field tagged with a different scenario."""
    return FlowField(f.spec, f.speed.copy(), f.occupied.copy(), scenario)
