"""Path-quality metrics: energy, length, high-velocity and turbulent counts.

All metrics are computed against the field the path is *assessed* in,
which for comparative runs is always the full wake-bearing field, no
matter which planner produced the path. The functions accept any node
sequence whose nodes are in bounds and non-occupied; they do not require
26-neighbor steps, so snapped network-predicted paths can be scored with
the same code.
"""

from dataclasses import dataclass

import numpy as np

from .costs import PlannerConfig, drag_force
from .errors import ProvenanceError
from .fields import FieldStats, FlowField, field_stats
from .planner import Path, euclid


@dataclass(frozen=True)
class MetricsConfig:
    """Threshold for counting a node-to-node speed change as turbulent."""

    epsilon: float = 0.005
    delta_floor: float = 1e-12

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class PathMetrics:
    energy: float
    length: float
    n_high_velocity: int
    n_turbulent: int
    eval_field_id: str


def _path_speeds(path: Path, field: FlowField) -> np.ndarray:
    speeds = np.empty(len(path.nodes))
    for i, node in enumerate(path.nodes):
        if not field.spec.contains(node):
            raise ValueError(f"path node {node} outside field bounds")
        if field.occupied[tuple(node)]:
            raise ValueError(f"path node {node} is occupied")
        speeds[i] = field.speed[tuple(node)]
    return speeds


def high_velocity_count(path: Path, field: FlowField, stats: FieldStats) -> int:
    """Nodes at or above the median + one-standard-deviation threshold.

    The comparison is inclusive, so on a zero-variance field every node
    counts; that edge case is the documented consequence of the
    threshold definition, not a bug.
    """
    if stats.field_id != field.field_id:
        raise ProvenanceError("stats were computed on a different field")
    threshold = stats.median_speed + stats.std_speed
    return int(np.count_nonzero(_path_speeds(path, field) >= threshold))


def turbulent_count(
    path: Path, field: FlowField, cfg: MetricsConfig = MetricsConfig()
) -> int:
    """Nodes whose speed changed by at least epsilon, relative.

    A node i >= 2 counts when |v_i - v_{i-1}| / max(v_{i-1}, floor)
    >= epsilon; the first node never counts.
    """
    v = _path_speeds(path, field)
    if v.size < 2:
        return 0
    prev = np.maximum(v[:-1], cfg.delta_floor)
    rel = np.abs(np.diff(v)) / prev
    return int(np.count_nonzero(rel >= cfg.epsilon))


def path_energy(
    path: Path, field: FlowField, cfg: PlannerConfig = PlannerConfig()
) -> float:
    """Drag energy along the path in joules, destination-node convention.

    Each step contributes F_D(v(n_{i+1})) * d(n_i, n_{i+1}); a
    single-node path costs nothing. For a wake-informed A* path scored
    on the same field with omega1 = 1 this equals the search's g_total.
    """
    v = _path_speeds(path, field)
    total = 0.0
    for i in range(len(path.nodes) - 1):
        d = euclid(path.nodes[i], path.nodes[i + 1], path.spacing)
        total += drag_force(v[i + 1], cfg) * d
    return total


def path_length(path: Path) -> float:
    """Sum of consecutive node distances in meters; field-independent."""
    return sum(
        euclid(a, b, path.spacing) for a, b in zip(path.nodes, path.nodes[1:])
    )


def assess(
    path: Path,
    wake_field: FlowField,
    planner_cfg: PlannerConfig = PlannerConfig(),
    metrics_cfg: MetricsConfig = MetricsConfig(),
    stats: FieldStats = None,
) -> PathMetrics:
    """All four metrics of one path against the wake-bearing field."""
    if stats is None:
        stats = field_stats(wake_field, planner_cfg)
    return PathMetrics(
        energy=path_energy(path, wake_field, planner_cfg),
        length=path_length(path),
        n_high_velocity=high_velocity_count(path, wake_field, stats),
        n_turbulent=turbulent_count(path, wake_field, metrics_cfg),
        eval_field_id=wake_field.field_id,
    )
