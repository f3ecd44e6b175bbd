"""Energy-cost A* over the 26-connected grid, plus a Dijkstra oracle.

The edge weight from n to n' is the drag energy omega1 * F_D(v(n')) *
d(n, n'), evaluating drag at the destination node. Two planner variants
share the search: the current-informed variant first strips the wake
(uniform freestream everywhere), the wake-informed variant searches the
field as given.

Neighbor policy: all 26 face/edge/corner moves whose destination is in
bounds and non-occupied, except that a diagonal move is blocked unless
every single-axis intermediate node is also free (no cutting corners
through occupied face-neighbors).
"""

from dataclasses import dataclass
from heapq import heappop, heappush
import math
import time

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .costs import PlannerConfig, energy_rate
from .errors import BlockedEdgeError, NoPathError, ProvenanceError
from .fields import (
    FieldStats,
    FlowField,
    GridNode,
    field_stats,
    strip_wake,
)

# (dx, dy, dz, index-step scale, single-axis intermediate offsets)
_NEIGHBORS = []
for _dx in (-1, 0, 1):
    for _dy in (-1, 0, 1):
        for _dz in (-1, 0, 1):
            if _dx == _dy == _dz == 0:
                continue
            _inter = tuple(
                off
                for off in ((_dx, 0, 0), (0, _dy, 0), (0, 0, _dz))
                if any(off)
            )
            if len(_inter) == 1:
                _inter = ()  # face move: nothing to cut through
            _NEIGHBORS.append(
                (_dx, _dy, _dz, math.sqrt(_dx * _dx + _dy * _dy + _dz * _dz), _inter)
            )
_NEIGHBORS = tuple(_NEIGHBORS)


@dataclass(frozen=True)
class Path:
    """Ordered node sequence with enough provenance to recompute metrics."""

    nodes: tuple
    spacing: float
    scenario: object = None
    variant: str = ""

    def __len__(self):
        return len(self.nodes)

    @property
    def waypoints(self) -> np.ndarray:
        """Physical coordinates of the nodes, shape (N, 3), meters."""
        return np.asarray(self.nodes, dtype=float) * self.spacing

    def validate(self, field: FlowField):
        """Check the planner-path invariants against a field.

        Every node in bounds and non-occupied, no repeated nodes, and
        consecutive nodes exactly one Chebyshev step apart.
        """
        seen = set()
        prev = None
        for node in self.nodes:
            if not field.spec.contains(node):
                raise ValueError(f"node {node} outside grid bounds")
            if field.occupied[tuple(node)]:
                raise ValueError(f"node {node} is occupied")
            if node in seen:
                raise ValueError(f"node {node} repeats")
            seen.add(node)
            if prev is not None:
                cheb = max(abs(a - b) for a, b in zip(prev, node))
                if cheb != 1:
                    raise ValueError(f"nodes {prev} -> {node} are not 26-neighbors")
            prev = node


@dataclass(frozen=True)
class SearchResult:
    path: Path
    g_total: float
    expanded: int
    wall_time: float


def euclid(a, b, spacing: float) -> float:
    """Physical Euclidean distance between two grid nodes, meters."""
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return spacing * math.sqrt(dx * dx + dy * dy + dz * dz)


def edge_cost(n, n2, field: FlowField, cfg: PlannerConfig) -> float:
    """Drag energy (J) to move from n to its 26-neighbor n2."""
    cheb = max(abs(a - b) for a, b in zip(n, n2))
    if cheb != 1:
        raise ValueError(f"{n} and {n2} are not 26-neighbors")
    if field.occupied[tuple(n2)]:
        raise BlockedEdgeError(f"destination node {n2} is occupied")
    v = float(field.speed[tuple(n2)])
    return energy_rate(v, cfg) * euclid(n, n2, field.spec.spacing)


def path_g(path: Path, field: FlowField, cfg: PlannerConfig) -> float:
    """Independent edge-cost summation along a path (J)."""
    return sum(
        edge_cost(a, b, field, cfg) for a, b in zip(path.nodes, path.nodes[1:])
    )


def _heuristic_rate(stats: FieldStats, cfg: PlannerConfig) -> float:
    if cfg.heuristic_mode == "paper_average":
        return stats.mean_energy_rate
    if cfg.heuristic_mode == "admissible_min":
        # F_D is monotone in v, so the field minimum rate sits at min speed
        return energy_rate(stats.min_speed, cfg)
    return 0.0


def heuristic(n, goal, stats: FieldStats, cfg: PlannerConfig, spacing: float) -> float:
    """Estimated remaining cost (J) from n to goal; 0 at the goal."""
    return _heuristic_rate(stats, cfg) * euclid(n, goal, spacing)


def _search_field(field: FlowField, cfg: PlannerConfig) -> FlowField:
    if cfg.variant == "current_informed":
        return strip_wake(field)
    return field


def _check_endpoints(field: FlowField, start, goal):
    for name, node in (("start", start), ("goal", goal)):
        if not field.spec.contains(node):
            raise ValueError(f"{name} node {tuple(node)} outside grid bounds")
        if field.occupied[tuple(node)]:
            raise ValueError(f"{name} node {tuple(node)} is occupied")


def astar(
    field: FlowField,
    start,
    goal,
    cfg: PlannerConfig = PlannerConfig(),
    stats: FieldStats = None,
) -> SearchResult:
    """Plan a minimum-drag-energy path from start to goal.

    Ties on f are broken by smaller h, then lexicographic (ix, iy, iz),
    so results are deterministic. Nodes are re-expanded whenever a
    cheaper g is found, which keeps the search correct even when the
    paper_average heuristic overestimates; with admissible_min (which is
    consistent) no re-expansion ever happens and the returned cost is
    the true minimum.

    Raises NoPathError (carrying the expansion count) when the goal is
    unreachable.
    """
    t0 = time.perf_counter()
    sfield = _search_field(field, cfg)
    _check_endpoints(sfield, start, goal)
    if stats is None:
        stats = field_stats(sfield, cfg)
    elif stats.field_id != sfield.field_id:
        raise ProvenanceError("stats were computed on a different field")

    start = GridNode(*start)
    goal = GridNode(*goal)
    spec = sfield.spec
    nx, ny, nz = spec.shape
    spacing = spec.spacing
    if start == goal:
        path = Path((start,), spacing, field.scenario, cfg.variant)
        return SearchResult(path, 0.0, 0, time.perf_counter() - t0)

    # flat python containers index noticeably faster than numpy scalars here
    cost_pm = energy_rate(sfield.speed, cfg).ravel().tolist()
    occ = sfield.occupied.ravel().astype(np.uint8).tobytes()
    n_nodes = spec.n_nodes
    g = [math.inf] * n_nodes
    parent = [-1] * n_nodes

    rate_s = _heuristic_rate(stats, cfg) * spacing
    gx, gy, gz = goal
    sx, sy, sz = start
    sqrt = math.sqrt

    sidx = (sx * ny + sy) * nz + sz
    gidx = (gx * ny + gy) * nz + gz
    g[sidx] = 0.0
    h0 = rate_s * sqrt((sx - gx) ** 2 + (sy - gy) ** 2 + (sz - gz) ** 2)
    heap = [(h0, h0, sx, sy, sz, 0.0)]
    expanded = 0
    found = False

    while heap:
        f, h, ix, iy, iz, ge = heappop(heap)
        idx = (ix * ny + iy) * nz + iz
        if ge > g[idx]:
            continue  # stale entry superseded by a cheaper push
        if idx == gidx:
            found = True
            break
        expanded += 1
        for dx, dy, dz, scale, inter in _NEIGHBORS:
            jx = ix + dx
            jy = iy + dy
            jz = iz + dz
            if not (0 <= jx < nx and 0 <= jy < ny and 0 <= jz < nz):
                continue
            jdx = (jx * ny + jy) * nz + jz
            if occ[jdx]:
                continue
            if inter:
                blocked = False
                for ax, ay, az in inter:
                    if occ[((ix + ax) * ny + (iy + ay)) * nz + (iz + az)]:
                        blocked = True
                        break
                if blocked:
                    continue
            ng = ge + cost_pm[jdx] * scale * spacing
            if ng < g[jdx]:
                g[jdx] = ng
                parent[jdx] = idx
                nh = rate_s * sqrt(
                    (jx - gx) ** 2 + (jy - gy) ** 2 + (jz - gz) ** 2
                )
                heappush(heap, (ng + nh, nh, jx, jy, jz, ng))

    if not found:
        raise NoPathError(
            f"goal {tuple(goal)} unreachable from {tuple(start)}", expanded=expanded
        )

    rev = []
    idx = gidx
    while idx != -1:
        iz = idx % nz
        iy = (idx // nz) % ny
        ix = idx // (ny * nz)
        rev.append(GridNode(ix, iy, iz))
        idx = parent[idx]
    rev.reverse()
    path = Path(tuple(rev), spacing, field.scenario, cfg.variant)
    return SearchResult(path, g[gidx], expanded, time.perf_counter() - t0)


def _edge_arrays(field: FlowField, cfg: PlannerConfig):
    """Vectorized directed edge list honoring the corner-cutting rule."""
    spec = field.spec
    nx, ny, nz = spec.shape
    occ = field.occupied
    free = ~occ
    cost_pm = energy_rate(field.speed, cfg)
    ids = np.arange(spec.n_nodes).reshape(spec.shape)
    rows, cols, weights = [], [], []

    def ax_slices(d, n):
        return slice(max(0, -d), n - max(0, d)), slice(max(0, d), n - max(0, -d))

    for dx, dy, dz, scale, inter in _NEIGHBORS:
        (sx, tx) = ax_slices(dx, nx)
        (sy, ty) = ax_slices(dy, ny)
        (sz, tz) = ax_slices(dz, nz)
        src = (sx, sy, sz)
        dst = (tx, ty, tz)
        valid = free[src] & free[dst]
        for ax, ay, az in inter:
            mid = (tx if ax else sx, ty if ay else sy, tz if az else sz)
            valid = valid & free[mid]
        rows.append(ids[src][valid])
        cols.append(ids[dst][valid])
        weights.append(cost_pm[dst][valid] * (scale * spec.spacing))
    return (
        np.concatenate(rows),
        np.concatenate(cols),
        np.concatenate(weights),
    )


def edge_graph(field: FlowField, cfg: PlannerConfig) -> csr_matrix:
    """Sparse directed graph of all traversable edges and their costs."""
    rows, cols, weights = _edge_arrays(field, cfg)
    n = field.spec.n_nodes
    return csr_matrix((weights, (rows, cols)), shape=(n, n))


def dijkstra_oracle(
    field: FlowField,
    start,
    goal,
    cfg: PlannerConfig = PlannerConfig(),
) -> SearchResult:
    """Exact shortest path via scipy's Dijkstra; the verification oracle.

    Same contract as astar with a zero heuristic. The reported
    ``expanded`` is the number of nodes the sweep reached (settled to a
    finite distance), which is what a full Dijkstra pass expands.
    """
    t0 = time.perf_counter()
    sfield = _search_field(field, cfg)
    _check_endpoints(sfield, start, goal)
    start = GridNode(*start)
    goal = GridNode(*goal)
    spec = sfield.spec
    if start == goal:
        path = Path((start,), spec.spacing, field.scenario, cfg.variant)
        return SearchResult(path, 0.0, 0, time.perf_counter() - t0)

    _, _, nz = spec.shape
    ny = spec.shape[1]
    sidx = (start[0] * ny + start[1]) * nz + start[2]
    gidx = (goal[0] * ny + goal[1]) * nz + goal[2]
    graph = edge_graph(sfield, cfg)
    dist, pred = _csgraph_dijkstra(
        graph, directed=True, indices=sidx, return_predecessors=True
    )
    reached = int(np.isfinite(dist).sum())
    if not np.isfinite(dist[gidx]):
        raise NoPathError(
            f"goal {tuple(goal)} unreachable from {tuple(start)}", expanded=reached
        )

    rev = []
    idx = gidx
    while idx != -9999 and idx >= 0:
        iz = idx % nz
        iy = (idx // nz) % ny
        ix = idx // (ny * nz)
        rev.append(GridNode(ix, iy, iz))
        idx = int(pred[idx])
    rev.reverse()
    path = Path(tuple(rev), spec.spacing, field.scenario, cfg.variant)
    return SearchResult(
        path, float(dist[gidx]), reached, time.perf_counter() - t0
    )


def cost_to_goal_map(field: FlowField, goal, cfg: PlannerConfig) -> np.ndarray:
    """Exact minimum cost from every node to the goal (reverse Dijkstra).

    Edge costs are asymmetric (drag is evaluated at the destination), so
    this runs Dijkstra from the goal over the transposed graph. Returns a
    flat array of length n_nodes with inf where the goal is unreachable.
    """
    sfield = _search_field(field, cfg)
    _check_endpoints(sfield, goal, goal)
    spec = sfield.spec
    gidx = (goal[0] * spec.shape[1] + goal[1]) * spec.shape[2] + goal[2]
    graph = edge_graph(sfield, cfg).T.tocsr()
    dist = _csgraph_dijkstra(graph, directed=True, indices=gidx)
    return dist
