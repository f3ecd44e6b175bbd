"""Vehicle drag model and planner configuration.

Edge weights everywhere in the package are drag energy: the force needed
to hold position against the local flow, integrated over the distance
moved. Quadratic drag with fixed coefficients is used; the vehicle's own
speed is not composed with the fluid speed.
"""

from dataclasses import dataclass

import numpy as np

# GRAALTech X300 drag constants and seawater density.
DEFAULT_RHO = 1025.1627  # kg/m^3
DEFAULT_CD = 0.15
DEFAULT_AREA = 0.051  # m^2

HEURISTIC_MODES = ("paper_average", "admissible_min", "zero")
VARIANTS = ("current_informed", "wake_informed")


@dataclass(frozen=True)
class PlannerConfig:
    """Drag constants, cost weight, and search behaviour.

    heuristic_mode:
        paper_average  - remaining cost estimated from the field-mean
                         energy rate (can overestimate on slow corridors).
        admissible_min - remaining cost from the field-minimum energy
                         rate; never overestimates, so searches are optimal.
        zero           - plain Dijkstra ordering.
    variant:
        current_informed searches the wake-stripped field,
        wake_informed searches the field as given.
    """

    rho: float = DEFAULT_RHO
    c_d: float = DEFAULT_CD
    area: float = DEFAULT_AREA
    omega1: float = 1.0
    heuristic_mode: str = "paper_average"
    variant: str = "wake_informed"

    def __post_init__(self):
        if self.rho <= 0 or self.area <= 0 or self.c_d <= 0 or self.omega1 <= 0:
            raise ValueError("rho, c_d, area, and omega1 must all be positive")
        if self.heuristic_mode not in HEURISTIC_MODES:
            raise ValueError(f"unknown heuristic_mode {self.heuristic_mode!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


def drag_force(v, cfg: PlannerConfig = PlannerConfig()):
    """Drag force in newtons at relative flow speed ``v`` (m/s).

    Accepts a scalar or ndarray; negative speeds are a domain error.
    """
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("flow speed must be non-negative")
    out = 0.5 * cfg.rho * arr * arr * cfg.c_d * cfg.area
    if np.isscalar(v) or arr.ndim == 0:
        return float(out)
    return out


def energy_rate(v, cfg: PlannerConfig = PlannerConfig()):
    """Weighted drag omega1 * F_D(v): energy per meter moved, in N (J/m)."""
    out = drag_force(v, cfg)
    if isinstance(out, float):
        return cfg.omega1 * out
    return cfg.omega1 * out
