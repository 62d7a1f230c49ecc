"""Artificial-potential-field local planner.

Produces each robot's desired velocity as the sum of three parts: constant
attraction toward the robot's slot in the goal formation (with a linear ramp
inside a switch distance so it vanishes at the goal), repulsion from the
single nearest obstacle, and repulsion from and the single nearest other
robot.  Repulsion magnitude is k_rep * (1/d - 1/nu) inside the cutoff
distance nu and zero beyond it, with d the surface distance after clearance
inflation.  These formulas are in velocity units so their outputs add
directly into the desired velocity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

# Lower clamp on the inflated distance: keeps repulsion finite when a robot
# has penetrated an inflated obstacle instead of producing NaN/Inf.
REPULSION_FLOOR = 1e-3


class PenetrationWarning(UserWarning):
    """A robot is inside an inflated obstacle; repulsion uses the floor distance."""


@dataclass(frozen=True, slots=True)
class ApfGains:
    """Gains of the local potential-field planner, all strictly positive.

    k_att: cruise speed toward the goal (m/s)
    rho: switch distance below which attraction ramps linearly to zero (m)
    k_rep: repulsion strength (m/s)
    xi: clearance added to every obstacle/robot surface (m)
    nu: distance beyond which repulsion is zero (m)
    """

    k_att: float = 5.0
    rho: float = 0.1
    k_rep: float = 5.0
    xi: float = 0.25
    nu: float = 1.5

    def __post_init__(self):
        for name in ("k_att", "rho", "k_rep", "xi", "nu"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"APF gain {name} must be finite and > 0, got {v}")


@dataclass(frozen=True, slots=True)
class Obstacle:
    """Circular obstacle."""

    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        cx, cy = float(self.center[0]), float(self.center[1])
        object.__setattr__(self, "center", (cx, cy))
        if not (math.isfinite(self.radius) and self.radius >= 0.0):
            raise ValueError(f"obstacle radius must be finite and >= 0, got {self.radius}")
        if not (math.isfinite(cx) and math.isfinite(cy)):
            raise ValueError("obstacle center must be finite")

    def surface_distance(self, p) -> float:
        return math.hypot(float(p[0]) - self.center[0], float(p[1]) - self.center[1]) - self.radius


def attractive_velocity(p, p_goal, gains: ApfGains) -> np.ndarray:
    """Velocity pulling toward the goal: constant speed k_att outside the
    switch distance, linearly ramped inside it, exactly zero at the goal."""
    dx = float(p_goal[0]) - float(p[0])
    dy = float(p_goal[1]) - float(p[1])
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return np.zeros(2)
    speed = gains.k_att if dist > gains.rho else gains.k_att * dist / gains.rho
    return np.array([speed * dx / dist, speed * dy / dist])


def repulsive_velocity(surface_distance: float, away_direction, gains: ApfGains) -> np.ndarray:
    """Velocity pushing away from the nearest surface.

    `surface_distance` is the raw distance to the surface; the clearance
    `xi` is subtracted here.  Zero at or beyond the cutoff `nu`; otherwise
    magnitude k_rep * (1/d - 1/nu) along `away_direction`.  A non-positive
    inflated distance flags :class:`PenetrationWarning` and clamps to the
    floor instead of blowing up.
    """
    d = float(surface_distance) - gains.xi
    if d <= 0.0:
        warnings.warn(
            f"inflated surface distance {d:.4f} m <= 0; clamping to {REPULSION_FLOOR}",
            PenetrationWarning,
            stacklevel=2,
        )
        d = REPULSION_FLOOR
    elif d < REPULSION_FLOOR:
        d = REPULSION_FLOOR
    if d >= gains.nu:
        return np.zeros(2)
    mag = gains.k_rep * (1.0 / d - 1.0 / gains.nu)
    return np.array([mag * float(away_direction[0]), mag * float(away_direction[1])])


def _away_direction(p, source) -> tuple[float, float]:
    dx = float(p[0]) - float(source[0])
    dy = float(p[1]) - float(source[1])
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        # Coincident points give no direction; pick a fixed one so the
        # output stays deterministic.
        return (1.0, 0.0)
    return (dx / norm, dy / norm)


def desired_velocity(p, p_goal, obstacles, other_robots, gains: ApfGains) -> np.ndarray:
    """Sum of goal attraction and repulsion from the nearest obstacle and
    the nearest other robot.

    Only the single closest obstacle and the single closest robot
    contribute; ties break toward the lowest index.
    """
    px, py = float(p[0]), float(p[1])
    v = attractive_velocity((px, py), p_goal, gains)

    nearest_obs = None
    nearest_obs_dist = math.inf
    for obs in obstacles:
        cx, cy = obs.center
        d = math.hypot(px - cx, py - cy) - obs.radius
        if d < nearest_obs_dist:
            nearest_obs_dist = d
            nearest_obs = obs
    if nearest_obs is not None:
        v = v + repulsive_velocity(
            nearest_obs_dist, _away_direction((px, py), nearest_obs.center), gains
        )

    nearest_robot = None
    nearest_robot_dist = math.inf
    for other in other_robots:
        d = math.hypot(px - other[0], py - other[1])
        if d < nearest_robot_dist:
            nearest_robot_dist = d
            nearest_robot = other
    if nearest_robot is not None:
        v = v + repulsive_velocity(
            nearest_robot_dist, _away_direction((px, py), nearest_robot), gains
        )
    return v
