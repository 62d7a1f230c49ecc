"""Closed-loop multi-robot simulation.

Each synchronous tick: rebuild the communication graph from true positions,
exchange parameter vectors between neighbours, run every robot's local
potential-field planner and formation planner, then integrate the
single-integrator dynamics with explicit Euler.  Robot ticks between two
barriers depend only on barrier-time data, so the loop is equivalent to a
parallel execution with a per-tick synchronization barrier.

Runs are deterministic: all randomness comes from one seed, split into one
independent stream per robot (numpy SeedSequence spawning), and is used
only for the initial-position perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .apf import ApfGains, Obstacle, desired_velocity
from .constraints import ConstraintSpec, soft_set_distance
from .network import build_graph, exchange
from .planner import NonFiniteInputError, PlannerGains, PlannerState, plan_tick
from .transform import (
    BaseConfiguration,
    FormationParams,
    apply_transform,
    apply_transform_many,
)

# Tolerance used when counting hard-set violations in the metrics.
HARD_VIOLATION_TOL = 1e-6


@dataclass(frozen=True)
class Scenario:
    """Complete description of one experiment.

    `gains` is either one PlannerGains shared by all robots or a tuple with
    one entry per robot.  `init_noise_sigma` is the standard deviation (in
    meters, per axis) of the Gaussian perturbation applied to the initial
    positions; zero disables it.
    """

    base: BaseConfiguration
    eta_goal: FormationParams
    eta_init: FormationParams = field(default_factory=FormationParams.identity)
    obstacles: tuple[Obstacle, ...] = ()
    gains: PlannerGains | tuple[PlannerGains, ...] = PlannerGains(32.0, 20.0, 2.0)
    apf: ApfGains = ApfGains()
    constraints: ConstraintSpec = ConstraintSpec()
    r_c: float = 10.0
    r_d: float = 10.0
    dt: float = 1e-3
    t_final: float = 9.0
    init_noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")
        if not (math.isfinite(self.t_final) and self.t_final >= self.dt):
            raise ValueError(f"t_final must be >= dt, got {self.t_final}")
        if not self.r_c > 0.0:
            raise ValueError(f"r_c must be > 0, got {self.r_c}")
        if not 0.0 < self.r_d <= self.r_c:
            raise ValueError(f"r_d must satisfy 0 < r_d <= r_c, got {self.r_d}")
        if not (math.isfinite(self.init_noise_sigma) and self.init_noise_sigma >= 0.0):
            raise ValueError("init_noise_sigma must be finite and >= 0")
        if isinstance(self.gains, tuple) and len(self.gains) != len(self.base):
            raise ValueError(
                f"per-robot gains need one entry per robot "
                f"({len(self.gains)} given for {len(self.base)} robots)"
            )
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @property
    def n_robots(self) -> int:
        return len(self.base)

    @property
    def n_ticks(self) -> int:
        # ceil with a guard against .../dt landing one ulp above an integer
        return int(math.ceil(self.t_final / self.dt - 1e-9))

    def gains_for(self, i: int) -> PlannerGains:
        if isinstance(self.gains, tuple):
            return self.gains[i]
        return self.gains

    def with_gains(self, **kwargs) -> "Scenario":
        """Copy of the scenario with gain fields (lam, mu, k_fb) replaced on
        every robot."""
        if isinstance(self.gains, tuple):
            new = tuple(replace(g, **kwargs) for g in self.gains)
        else:
            new = replace(self.gains, **kwargs)
        return replace(self, gains=new)


@dataclass(frozen=True, eq=False)
class TrajectoryLog:
    """Per-tick, per-robot trajectory records as dense arrays.

    Row (k, i) holds robot i's state at the start of tick k together with
    the command computed during that tick: position, commanded velocity,
    the parameter vector the tick ran on, the applied derivative scale
    `a_s`, and the neighbour count.
    """

    times: np.ndarray          # (T,)
    positions: np.ndarray      # (T, N, 2)
    velocities: np.ndarray     # (T, N, 2)
    etas: np.ndarray           # (T, N, 5)
    a_s: np.ndarray            # (T, N)
    neighbor_counts: np.ndarray  # (T, N)

    def __post_init__(self):
        t = len(self.times)
        n = self.positions.shape[1] if self.positions.ndim == 3 else 0
        expect = {
            "positions": (t, n, 2),
            "velocities": (t, n, 2),
            "etas": (t, n, 5),
            "a_s": (t, n),
            "neighbor_counts": (t, n),
        }
        for name, shape in expect.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"log field {name} has shape "
                                 f"{getattr(self, name).shape}, expected {shape}")
        if t > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("log times must be strictly increasing")

    @property
    def n_ticks(self) -> int:
        return len(self.times)

    @property
    def n_robots(self) -> int:
        return self.positions.shape[1]

    def identical(self, other: "TrajectoryLog") -> bool:
        """Bitwise equality of every record."""
        return (
            np.array_equal(self.times, other.times)
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.velocities, other.velocities)
            and np.array_equal(self.etas, other.etas)
            and np.array_equal(self.a_s, other.a_s)
            and np.array_equal(self.neighbor_counts, other.neighbor_counts)
        )


@dataclass(frozen=True, eq=False)
class RunMetrics:
    """Quantitative summary of one run.

    The first three fields are per-tick series; the rest are run-level
    scalars.  `hard_violation_count` counts ticks on which any robot's
    scaling left the hard set beyond tolerance — it must be zero in every
    passing run.
    """

    times: np.ndarray
    formation_error: np.ndarray    # per-tick max over robots, meters
    disagreement: np.ndarray       # per-tick max componentwise parameter spread
    soft_set_distance: np.ndarray  # per-tick max distance of s to the soft set
    min_robot_distance: float
    min_obstacle_clearance: float
    hard_violation_count: int
    goal_param_error: float

    def time_avg_disagreement(self) -> float:
        return float(np.mean(self.disagreement))

    def time_avg_soft_distance(self) -> float:
        return float(np.mean(self.soft_set_distance))

    def final_formation_error(self) -> float:
        return float(self.formation_error[-1])

    def max_formation_error(self) -> float:
        return float(np.max(self.formation_error))

    def summary(self) -> dict:
        return {
            "ticks": int(len(self.times)),
            "formation_error_final": self.final_formation_error(),
            "formation_error_max": self.max_formation_error(),
            "disagreement_mean": self.time_avg_disagreement(),
            "disagreement_final": float(self.disagreement[-1]),
            "soft_set_distance_mean": self.time_avg_soft_distance(),
            "min_robot_distance": self.min_robot_distance,
            "min_obstacle_clearance": self.min_obstacle_clearance,
            "hard_violation_count": self.hard_violation_count,
            "goal_param_error": self.goal_param_error,
        }


def step_world(positions, velocities, dt: float) -> np.ndarray:
    """Explicit Euler step of the single-integrator dynamics: p + dt * v."""
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    return np.asarray(positions, dtype=float) + dt * np.asarray(velocities, dtype=float)


def initial_positions(scenario: Scenario) -> np.ndarray:
    """Slot positions under the initial parameters, plus seeded Gaussian noise.

    The scenario seed is split with numpy's SeedSequence into one child
    stream per robot, so per-robot noise draws are independent of robot
    count ordering and reproduce exactly for a given seed.
    """
    pts = np.array(
        [apply_transform(scenario.eta_init, c) for c in scenario.base.slots]
    )
    if scenario.init_noise_sigma > 0.0:
        streams = np.random.SeedSequence(scenario.rng_seed).spawn(len(pts))
        for i, ss in enumerate(streams):
            gen = np.random.Generator(np.random.PCG64(ss))
            pts[i] += gen.normal(0.0, scenario.init_noise_sigma, 2)
    return pts


def run(scenario: Scenario) -> tuple[TrajectoryLog, RunMetrics]:
    """Simulate the full closed loop over the scenario horizon.

    Aborts with :class:`NonFiniteInputError` carrying the robot id and time
    if any robot's planner receives a non-finite input.
    """
    n = scenario.n_robots
    n_ticks = scenario.n_ticks
    dt = scenario.dt
    slots = scenario.base.slots
    goal_slots = [apply_transform(scenario.eta_goal, c) for c in slots]
    obstacles = scenario.obstacles
    apf = scenario.apf

    positions = initial_positions(scenario)
    states = [
        PlannerState(
            eta=scenario.eta_init,
            slot=slots[i],
            gains=scenario.gains_for(i),
            constraints=scenario.constraints,
        )
        for i in range(n)
    ]

    times = np.arange(n_ticks) * dt
    log_pos = np.empty((n_ticks, n, 2))
    log_vel = np.empty((n_ticks, n, 2))
    log_eta = np.empty((n_ticks, n, 5))
    log_a_s = np.empty((n_ticks, n))
    log_nbrs = np.empty((n_ticks, n), dtype=np.int64)

    velocities = np.empty((n, 2))
    others_idx = [np.flatnonzero(np.arange(n) != i) for i in range(n)]
    for k in range(n_ticks):
        graph = build_graph(positions, scenario.r_c, scenario.r_d)
        received = exchange(graph, [st.eta for st in states])
        next_etas: list[FormationParams] = [None] * n  # type: ignore[list-item]
        for i in range(n):
            p_i = positions[i]
            others = positions[others_idx[i]]
            v_des = desired_velocity(p_i, goal_slots[i], obstacles, others, apf)
            try:
                res = plan_tick(states[i], v_des, received[i], p_i, dt)
            except NonFiniteInputError as exc:
                raise NonFiniteInputError(
                    f"robot {i} at t={times[k]:.6f}s: {exc}"
                ) from exc
            velocities[i] = res.v_cmd
            next_etas[i] = res.eta_next
            eta = states[i].eta
            log_eta[k, i] = (eta.phi, eta.sx, eta.sy, eta.tx, eta.ty)
            log_a_s[k, i] = res.a_s
            log_nbrs[k, i] = len(received[i])
        log_pos[k] = positions
        log_vel[k] = velocities
        positions = step_world(positions, velocities, dt)
        for i in range(n):
            states[i].eta = next_etas[i]

    log = TrajectoryLog(
        times=times,
        positions=log_pos,
        velocities=log_vel,
        etas=log_eta,
        a_s=log_a_s,
        neighbor_counts=log_nbrs,
    )
    return log, compute_metrics(log, scenario)


def compute_metrics(log: TrajectoryLog, scenario: Scenario) -> RunMetrics:
    """Derive the run metrics from a trajectory log. Deterministic."""
    if log.n_ticks == 0:
        raise ValueError("cannot compute metrics from an empty log")
    spec = scenario.constraints
    slots = scenario.base.as_array()

    slot_pos = apply_transform_many(log.etas, slots[None, :, :])
    err = np.linalg.norm(log.positions - slot_pos, axis=-1)
    formation_error = err.max(axis=1)

    spread = log.etas.max(axis=1) - log.etas.min(axis=1)
    disagreement = spread.max(axis=1)

    soft_dist = _soft_distance_series(log.etas, spec)

    min_robot_distance = _min_pairwise_distance(log.positions)
    min_obstacle_clearance = _min_obstacle_clearance(log.positions, scenario.obstacles)

    sx = log.etas[:, :, 1]
    sy = log.etas[:, :, 2]
    tol = HARD_VIOLATION_TOL
    violating = (
        (sx < spec.eps_hard - tol)
        | (sy < spec.eps_hard - tol)
        | (np.hypot(sx, sy) > spec.r_hard + tol)
    )
    hard_violation_count = int(np.count_nonzero(violating.any(axis=1)))

    mean_eta_final = log.etas[-1].mean(axis=0)
    goal_param_error = float(
        np.linalg.norm(mean_eta_final - scenario.eta_goal.as_array())
    )

    return RunMetrics(
        times=log.times.copy(),
        formation_error=formation_error,
        disagreement=disagreement,
        soft_set_distance=soft_dist,
        min_robot_distance=min_robot_distance,
        min_obstacle_clearance=min_obstacle_clearance,
        hard_violation_count=hard_violation_count,
        goal_param_error=goal_param_error,
    )


def _soft_distance_series(etas: np.ndarray, spec: ConstraintSpec) -> np.ndarray:
    """Per-tick max over robots of the distance of s to the soft set.

    Membership is tested vectorised; only the violating (tick, robot) pairs
    go through the scalar projection, which keeps the series consistent
    with `project_scaling` without duplicating its branch logic.
    """
    sx = etas[:, :, 1]
    sy = etas[:, :, 2]
    eps = spec.eps_soft
    r2 = spec.r_soft * spec.r_soft
    outside = (sx < eps) | (sy < eps) | (sx * sx + sy * sy > r2)
    dist = np.zeros(sx.shape)
    for k, i in zip(*np.nonzero(outside)):
        dist[k, i] = soft_set_distance(sx[k, i], sy[k, i], spec)
    return dist.max(axis=1)


def _min_pairwise_distance(positions: np.ndarray) -> float:
    t, n = positions.shape[:2]
    if n < 2:
        return math.inf
    best = math.inf
    chunk = max(1, int(2e6 // (n * n)))
    for start in range(0, t, chunk):
        block = positions[start : start + chunk]
        diff = block[:, :, None, :] - block[:, None, :, :]
        d2 = np.einsum("tijk,tijk->tij", diff, diff)
        iu = np.triu_indices(n, k=1)
        best = min(best, float(d2[:, iu[0], iu[1]].min()))
    return math.sqrt(best)


def _min_obstacle_clearance(positions: np.ndarray, obstacles) -> float:
    if not obstacles:
        return math.inf
    centers = np.array([o.center for o in obstacles])
    radii = np.array([o.radius for o in obstacles])
    diff = positions[:, :, None, :] - centers[None, None, :, :]
    dist = np.linalg.norm(diff, axis=-1) - radii[None, None, :]
    return float(dist.min())
