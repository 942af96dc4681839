from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from hebbian_tmaze.fitness import FitnessSample, JunctionLatch, fitness_sample
from hebbian_tmaze.models import MazeSpec, PlasticityConfig, SimulationSettings, TrialMetrics
from hebbian_tmaze.network import (
    ControllerState,
    FloatArray,
    Genotype,
    NetworkTopology,
    TopologyMismatchError,
    forward,
    load_genotype,
)
from hebbian_tmaze.plasticity import HebbianAdapter, WeightChangeEntry
from hebbian_tmaze.world import WorldState, correct_goal, sense, step, wrong_goal

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    steps_taken: int
    trajectory: tuple[tuple[float, float], ...]
    headings: tuple[float, ...]
    collided: bool
    final_position_error: float
    time_to_goal: Optional[float] = None


@dataclass
class TrialRun:
    """Everything one trial produces: outcome, metrics and the per-step logs."""

    outcome: TrialOutcome
    metrics: TrialMetrics
    weight_log: Optional[list[WeightChangeEntry]]
    samples: list[FitnessSample] = field(default_factory=list)
    sensor_log: list[FloatArray] = field(default_factory=list)


def path_length(trajectory: tuple[tuple[float, float], ...]) -> float:
    return math.fsum(
        math.hypot(x2 - x1, y2 - y1) for (x1, y1), (x2, y2) in zip(trajectory[:-1], trajectory[1:])
    )


def _metrics(
    outcome: TrialOutcome,
    settings: SimulationSettings,
    goal_distances: list[float],
    collision_steps: int,
    weight_change: Optional[tuple[float, float]],
) -> TrialMetrics:
    elapsed = outcome.steps_taken * settings.dt
    length = path_length(outcome.trajectory)
    return TrialMetrics(
        success=outcome.success,
        steps_taken=outcome.steps_taken,
        elapsed_time=elapsed,
        time_to_goal=outcome.time_to_goal,
        path_length=length,
        average_speed=length / elapsed if elapsed > 0 else 0.0,
        final_position_error=outcome.final_position_error,
        min_position_error=min(goal_distances),
        collision_steps=collision_steps,
        weight_change_cumulative=weight_change[0] if weight_change else None,
        weight_change_per_step=weight_change[1] if weight_change else None,
    )


def run_trial(
    genotype: Genotype,
    maze: MazeSpec,
    plasticity: Optional[PlasticityConfig] = None,
    seed: int = 0,
    settings: Optional[SimulationSettings] = None,
) -> TrialRun:
    """Run one lifetime of the controller in ``maze``; the genotype itself is never modified.

    With an enabled plasticity config the controller adapts every step and is restored from the
    genome snapshot when the trial ends.
    """

    if genotype.topology != NetworkTopology():
        raise TopologyMismatchError(
            f"Trials need the default topology, got {list(genotype.topology.layer_sizes)}."
        )
    active_settings = settings or SimulationSettings()
    world = WorldState.create(maze, active_settings, seed=seed)
    controller = load_genotype(ControllerState.for_topology(genotype.topology), genotype)
    adapter = HebbianAdapter(controller, plasticity) if plasticity is not None and plasticity.enabled else None
    if adapter is not None:
        adapter.begin(genotype)

    goal = correct_goal(maze)
    decoy = wrong_goal(maze)
    latch = JunctionLatch(maze)
    robot = world.robot
    trajectory = [robot.position]
    headings = [robot.heading]
    goal_distances = [goal.distance_to(robot.x, robot.y)]
    samples: list[FitnessSample] = []
    sensor_log: list[FloatArray] = []
    collision_steps = 0
    success = False
    time_to_goal: Optional[float] = None

    for index in range(active_settings.max_steps):
        frame = sense(world)
        inputs = frame.as_inputs()
        sensor_log.append(inputs)
        left, right = forward(controller, inputs)
        step(world, (left, right))
        collision_steps += int(world.collided)

        position = robot.position
        trajectory.append(position)
        headings.append(robot.heading)
        distance = goal.distance_to(*position)
        goal_distances.append(distance)

        sample = fitness_sample((left, right), frame.proximity, latch.update(*position), position, goal)
        samples.append(sample)
        if adapter is not None:
            adapter.observe(index, sample.final)

        if distance <= active_settings.success_radius:
            success = True
            time_to_goal = (index + 1) * active_settings.dt
            break
        if active_settings.stop_on_wrong_goal and decoy.distance_to(*position) <= active_settings.success_radius:
            break

    weight_change: Optional[tuple[float, float]] = None
    weight_log: Optional[list[WeightChangeEntry]] = None
    if adapter is not None:
        cumulative, per_step, weight_log = adapter.end()
        weight_change = (cumulative, per_step)

    outcome = TrialOutcome(
        success=success,
        steps_taken=len(trajectory) - 1,
        trajectory=tuple(trajectory),
        headings=tuple(headings),
        collided=collision_steps > 0,
        final_position_error=goal_distances[-1],
        time_to_goal=time_to_goal,
    )
    LOGGER.debug(
        "Trial seed=%s success=%s steps=%s error=%.4f", seed, success, outcome.steps_taken, outcome.final_position_error
    )
    return TrialRun(
        outcome=outcome,
        metrics=_metrics(outcome, active_settings, goal_distances, collision_steps, weight_change),
        weight_log=weight_log,
        samples=samples,
        sensor_log=sensor_log,
    )


def sensor_matrix(run: TrialRun) -> FloatArray:
    """Stack the per-step sensor inputs into a ``(steps, 16)`` array."""

    if not run.sensor_log:
        return np.zeros((0, 16))
    return np.vstack(run.sensor_log)


__all__ = ["TrialOutcome", "TrialRun", "path_length", "run_trial", "sensor_matrix"]
