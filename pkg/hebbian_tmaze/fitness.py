from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from hebbian_tmaze.constants import FORWARD_SPEED_DIVISOR, GOAL_REWARD_SCALE
from hebbian_tmaze.models import MazeSpec, Point
from hebbian_tmaze.world import MazeRegion, region_of


class BehaviorComponents(NamedTuple):
    forward: float
    avoid: float
    spinning: float
    junction: int


@dataclass(frozen=True)
class FitnessSample:
    """All fitness terms of one control step."""

    forward: float
    avoid_collision: float
    spinning: float
    junction: int
    combined: float
    reward: float
    final: float

    def as_row(self) -> tuple[float, ...]:
        return (
            self.forward,
            self.avoid_collision,
            self.spinning,
            float(self.junction),
            self.combined,
            self.reward,
            self.final,
        )


def behavior_components(
    v_left: float, v_right: float, proximity: Iterable[float], correct_turn: int | bool
) -> BehaviorComponents:
    forward = min(1.0, max(0.0, (v_left + v_right) / FORWARD_SPEED_DIVISOR))
    avoid = 1.0 - max(proximity, default=0.0) ** 3
    spinning = 1.0 - abs(v_right - v_left) / 2
    return BehaviorComponents(forward=forward, avoid=avoid, spinning=spinning, junction=int(bool(correct_turn)))


def combined_fitness(components: BehaviorComponents | Sequence[float]) -> float:
    """Weighted mean with collision avoidance counted twice."""

    forward, avoid, spinning, junction = components
    return (forward + 2 * avoid + spinning + junction) / 5


def goal_reward(position: tuple[float, float] | Point, goal: tuple[float, float] | Point) -> float:
    px, py = (position.x, position.y) if isinstance(position, Point) else position
    gx, gy = (goal.x, goal.y) if isinstance(goal, Point) else goal
    distance = math.hypot(gx - px, gy - py)
    scaled = min(1.0, (GOAL_REWARD_SCALE * distance) ** 3)
    return 1.0 - scaled


def final_fitness(combined: float, reward: float) -> float:
    return (combined + reward) / 2


def fitness_sample(
    commands: tuple[float, float],
    proximity: Iterable[float],
    junction: int,
    position: tuple[float, float],
    goal: Point,
) -> FitnessSample:
    components = behavior_components(commands[0], commands[1], proximity, junction)
    combined = combined_fitness(components)
    reward = goal_reward(position, goal)
    return FitnessSample(
        forward=components.forward,
        avoid_collision=components.avoid,
        spinning=components.spinning,
        junction=components.junction,
        combined=combined,
        reward=reward,
        final=final_fitness(combined, reward),
    )


def trial_fitness(samples: Sequence[FitnessSample], final_position: tuple[float, float], goal: Point) -> float:
    """Mean per-step combined fitness averaged with the end-of-trial goal reward."""

    if not samples:
        raise ValueError("trial_fitness needs at least one fitness sample.")
    mean_combined = math.fsum(sample.combined for sample in samples) / len(samples)
    return final_fitness(mean_combined, goal_reward(final_position, goal))


class JunctionLatch:
    """Per-trial junction flag: 1 once the correct arm is entered, 0 forever after a wrong turn."""

    def __init__(self, maze: MazeSpec) -> None:
        self._correct = MazeRegion.RIGHT_ARM if maze.light_present else MazeRegion.LEFT_ARM
        self._maze = maze
        self._decided: bool | None = None

    @property
    def value(self) -> int:
        return 1 if self._decided else 0

    def update(self, x: float, y: float) -> int:
        if self._decided is None:
            region = region_of(self._maze, x, y)
            if region is self._correct:
                self._decided = True
            elif region in (MazeRegion.LEFT_ARM, MazeRegion.RIGHT_ARM):
                self._decided = False
        return self.value


__all__ = [
    "BehaviorComponents",
    "FitnessSample",
    "JunctionLatch",
    "behavior_components",
    "combined_fitness",
    "final_fitness",
    "fitness_sample",
    "goal_reward",
    "trial_fitness",
]
