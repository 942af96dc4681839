from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hebbian_tmaze.constants import (
    AXLE_LENGTH,
    FITNESS_FLOOR,
    GENE_LIMIT,
    LIGHT_FALLOFF,
    MAX_STEPS,
    MAX_WHEEL_SPEED,
    ROBOT_RADIUS,
    SENSOR_RANGE,
    SUCCESS_RADIUS,
    TIMESTEP_SECONDS,
    TRACE_DECAY,
    TRACE_UPDATE,
    WEIGHT_CLIP,
)
from hebbian_tmaze.network import Genotype


class Point(BaseModel):
    """2D point in meters."""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float

    def distance_to(self, x: float, y: float) -> float:
        return math.hypot(self.x - x, self.y - y)


class Rect(BaseModel):
    """Axis-aligned rectangle in meters."""

    model_config = ConfigDict(frozen=True)

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @model_validator(mode="after")
    def _ordered(self) -> "Rect":
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"Degenerate rectangle: {self!r}")
        return self

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


class LightSource(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: Point
    intensity: float = Field(default=1.0, ge=0.0)


class MazeSpec(BaseModel):
    """Static T-maze description: walls, junction, goals, start pose, light and obstacles."""

    model_config = ConfigDict(frozen=True)

    walls: tuple[Rect, ...]
    junction: Rect
    goal_left: Point
    goal_right: Point
    start: Point
    start_heading: float = math.pi / 2
    light_source: Optional[LightSource] = None
    ambient_luminosity: float = Field(default=0.1, ge=0.0, le=1.0)
    obstacles: tuple[Rect, ...] = ()

    @model_validator(mode="after")
    def _goals_in_free_space(self) -> "MazeSpec":
        for label, goal in (("goal_left", self.goal_left), ("goal_right", self.goal_right), ("start", self.start)):
            if any(block.contains(goal.x, goal.y) for block in self.blocks):
                raise ValueError(f"{label} lies inside a wall or obstacle.")
        return self

    @property
    def blocks(self) -> tuple[Rect, ...]:
        return self.walls + self.obstacles

    @property
    def light_present(self) -> bool:
        return self.light_source is not None


class SimulationSettings(BaseModel):
    """Kinematic, sensing and trial-length parameters of the simulator."""

    model_config = ConfigDict(frozen=True)

    dt: float = Field(default=TIMESTEP_SECONDS, gt=0.0)
    v_max: float = Field(default=MAX_WHEEL_SPEED, gt=0.0)
    axle_length: float = Field(default=AXLE_LENGTH, gt=0.0)
    robot_radius: float = Field(default=ROBOT_RADIUS, gt=0.0)
    sensor_range: float = Field(default=SENSOR_RANGE, gt=0.0)
    light_falloff: float = Field(default=LIGHT_FALLOFF, ge=0.0)
    success_radius: float = Field(default=SUCCESS_RADIUS, gt=0.0)
    max_steps: int = Field(default=MAX_STEPS, ge=0)
    sensor_noise_std: float = Field(default=0.0, ge=0.0)
    stop_on_wrong_goal: bool = True


class TurnDirection(str, Enum):
    """Arm the robot has to take; right is cued by the light source."""

    LEFT = "left"
    RIGHT = "right"

    @property
    def label(self) -> str:
        if self is TurnDirection.LEFT:
            return "Left (no light)"
        return "Right (light)"

    @property
    def light_present(self) -> bool:
        return self is TurnDirection.RIGHT


class ControllerMode(str, Enum):
    """Fixed evolved controller or evolved controller with runtime plasticity."""

    GA = "ga"
    HEBBIAN = "hebbian"

    @property
    def label(self) -> str:
        if self is ControllerMode.GA:
            return "GA"
        return "GA + Hebbian"


class PlasticityConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_rate: float = Field(default=0.002, ge=0.0)
    fitness_floor: float = Field(default=FITNESS_FLOOR, ge=0.0, le=1.0)
    trace_decay: float = Field(default=TRACE_DECAY, ge=0.0, lt=1.0)
    trace_update: float = Field(default=TRACE_UPDATE, gt=0.0, le=1.0)
    weight_clip: float = Field(default=WEIGHT_CLIP, gt=0.0)
    enabled: bool = True


class GaConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    population_size: int = Field(default=50, ge=1)
    generations: int = Field(default=30, ge=1)
    elitism_count: int = Field(default=6, ge=0)
    tournament_size: int = Field(default=3, ge=1)
    crossover_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    mutation_rate: float = Field(default=0.1, ge=0.0, le=1.0)
    mutation_sigma: float = Field(default=0.2, ge=0.0)
    init_range: float = Field(default=1.0, gt=0.0)
    gene_limit: float = Field(default=GENE_LIMIT, gt=0.0)
    trials_per_eval: int = Field(default=1, ge=1)
    master_seed: int = 0
    max_steps: int = Field(default=1500, ge=0)
    workers: int = Field(default=1, ge=1)
    checkpoint_every: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _validate_sizes(self) -> "GaConfig":
        if self.elitism_count >= self.population_size:
            raise ValueError("elitism_count must be smaller than population_size.")
        if self.tournament_size > self.population_size:
            raise ValueError("tournament_size cannot exceed population_size.")
        return self


class GenerationStats(BaseModel):
    generation: int
    best: float
    mean: float
    min: float
    best_genotype: Genotype


class EvolutionRecord(BaseModel):
    """Per-generation fitness statistics and the final champion."""

    generations: list[GenerationStats] = Field(default_factory=list)
    champion: Optional[Genotype] = None

    @property
    def best_series(self) -> list[float]:
        return [entry.best for entry in self.generations]


class TrialSpec(BaseModel):
    """One experiment trial: direction plus environment perturbations."""

    model_config = ConfigDict(frozen=True)

    name: str
    direction: TurnDirection
    luminosity: float = Field(default=1.0, ge=0.0)
    obstacles: int = Field(default=0, ge=0, le=4)


class ExperimentConfig(BaseModel):
    world_path: Optional[Path] = None
    genome_path: Path
    mode: ControllerMode = ControllerMode.HEBBIAN
    plasticity: PlasticityConfig = Field(default_factory=PlasticityConfig)
    trials: list[TrialSpec] = Field(default_factory=list)
    seeds: list[int] = Field(default_factory=lambda: [0])
    output_dir: Path = Path(".data/runs/experiment")
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _ga_disables_plasticity(self) -> "ExperimentConfig":
        if self.mode is ControllerMode.GA and self.plasticity.enabled:
            self.plasticity = self.plasticity.model_copy(update={"enabled": False})
        return self


class TrialMetrics(BaseModel):
    """Per-trial statistics as reported in the experiment tables."""

    success: bool
    steps_taken: int
    elapsed_time: float
    time_to_goal: Optional[float] = None
    path_length: float
    average_speed: float
    final_position_error: float
    min_position_error: float
    collision_steps: int = 0
    weight_change_cumulative: Optional[float] = None
    weight_change_per_step: Optional[float] = None


__all__ = [
    "ControllerMode",
    "EvolutionRecord",
    "ExperimentConfig",
    "GaConfig",
    "GenerationStats",
    "LightSource",
    "MazeSpec",
    "PlasticityConfig",
    "Point",
    "Rect",
    "SimulationSettings",
    "TrialMetrics",
    "TrialSpec",
    "TurnDirection",
]
