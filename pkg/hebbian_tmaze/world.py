from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from hebbian_tmaze.constants import (
    ARM_LENGTH,
    CORRIDOR_WIDTH,
    GOAL_INSET,
    LIGHT_SENSOR_COUNT,
    OBSTACLE_DEPTH,
    OBSTACLE_LENGTH,
    SENSOR_BEARINGS_RAD,
    START_OFFSET,
    STEM_LENGTH,
    WALL_THICKNESS,
)
from hebbian_tmaze.models import LightSource, MazeSpec, Point, Rect, SimulationSettings
from hebbian_tmaze.network import FloatArray

_BEARINGS = np.array(SENSOR_BEARINGS_RAD, dtype=np.float64)
_MAX_CONTACT_PASSES = 16


class MazeRegion(str, Enum):
    STEM = "stem"
    JUNCTION = "junction"
    LEFT_ARM = "left_arm"
    RIGHT_ARM = "right_arm"


def build_t_maze(
    *,
    corridor_width: float = CORRIDOR_WIDTH,
    stem_length: float = STEM_LENGTH,
    arm_length: float = ARM_LENGTH,
    wall_thickness: float = WALL_THICKNESS,
    light: bool = True,
    light_intensity: float = 1.0,
    ambient_luminosity: float = 0.1,
) -> MazeSpec:
    """Build the default T-maze: stem along +y from the start, arms along -x (left) and +x (right)."""

    half = corridor_width / 2
    t = wall_thickness
    top = stem_length + corridor_width
    outer = half + arm_length
    walls = (
        Rect(x_min=-half - t, y_min=-t, x_max=half + t, y_max=0.0),
        Rect(x_min=-half - t, y_min=0.0, x_max=-half, y_max=stem_length),
        Rect(x_min=half, y_min=0.0, x_max=half + t, y_max=stem_length),
        Rect(x_min=-outer - t, y_min=stem_length - t, x_max=-half, y_max=stem_length),
        Rect(x_min=half, y_min=stem_length - t, x_max=outer + t, y_max=stem_length),
        Rect(x_min=-outer - t, y_min=top, x_max=outer + t, y_max=top + t),
        Rect(x_min=-outer - t, y_min=stem_length - t, x_max=-outer, y_max=top),
        Rect(x_min=outer, y_min=stem_length - t, x_max=outer + t, y_max=top),
    )
    middle = stem_length + corridor_width / 2
    source = LightSource(position=Point(x=outer, y=middle), intensity=light_intensity) if light else None
    return MazeSpec(
        walls=walls,
        junction=Rect(x_min=-half, y_min=stem_length, x_max=half, y_max=top),
        goal_left=Point(x=-outer + GOAL_INSET, y=middle),
        goal_right=Point(x=outer - GOAL_INSET, y=middle),
        start=Point(x=0.0, y=START_OFFSET),
        start_heading=math.pi / 2,
        light_source=source,
        ambient_luminosity=ambient_luminosity,
    )


def with_light(maze: MazeSpec, present: bool, *, template: LightSource | None = None) -> MazeSpec:
    """Return the maze with the light cue switched on or off.

    Switching on reuses the maze's own source, then ``template``, then a source at the right arm's end.
    """

    if not present:
        return maze.model_copy(update={"light_source": None})
    if maze.light_source is not None:
        return maze
    source = template or LightSource(
        position=Point(x=maze.goal_right.x + GOAL_INSET, y=maze.goal_right.y),
        intensity=1.0,
    )
    return maze.model_copy(update={"light_source": source})


def with_luminosity(maze: MazeSpec, factor: float) -> MazeSpec:
    """Scale scene brightness: ambient term and source intensity together."""

    if factor < 0:
        raise ValueError("Luminosity factor must be non-negative.")
    ambient = min(1.0, maze.ambient_luminosity * factor)
    source = maze.light_source
    if source is not None:
        source = source.model_copy(update={"intensity": source.intensity * factor})
    return maze.model_copy(update={"ambient_luminosity": ambient, "light_source": source})


def obstacle_catalog(maze: MazeSpec) -> list[Rect]:
    """Corridor-narrowing blocks: two at the stem mouth, then two on the arms' outer wall."""

    junction = maze.junction
    mouth_low = junction.y_min - 2 * OBSTACLE_LENGTH - 0.01
    arm_offset = 0.2
    return [
        Rect(
            x_min=junction.x_min,
            y_min=mouth_low,
            x_max=junction.x_min + OBSTACLE_DEPTH,
            y_max=mouth_low + OBSTACLE_LENGTH,
        ),
        Rect(
            x_min=junction.x_max - OBSTACLE_DEPTH,
            y_min=mouth_low,
            x_max=junction.x_max,
            y_max=mouth_low + OBSTACLE_LENGTH,
        ),
        Rect(
            x_min=junction.x_min - arm_offset,
            y_min=junction.y_max - OBSTACLE_DEPTH,
            x_max=junction.x_min - arm_offset + OBSTACLE_LENGTH,
            y_max=junction.y_max,
        ),
        Rect(
            x_min=junction.x_max + arm_offset - OBSTACLE_LENGTH,
            y_min=junction.y_max - OBSTACLE_DEPTH,
            x_max=junction.x_max + arm_offset,
            y_max=junction.y_max,
        ),
    ]


def with_obstacles(maze: MazeSpec, count: int) -> MazeSpec:
    catalog = obstacle_catalog(maze)
    if not 0 <= count <= len(catalog):
        raise ValueError(f"Obstacle count must be between 0 and {len(catalog)}, got {count}.")
    return maze.model_copy(update={"obstacles": maze.obstacles + tuple(catalog[:count])})


def correct_goal(maze: MazeSpec) -> Point:
    return maze.goal_right if maze.light_present else maze.goal_left


def wrong_goal(maze: MazeSpec) -> Point:
    return maze.goal_left if maze.light_present else maze.goal_right


def region_of(maze: MazeSpec, x: float, y: float) -> MazeRegion:
    junction = maze.junction
    if y < junction.y_min:
        return MazeRegion.STEM
    if x < junction.x_min:
        return MazeRegion.LEFT_ARM
    if x > junction.x_max:
        return MazeRegion.RIGHT_ARM
    return MazeRegion.JUNCTION


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""

    return math.pi - (math.pi - angle) % (2 * math.pi)


@dataclass
class RobotState:
    x: float
    y: float
    heading: float
    body_radius: float
    wheel_speeds: tuple[float, float] = (0.0, 0.0)

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class SensorFrame:
    light: FloatArray
    proximity: FloatArray

    def as_inputs(self) -> FloatArray:
        """Controller input order: light sensors first, then proximity sensors."""

        return np.concatenate((self.light, self.proximity))


@dataclass
class WorldState:
    maze: MazeSpec
    settings: SimulationSettings
    robot: RobotState
    rng: np.random.Generator
    collided: bool = False
    step_index: int = 0
    boxes: FloatArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        blocks = self.maze.blocks
        self.boxes = (
            np.array([block.as_tuple() for block in blocks], dtype=np.float64)
            if blocks
            else np.zeros((0, 4), dtype=np.float64)
        )

    @classmethod
    def create(cls, maze: MazeSpec, settings: SimulationSettings | None = None, *, seed: int = 0) -> "WorldState":
        active = settings or SimulationSettings()
        robot = RobotState(
            x=maze.start.x,
            y=maze.start.y,
            heading=wrap_angle(maze.start_heading),
            body_radius=active.robot_radius,
        )
        return cls(maze=maze, settings=active, robot=robot, rng=np.random.default_rng(seed))


def penetration_depth(x: float, y: float, radius: float, boxes: FloatArray) -> float:
    """Largest overlap between the robot disc and any box; zero when free."""

    if boxes.shape[0] == 0:
        return 0.0
    closest_x = np.clip(x, boxes[:, 0], boxes[:, 2])
    closest_y = np.clip(y, boxes[:, 1], boxes[:, 3])
    gaps = np.hypot(x - closest_x, y - closest_y)
    return float(max(0.0, np.max(radius - gaps)))


def _push_out(x: float, y: float, radius: float, box: FloatArray) -> tuple[float, float]:
    x_min, y_min, x_max, y_max = (float(value) for value in box)
    closest_x = min(max(x, x_min), x_max)
    closest_y = min(max(y, y_min), y_max)
    dx = x - closest_x
    dy = y - closest_y
    gap = math.hypot(dx, dy)
    if gap > 0.0:
        return closest_x + dx / gap * radius, closest_y + dy / gap * radius
    # Centre inside the box: leave through the nearest face.
    exits = (
        (x - x_min, (x_min - radius, y)),
        (x_max - x, (x_max + radius, y)),
        (y - y_min, (x, y_min - radius)),
        (y_max - y, (x, y_max + radius)),
    )
    return min(exits, key=lambda item: item[0])[1]


def resolve_contacts(x: float, y: float, radius: float, boxes: FloatArray) -> tuple[float, float, bool]:
    """Project the disc out of every overlapping box (slide along walls)."""

    collided = False
    for _ in range(_MAX_CONTACT_PASSES):
        if boxes.shape[0] == 0:
            break
        closest_x = np.clip(x, boxes[:, 0], boxes[:, 2])
        closest_y = np.clip(y, boxes[:, 1], boxes[:, 3])
        gaps = np.hypot(x - closest_x, y - closest_y)
        touching = np.flatnonzero(gaps < radius - 1e-12)
        if touching.size == 0:
            break
        collided = True
        for index in touching:
            x, y = _push_out(x, y, radius, boxes[index])
    return x, y, collided


def step(world: WorldState, commands: Sequence[float]) -> WorldState:
    """Advance one fixed timestep of differential-drive kinematics."""

    left, right = (float(value) for value in commands)
    if not (math.isfinite(left) and math.isfinite(right)):
        raise ValueError("Motor commands must be finite.")
    left = min(1.0, max(-1.0, left))
    right = min(1.0, max(-1.0, right))

    settings = world.settings
    robot = world.robot
    v_left = left * settings.v_max
    v_right = right * settings.v_max
    linear = (v_left + v_right) / 2
    angular = (v_right - v_left) / settings.axle_length

    x = robot.x + linear * math.cos(robot.heading) * settings.dt
    y = robot.y + linear * math.sin(robot.heading) * settings.dt
    x, y, collided = resolve_contacts(x, y, robot.body_radius, world.boxes)

    robot.x = x
    robot.y = y
    robot.heading = wrap_angle(robot.heading + angular * settings.dt)
    robot.wheel_speeds = (left, right)
    world.collided = collided
    world.step_index += 1
    return world


def _ray_slab(
    origin: FloatArray, direction: FloatArray, low: FloatArray, high: FloatArray
) -> tuple[FloatArray, FloatArray]:
    with np.errstate(divide="ignore", invalid="ignore"):
        t_low = (low - origin) / direction
        t_high = (high - origin) / direction
    near = np.minimum(t_low, t_high)
    far = np.maximum(t_low, t_high)
    parallel = direction == 0.0
    inside = (origin >= low) & (origin <= high)
    near = np.where(parallel, np.where(inside, -np.inf, np.inf), near)
    far = np.where(parallel, np.where(inside, np.inf, -np.inf), far)
    return near, far


def ray_distances(origins: FloatArray, directions: FloatArray, boxes: FloatArray) -> FloatArray:
    """Distance along each ray to the nearest box; ``inf`` when nothing is hit."""

    if boxes.shape[0] == 0:
        return np.full(origins.shape[0], np.inf)
    near_x, far_x = _ray_slab(origins[:, :1], directions[:, :1], boxes[None, :, 0], boxes[None, :, 2])
    near_y, far_y = _ray_slab(origins[:, 1:], directions[:, 1:], boxes[None, :, 1], boxes[None, :, 3])
    t_near = np.maximum(near_x, near_y)
    t_far = np.minimum(far_x, far_y)
    hit = (t_far >= t_near) & (t_far >= 0.0)
    distances = np.where(hit, np.maximum(t_near, 0.0), np.inf)
    result: FloatArray = distances.min(axis=1)
    return result


def sensor_geometry(robot: RobotState) -> tuple[FloatArray, FloatArray]:
    """Sensor origins on the body perimeter and their unit bearing vectors."""

    angles = robot.heading + _BEARINGS
    directions = np.column_stack((np.cos(angles), np.sin(angles)))
    origins = np.array([robot.x, robot.y]) + robot.body_radius * directions
    return origins, directions


def sense(world: WorldState) -> SensorFrame:
    """Read eight light and eight proximity sensors, all clamped to [0, 1]."""

    settings = world.settings
    maze = world.maze
    origins, directions = sensor_geometry(world.robot)

    distances = ray_distances(origins, directions, world.boxes)
    proximity = np.clip(1.0 - distances / settings.sensor_range, 0.0, 1.0)

    light = np.full(LIGHT_SENSOR_COUNT, maze.ambient_luminosity, dtype=np.float64)
    source = maze.light_source
    if source is not None:
        offsets = np.array([source.position.x, source.position.y]) - origins
        ranges = np.hypot(offsets[:, 0], offsets[:, 1])
        safe = np.where(ranges > 0.0, ranges, 1.0)
        cosines = np.where(ranges > 0.0, np.sum(offsets * directions, axis=1) / safe, 1.0)
        falloff = source.intensity / (1.0 + settings.light_falloff * ranges**2)
        light = light + falloff * np.maximum(0.0, cosines)
    light = np.clip(light, 0.0, 1.0)

    if settings.sensor_noise_std > 0.0:
        light = np.clip(light + world.rng.normal(0.0, settings.sensor_noise_std, light.shape), 0.0, 1.0)
        proximity = np.clip(proximity + world.rng.normal(0.0, settings.sensor_noise_std, proximity.shape), 0.0, 1.0)
    return SensorFrame(light=light, proximity=proximity)


__all__ = [
    "MazeRegion",
    "RobotState",
    "SensorFrame",
    "WorldState",
    "build_t_maze",
    "correct_goal",
    "obstacle_catalog",
    "penetration_depth",
    "ray_distances",
    "region_of",
    "resolve_contacts",
    "sense",
    "sensor_geometry",
    "step",
    "with_light",
    "with_luminosity",
    "with_obstacles",
    "wrap_angle",
    "wrong_goal",
]
