"""Central defaults for the controller, simulator, plasticity engine and GA."""

import math
from typing import Tuple

DEFAULT_LAYER_SIZES: Tuple[int, ...] = (16, 7, 5, 8, 4, 2)
LIGHT_SENSOR_COUNT: int = 8
PROXIMITY_SENSOR_COUNT: int = 8

# e-puck-like sensor layout, degrees from forward, positive = counter-clockwise.
SENSOR_BEARINGS_DEG: Tuple[float, ...] = (-17.0, -45.0, -90.0, -150.0, 150.0, 90.0, 45.0, 17.0)
SENSOR_BEARINGS_RAD: Tuple[float, ...] = tuple(math.radians(value) for value in SENSOR_BEARINGS_DEG)

TIMESTEP_SECONDS: float = 0.032
MAX_WHEEL_SPEED: float = 0.06
AXLE_LENGTH: float = 0.053
ROBOT_RADIUS: float = 0.037
SENSOR_RANGE: float = 0.07
LIGHT_FALLOFF: float = 10.0
SUCCESS_RADIUS: float = 0.05
MAX_STEPS: int = 8000

CORRIDOR_WIDTH: float = 0.25
STEM_LENGTH: float = 0.7
ARM_LENGTH: float = 0.5
WALL_THICKNESS: float = 0.05
GOAL_INSET: float = 0.08
START_OFFSET: float = 0.15
OBSTACLE_DEPTH: float = 0.05
OBSTACLE_LENGTH: float = 0.07

FITNESS_FLOOR: float = 0.2
TRACE_DECAY: float = 0.95
TRACE_UPDATE: float = 0.05
WEIGHT_CLIP: float = 2.0
GENE_LIMIT: float = 4.0

GOAL_REWARD_SCALE: float = 1.7
FORWARD_SPEED_DIVISOR: float = 1.5

CSV_FLOAT_FORMAT: str = "{:.6f}"
MISSING_VALUE: str = "NA"

SENSOR_CHANNELS: Tuple[str, ...] = tuple(f"light_{index}" for index in range(LIGHT_SENSOR_COUNT)) + tuple(
    f"proximity_{index}" for index in range(PROXIMITY_SENSOR_COUNT)
)
