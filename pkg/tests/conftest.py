from __future__ import annotations

import sys
from pathlib import Path
from typing import Callable

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from hebbian_tmaze.models import MazeSpec, Point, Rect, SimulationSettings  # noqa: E402
from hebbian_tmaze.network import Genotype, NetworkTopology, genotype_length  # noqa: E402
from hebbian_tmaze.world import build_t_maze  # noqa: E402


@pytest.fixture()
def default_maze() -> MazeSpec:
    return build_t_maze()


@pytest.fixture()
def open_field() -> MazeSpec:
    """No walls at all; the robot starts at the origin facing +x."""

    return MazeSpec(
        walls=(),
        junction=Rect(x_min=-0.1, y_min=5.0, x_max=0.1, y_max=5.2),
        goal_left=Point(x=-5.0, y=5.1),
        goal_right=Point(x=5.0, y=5.1),
        start=Point(x=0.0, y=0.0),
        start_heading=0.0,
    )


@pytest.fixture()
def fast_settings() -> SimulationSettings:
    return SimulationSettings(max_steps=40)


@pytest.fixture()
def random_genotype() -> Callable[..., Genotype]:
    def factory(seed: int = 0, scale: float = 1.0, topology: NetworkTopology | None = None) -> Genotype:
        active = topology or NetworkTopology()
        rng = np.random.default_rng(seed)
        return Genotype.from_array(rng.uniform(-scale, scale, genotype_length(active)), active)

    return factory


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: runs a small evolution before the experiment")
