from __future__ import annotations

import math

from hebbian_tmaze.analytics import CorrelationReport
from hebbian_tmaze.charts import (
    build_fitness_curve_figure,
    build_sensor_correlation_figure,
    build_trajectory_figure,
    build_weight_change_figure,
)
from hebbian_tmaze.world import with_light, with_obstacles


def _report(defined: bool) -> CorrelationReport:
    return CorrelationReport(
        steps=[0, 1, 2],
        fitness=[0.2, 0.4, 0.6],
        sum_abs_delta=[0.01, 0.02, 0.03],
        fitness_correlation=0.987 if defined else math.nan,
        fitness_correlation_defined=defined,
        sensor_correlations={"light_0": 0.5, "light_1": math.nan, "proximity_0": -0.25},
        undefined_channels=["light_1"],
    )


def test_trajectory_figure_draws_paths_markers_and_walls(default_maze) -> None:
    maze = with_obstacles(default_maze, 2)

    figure = build_trajectory_figure(maze, {"left": [(0.0, 0.05), (0.0, 0.1)], "right": [(0.0, 0.05)]})

    assert [trace.name for trace in figure.data[:2]] == ["left", "right"]
    assert figure.data[-1].name == "Light"
    assert len(figure.layout.shapes) == len(maze.walls) + 2
    assert figure.layout.yaxis.scaleanchor == "x"


def test_trajectory_figure_takes_a_title(default_maze) -> None:
    figure = build_trajectory_figure(default_maze, {}, title="Trajectories: left_lum1_obs2")

    assert figure.layout.title.text == "Trajectories: left_lum1_obs2"
    assert build_trajectory_figure(default_maze, {}).layout.title.text == "Trajectories"


def test_trajectory_figure_without_light(default_maze) -> None:
    figure = build_trajectory_figure(with_light(default_maze, False), {})

    assert len(figure.data) == 1
    assert list(figure.data[0].text) == ["Goal left", "Goal right", "Start"]


def test_fitness_curve_has_three_series() -> None:
    figure = build_fitness_curve_figure({"generation": [0, 1], "best": [0.5, 0.6], "mean": [0.3, 0.4], "min": [0.1, 0.2]})

    assert [trace.name for trace in figure.data] == ["Best", "Mean", "Min"]
    assert list(figure.data[0].y) == [0.5, 0.6]
    assert figure.layout.title.text == "Fitness per generation"


def test_weight_change_title_includes_defined_correlation() -> None:
    assert build_weight_change_figure(_report(True)).layout.title.text.endswith("(r = 0.987)")
    assert build_weight_change_figure(_report(False)).layout.title.text == "Weight change vs fitness"


def test_sensor_correlation_figure_skips_undefined_channels() -> None:
    figure = build_sensor_correlation_figure(_report(True))

    assert list(figure.data[0].x) == ["light_0", "proximity_0"]
    assert list(figure.data[0].y) == [0.5, -0.25]
