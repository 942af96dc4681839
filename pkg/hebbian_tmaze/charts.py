from __future__ import annotations

from typing import Mapping, Sequence

import plotly.graph_objects as go

from hebbian_tmaze.analytics import CorrelationReport
from hebbian_tmaze.models import MazeSpec, Rect

PRIMARY_COLOR = "#1C9C82"
SECONDARY_COLOR = "#35C2A1"
WALL_COLOR = "#24544B"
OBSTACLE_COLOR = "#E4A358"
GOAL_COLOR = "#E45858"
LIGHT_COLOR = "#F2D649"
FONT_COLOR = "#E6F2EC"
GRID_COLOR = "#24544B"


def _apply_dark_theme(figure: go.Figure) -> go.Figure:
    figure.update_layout(
        template="plotly_dark",
        font=dict(color=FONT_COLOR),
        plot_bgcolor="rgba(0,0,0,0)",
        paper_bgcolor="rgba(0,0,0,0)",
        xaxis=dict(gridcolor=GRID_COLOR, zerolinecolor=GRID_COLOR),
        yaxis=dict(gridcolor=GRID_COLOR, zerolinecolor=GRID_COLOR),
    )
    return figure


def _rect_shape(rect: Rect, color: str) -> dict[str, object]:
    return dict(
        type="rect",
        x0=rect.x_min,
        y0=rect.y_min,
        x1=rect.x_max,
        y1=rect.y_max,
        line=dict(width=0),
        fillcolor=color,
        layer="below",
    )


def build_trajectory_figure(
    maze: MazeSpec,
    trajectories: Mapping[str, Sequence[tuple[float, float]]],
    *,
    title: str = "Trajectories",
) -> go.Figure:
    """Top-down maze view with one path per trial label."""

    figure = go.Figure()
    for label, points in trajectories.items():
        figure.add_trace(
            go.Scatter(
                x=[point[0] for point in points],
                y=[point[1] for point in points],
                mode="lines",
                name=label,
                hovertemplate=f"<b>{label}</b><br>x=%{{x:.3f}} m<br>y=%{{y:.3f}} m<extra></extra>",
            )
        )

    goals = [("Goal left", maze.goal_left), ("Goal right", maze.goal_right), ("Start", maze.start)]
    figure.add_trace(
        go.Scatter(
            x=[point.x for _, point in goals],
            y=[point.y for _, point in goals],
            mode="markers+text",
            text=[label for label, _ in goals],
            textposition="bottom center",
            marker=dict(color=GOAL_COLOR, size=10),
            showlegend=False,
        )
    )
    if maze.light_source is not None:
        figure.add_trace(
            go.Scatter(
                x=[maze.light_source.position.x],
                y=[maze.light_source.position.y],
                mode="markers",
                name="Light",
                marker=dict(color=LIGHT_COLOR, size=14, symbol="star"),
            )
        )

    shapes = [_rect_shape(wall, WALL_COLOR) for wall in maze.walls]
    shapes += [_rect_shape(block, OBSTACLE_COLOR) for block in maze.obstacles]
    figure.update_layout(
        shapes=shapes,
        title_text=title,
        xaxis_title="x (m)",
        yaxis_title="y (m)",
        margin=dict(t=60, r=10, b=40, l=10),
    )
    _apply_dark_theme(figure)
    figure.update_yaxes(scaleanchor="x", scaleratio=1)
    return figure


def build_fitness_curve_figure(stats: Mapping[str, Sequence[float]]) -> go.Figure:
    """Best/mean/min fitness per generation from the evolution stats columns."""

    generations = list(stats.get("generation", []))
    figure = go.Figure()
    for column, color in (("best", PRIMARY_COLOR), ("mean", SECONDARY_COLOR), ("min", WALL_COLOR)):
        figure.add_trace(
            go.Scatter(
                x=generations,
                y=list(stats.get(column, [])),
                mode="lines+markers",
                name=column.capitalize(),
                line=dict(color=color),
            )
        )
    figure.update_layout(
        title_text="Fitness per generation",
        xaxis_title="Generation",
        yaxis_title="Fitness",
        margin=dict(t=60, r=10, b=40, l=10),
    )
    figure.update_yaxes(range=[0, 1])
    _apply_dark_theme(figure)
    return figure


def build_weight_change_figure(report: CorrelationReport) -> go.Figure:
    """Scatter of per-step |dW| against the live fitness that drove it."""

    title = "Weight change vs fitness"
    if report.fitness_correlation_defined:
        title += f" (r = {report.fitness_correlation:.3f})"
    scatter = go.Scatter(
        x=report.fitness,
        y=report.sum_abs_delta,
        mode="markers",
        marker=dict(color=PRIMARY_COLOR, size=5, opacity=0.6),
        hovertemplate="F=%{x:.3f}<br>|dW|=%{y:.6f}<extra></extra>",
    )
    figure = go.Figure(data=[scatter])
    figure.update_layout(
        title_text=title,
        xaxis_title="Live fitness F",
        yaxis_title="Sum |dW| per step",
        margin=dict(t=60, r=10, b=40, l=10),
    )
    figure.update_yaxes(rangemode="tozero")
    _apply_dark_theme(figure)
    return figure


def build_sensor_correlation_figure(report: CorrelationReport) -> go.Figure:
    """Bars of corr(|dW|, channel); undefined channels are left out."""

    channels = [channel for channel in report.sensor_correlations if channel not in report.undefined_channels]
    values = [report.sensor_correlations[channel] for channel in channels]
    bar = go.Bar(
        x=channels,
        y=values,
        marker_color=[LIGHT_COLOR if channel.startswith("light") else PRIMARY_COLOR for channel in channels],
        text=[f"{value:.2f}" for value in values],
        textposition="outside",
    )
    figure = go.Figure(data=[bar])
    figure.update_layout(
        title_text="Correlation of weight change with sensors",
        xaxis_title="Sensor",
        yaxis_title="Pearson r",
        margin=dict(t=60, r=10, b=60, l=10),
    )
    figure.update_yaxes(range=[-1, 1])
    _apply_dark_theme(figure)
    return figure


__all__ = [
    "PRIMARY_COLOR",
    "build_fitness_curve_figure",
    "build_sensor_correlation_figure",
    "build_trajectory_figure",
    "build_weight_change_figure",
]
