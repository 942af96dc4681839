from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

import pandas as pd
import streamlit as st

from hebbian_tmaze.analytics import correlation_report
from hebbian_tmaze.charts import (
    build_fitness_curve_figure,
    build_sensor_correlation_figure,
    build_trajectory_figure,
    build_weight_change_figure,
)
from hebbian_tmaze.config import RuntimeSettings
from hebbian_tmaze.harness import build_trial_maze, group_trial_ids, load_sensor_log, load_weight_log
from hebbian_tmaze.models import ExperimentConfig, MazeSpec
from hebbian_tmaze.storage import StorageError, read_csv_floats, read_world_file
from hebbian_tmaze.world import build_t_maze

EXPERIMENT_PAGE = "Experiment"
EVOLUTION_PAGE = "Evolution"


@st.cache_data(show_spinner=False)
def _load_summary(output_dir: str) -> Optional[dict[str, Any]]:
    path = Path(output_dir) / "summary.json"
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def _base_maze(config: ExperimentConfig) -> MazeSpec:
    if config.world_path is None:
        return build_t_maze()
    maze, _ = read_world_file(config.world_path)
    return maze


def render_navigation() -> str:
    st.sidebar.title("Navigation")
    selection = st.sidebar.radio("Choose section", [EXPERIMENT_PAGE, EVOLUTION_PAGE], label_visibility="collapsed")
    st.sidebar.divider()
    return str(selection)


def render_experiment_page(output_dir: Path) -> None:
    summary = _load_summary(str(output_dir))
    if summary is None:
        st.info(f"No summary.json under {output_dir}. Run `python -m hebbian_tmaze run` first.")
        return

    config = ExperimentConfig.model_validate(summary["config"])
    st.subheader(f"Trials ({config.mode.value})")
    metrics_path = output_dir / "metrics.csv"
    if metrics_path.exists():
        st.dataframe(pd.read_csv(metrics_path, na_values=["NA"]), hide_index=True, width="stretch")

    trial_ids = [row["trial"] for row in summary.get("trials", [])]
    if not trial_ids:
        st.caption("The experiment contains no trials.")
        return

    selected = st.multiselect("Trajectories", trial_ids, default=trial_ids[:2])
    try:
        base = _base_maze(config)
    except StorageError as exc:
        st.error(str(exc))
        return

    trajectories: dict[str, list[tuple[float, float]]] = {}
    for trial_id in selected:
        columns = read_csv_floats(output_dir / "trials" / trial_id / "trajectory.csv")
        trajectories[trial_id] = list(zip(columns["x"], columns["y"]))
    for spec, group in group_trial_ids(config.trials, selected):
        maze = build_trial_maze(base, spec) if spec is not None else base
        title = f"Trajectories: {spec.name}" if spec is not None else "Trajectories"
        figure = build_trajectory_figure(maze, {trial_id: trajectories[trial_id] for trial_id in group}, title=title)
        st.plotly_chart(figure, width="stretch")

    weight_trials = [trial_id for trial_id in trial_ids if (output_dir / "trials" / trial_id / "weights.csv").exists()]
    if not weight_trials:
        st.caption("No weight logs: the experiment ran without plasticity.")
        return
    trial_id = st.selectbox("Weight change", weight_trials)
    trial_dir = output_dir / "trials" / str(trial_id)
    report = correlation_report(load_weight_log(trial_dir), load_sensor_log(trial_dir))
    left, right = st.columns(2)
    with left:
        st.plotly_chart(build_weight_change_figure(report), width="stretch")
    with right:
        st.plotly_chart(build_sensor_correlation_figure(report), width="stretch")
    if report.undefined_channels:
        st.caption(f"Constant channels (correlation undefined): {', '.join(report.undefined_channels)}")


def render_evolution_page(evolution_dir: Path) -> None:
    stats_path = evolution_dir / "stats.csv"
    if not stats_path.exists():
        st.info(f"No stats.csv under {evolution_dir}. Run `python -m hebbian_tmaze evolve` first.")
        return
    stats = read_csv_floats(stats_path)
    st.plotly_chart(build_fitness_curve_figure(stats), width="stretch")
    if stats["best"]:
        st.metric("Best fitness", f"{max(stats['best']):.4f}")


def main() -> None:
    st.set_page_config(
        page_title="Hebbian T-maze",
        page_icon="🧭",
        layout="wide",
        initial_sidebar_state="expanded",
    )
    runtime = RuntimeSettings.from_env()
    selection = render_navigation()
    st.title("Hebbian T-maze")

    if selection == EXPERIMENT_PAGE:
        output_dir = Path(st.sidebar.text_input("Experiment directory", str(runtime.output_dir / "experiment")))
        render_experiment_page(output_dir)
    else:
        evolution_dir = Path(st.sidebar.text_input("Evolution directory", str(runtime.output_dir / "evolution")))
        render_evolution_page(evolution_dir)


if __name__ == "__main__":
    main()
