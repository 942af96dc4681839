from __future__ import annotations

import json
from pathlib import Path

import pytest

from hebbian_tmaze.evolution import evolve, training_mazes
from hebbian_tmaze.harness import (
    METRICS_HEADER,
    SWEEP_HEADER,
    build_trial_maze,
    dimming_trials,
    experiment_dirs,
    format_summary_table,
    group_trial_ids,
    obstacle_trials,
    report_experiment,
    resolve_trials,
    run_experiment,
    run_sweep,
    sweep_variants,
    trials_for,
)
from hebbian_tmaze.models import (
    ControllerMode,
    ExperimentConfig,
    GaConfig,
    MazeSpec,
    PlasticityConfig,
    SimulationSettings,
    TrialSpec,
    TurnDirection,
)
from hebbian_tmaze.network import Genotype
from hebbian_tmaze.storage import StorageError, read_csv, write_genome_file, write_world_file
from hebbian_tmaze.trial import run_trial
from hebbian_tmaze.world import build_t_maze


@pytest.fixture()
def inputs(tmp_path, random_genotype) -> tuple[Path, Path]:
    world = write_world_file(tmp_path / "world.json", build_t_maze(), SimulationSettings(max_steps=25))
    genome = write_genome_file(tmp_path / "genome.json", random_genotype(seed=17))
    return world, genome


def _config(inputs: tuple[Path, Path], output_dir: Path, **overrides: object) -> ExperimentConfig:
    world, genome = inputs
    values: dict[str, object] = {
        "world_path": world,
        "genome_path": genome,
        "trials": trials_for(),
        "output_dir": output_dir,
    }
    values.update(overrides)
    return ExperimentConfig.model_validate(values)


def test_presets_cover_both_directions() -> None:
    dimming = dimming_trials()
    obstacles = obstacle_trials()

    assert [(spec.direction, spec.luminosity) for spec in dimming] == [
        (TurnDirection.LEFT, 1.0),
        (TurnDirection.RIGHT, 1.0),
        (TurnDirection.LEFT, 0.1),
        (TurnDirection.RIGHT, 0.1),
    ]
    assert sorted({spec.obstacles for spec in obstacles}) == [0, 2, 4]
    assert len(obstacles) == 6
    assert len({spec.name for spec in dimming}) == 4
    assert len({spec.name for spec in obstacles}) == 6


def test_resolve_trials() -> None:
    assert resolve_trials(None, luminosity=0.5, obstacles=2) == trials_for(luminosity=0.5, obstacles=2)
    assert resolve_trials("dimming", luminosity=1.0, obstacles=0) == dimming_trials()
    with pytest.raises(ValueError):
        resolve_trials("fog", luminosity=1.0, obstacles=0)


def test_build_trial_maze_applies_every_perturbation() -> None:
    base = build_t_maze()
    spec = TrialSpec(name="left_dim", direction=TurnDirection.LEFT, luminosity=0.1, obstacles=2)

    maze = build_trial_maze(base, spec)

    assert maze.light_source is None
    assert maze.ambient_luminosity == pytest.approx(0.01)
    assert len(maze.obstacles) == 2

    right = build_trial_maze(base, spec.model_copy(update={"direction": TurnDirection.RIGHT}))
    assert right.light_source is not None
    assert right.light_source.intensity == pytest.approx(0.1)


def test_hebbian_experiment_writes_all_outputs(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "hebbian"

    result = run_experiment(_config(inputs, out, seeds=[0, 1]))

    assert len(result.rows) == 4
    header, rows = read_csv(out / "metrics.csv")
    assert tuple(header) == METRICS_HEADER
    assert len(rows) == 4
    assert all(row[header.index("mode")] == "hebbian" for row in rows)
    assert all(row[header.index("weight_change_cumulative")] != "NA" for row in rows)

    trial_dir = out / "trials" / result.rows[0].trial_id
    for name in ("trajectory.csv", "fitness.csv", "sensors.csv", "weights.csv"):
        assert (trial_dir / name).exists()
    trajectory_header, trajectory = read_csv(trial_dir / "trajectory.csv")
    assert trajectory_header == ["step", "t", "x", "y", "heading", "success_flag"]
    assert len(trajectory) == result.rows[0].metrics.steps_taken + 1

    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["config"]["mode"] == "hebbian"
    assert len(summary["inputs"]["genome"]) == 40
    assert [row["trial"] for row in summary["trials"]] == [row.trial_id for row in result.rows]


def test_ga_experiment_reports_missing_weight_change(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "ga"

    run_experiment(_config(inputs, out, mode=ControllerMode.GA))

    header, rows = read_csv(out / "metrics.csv")
    assert all(row[header.index("weight_change_per_step")] == "NA" for row in rows)
    assert not list((out / "trials").glob("*/weights.csv"))


def test_rerun_is_byte_identical(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "repeat"
    config = _config(inputs, out, plasticity=PlasticityConfig(base_rate=0.05))

    run_experiment(config)
    first = {path.relative_to(out): path.read_bytes() for path in sorted(out.rglob("*.csv"))}
    first_summary = (out / "summary.json").read_bytes()
    run_experiment(config)

    assert {path.relative_to(out): path.read_bytes() for path in sorted(out.rglob("*.csv"))} == first
    assert (out / "summary.json").read_bytes() == first_summary


def test_empty_trial_list_gives_empty_table(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "empty"

    result = run_experiment(_config(inputs, out, trials=[]))

    header, rows = read_csv(out / "metrics.csv")
    assert result.rows == []
    assert rows == []
    assert "Mode:" in format_summary_table(result)


def test_missing_genome_is_a_storage_error(tmp_path, inputs: tuple[Path, Path]) -> None:
    with pytest.raises(StorageError):
        run_experiment(_config(inputs, tmp_path / "out", genome_path=tmp_path / "absent.json"))


def test_report_writes_correlation_tables(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "report"
    run_experiment(_config(inputs, out, plasticity=PlasticityConfig(base_rate=0.05)))

    reports = report_experiment(out)

    assert set(reports) == {"left_lum1_obs0_seed0", "right_lum1_obs0_seed0"}
    header, rows = read_csv(out / "trials" / "left_lum1_obs0_seed0" / "correlation.csv")
    assert header == ["signal", "correlation", "defined"]
    assert [row[0] for row in rows][:2] == ["F", "light_0"]
    assert len(rows) == 17


def test_report_on_zero_genome_marks_correlations_undefined(tmp_path, inputs: tuple[Path, Path]) -> None:
    world, _ = inputs
    genome = write_genome_file(tmp_path / "zero.json", Genotype.zeros())
    out = tmp_path / "zero"
    run_experiment(_config((world, genome), out))

    reports = report_experiment(out)

    for report in reports.values():
        assert not report.fitness_correlation_defined
        assert all(value == 0.0 for value in report.sum_abs_delta)
    _, rows = read_csv(out / "trials" / "left_lum1_obs0_seed0" / "correlation.csv")
    assert rows[0] == ["F", "NA", "0"]


def test_report_without_trials_directory_fails(tmp_path) -> None:
    with pytest.raises(StorageError):
        report_experiment(tmp_path)


def test_default_maze_fixture_matches_builder(default_maze: MazeSpec) -> None:
    assert default_maze == build_t_maze()


def test_ga_trajectories_match_hebbian_with_zero_rate(tmp_path, inputs: tuple[Path, Path]) -> None:
    ga_out = tmp_path / "ga"
    zero_out = tmp_path / "zero_rate"

    run_experiment(_config(inputs, ga_out, mode=ControllerMode.GA))
    run_experiment(_config(inputs, zero_out, plasticity=PlasticityConfig(base_rate=0.0)))

    for trial_dir in sorted((ga_out / "trials").iterdir()):
        mirror = zero_out / "trials" / trial_dir.name
        assert (trial_dir / "trajectory.csv").read_bytes() == (mirror / "trajectory.csv").read_bytes()


def test_doubling_the_rate_doubles_weight_change(default_maze: MazeSpec, fast_settings, random_genotype) -> None:
    genotype = random_genotype(seed=5)
    maze = build_trial_maze(default_maze, trials_for()[1])

    single = run_trial(genotype, maze, PlasticityConfig(base_rate=1e-8), seed=0, settings=fast_settings)
    double = run_trial(genotype, maze, PlasticityConfig(base_rate=2e-8), seed=0, settings=fast_settings)

    assert single.weight_log is not None and double.weight_log is not None
    assert len(single.weight_log) == len(double.weight_log) > 0
    for first, second in zip(single.weight_log, double.weight_log):
        assert second.sum_abs_delta == pytest.approx(2 * first.sum_abs_delta, rel=1e-4, abs=1e-18)


def test_summary_groups_seeds_by_configuration(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "configurations"

    result = run_experiment(_config(inputs, out, seeds=[0, 1]))

    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    configurations = summary["configurations"]
    assert [entry["label"] for entry in configurations] == ["left_lum1_obs0", "right_lum1_obs0"]
    assert all(entry["trials"] == 2 for entry in configurations)
    assert all(0.0 <= entry["success_rate"] <= 1.0 for entry in configurations)
    assert all(entry["mean_weight_change"] is not None for entry in configurations)

    table = format_summary_table(result)
    assert table.splitlines()[0] == "Mode: GA + Hebbian (N = 0.002)"
    assert "configuration" in table
    assert sum(line.startswith("right_lum1_obs0 ") for line in table.splitlines()) == 1


def test_group_trial_ids_keeps_first_seen_order() -> None:
    left, right = trials_for()
    trial_ids = ["right_lum1_obs0_seed0", "left_lum1_obs0_seed1", "right_lum1_obs0_seed2", "mystery_seed0"]

    groups = group_trial_ids([left, right], trial_ids)

    assert groups == [
        (right, ["right_lum1_obs0_seed0", "right_lum1_obs0_seed2"]),
        (left, ["left_lum1_obs0_seed1"]),
        (None, ["mystery_seed0"]),
    ]


def test_sweep_variants_run_ga_once_and_drop_duplicates() -> None:
    variants = sweep_variants(
        [ControllerMode.HEBBIAN, ControllerMode.GA, ControllerMode.HEBBIAN], [0.001, 0.001, 0.002]
    )

    assert variants == [
        (ControllerMode.HEBBIAN, 0.001),
        (ControllerMode.HEBBIAN, 0.002),
        (ControllerMode.GA, None),
    ]
    assert sweep_variants([ControllerMode.HEBBIAN], []) == []


def test_sweep_without_variants_is_rejected(tmp_path, inputs: tuple[Path, Path]) -> None:
    with pytest.raises(ValueError):
        run_sweep(_config(inputs, tmp_path / "none"), [ControllerMode.HEBBIAN], [])


def test_single_variant_sweep_writes_into_output_dir(tmp_path, inputs: tuple[Path, Path]) -> None:
    out = tmp_path / "single"

    results = run_sweep(_config(inputs, out), [ControllerMode.HEBBIAN], [0.01])

    assert len(results) == 1
    assert results[0].base_rate == pytest.approx(0.01)
    assert (out / "metrics.csv").exists()
    _, rows = read_csv(out / "sweep.csv")
    assert [row[0] for row in rows] == ["hebbian_0.01", "hebbian_0.01"]


def test_negative_rate_in_sweep_is_rejected(tmp_path, inputs: tuple[Path, Path]) -> None:
    with pytest.raises(ValueError):
        run_sweep(_config(inputs, tmp_path / "negative"), [ControllerMode.HEBBIAN], [0.01, -0.5])

    assert not (tmp_path / "negative").exists()


def test_experiment_dirs_finds_sweep_variants(tmp_path) -> None:
    for name in ("hebbian_0.001", "ga"):
        (tmp_path / "sweep" / name / "trials").mkdir(parents=True)
    (tmp_path / "sweep" / "notes").mkdir()
    (tmp_path / "single" / "trials").mkdir(parents=True)
    (tmp_path / "empty").mkdir()

    assert experiment_dirs(tmp_path / "sweep") == [tmp_path / "sweep" / "ga", tmp_path / "sweep" / "hebbian_0.001"]
    assert experiment_dirs(tmp_path / "single") == [tmp_path / "single"]
    assert experiment_dirs(tmp_path / "empty") == [tmp_path / "empty"]
    assert experiment_dirs(tmp_path / "missing") == [tmp_path / "missing"]


@pytest.mark.slow
def test_rate_sweep_on_an_evolved_controller(tmp_path, inputs: tuple[Path, Path]) -> None:
    world, _ = inputs
    ga = GaConfig(population_size=4, generations=1, elitism_count=1, max_steps=5)
    record = evolve(ga, training_mazes(build_t_maze()), SimulationSettings(max_steps=5))
    assert record.champion is not None
    genome = write_genome_file(tmp_path / "champion.json", record.champion)
    out = tmp_path / "sweep"
    config = _config((world, genome), out, seeds=[0, 1])

    results = run_sweep(config, [ControllerMode.GA, ControllerMode.HEBBIAN], [1e-5, 1e-4])

    assert [result.output_dir.name for result in results] == ["ga", "hebbian_1e-05", "hebbian_0.0001"]
    for result in results:
        _, rows = read_csv(result.metrics_path)
        assert len(rows) == len(config.trials) * len(config.seeds)
        assert {(row[0], row[4]) for row in rows} == {
            (spec.name, str(seed)) for spec in config.trials for seed in config.seeds
        }
    header, rows = read_csv(out / "sweep.csv")
    assert tuple(header) == SWEEP_HEADER
    assert len(rows) == len(results) * len(config.trials)
    assert {row[0] for row in rows} == {"ga", "hebbian_1e-05", "hebbian_0.0001"}
    assert all(row[header.index("mean_weight_change")] == "NA" for row in rows if row[0] == "ga")
