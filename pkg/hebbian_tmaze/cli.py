"""Command-line entry point: evolve a controller, run experiments, report correlations."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from hebbian_tmaze.config import ConfigError, RuntimeSettings, configure_logging
from hebbian_tmaze.evolution import evolve, training_mazes
from hebbian_tmaze.harness import experiment_dirs, format_summary_table, report_experiment, resolve_trials, run_sweep
from hebbian_tmaze.models import ControllerMode, ExperimentConfig, GaConfig, MazeSpec, PlasticityConfig, SimulationSettings
from hebbian_tmaze.network import TopologyMismatchError
from hebbian_tmaze.storage import StorageError, read_world_file, write_csv, write_genome_file, write_world_file
from hebbian_tmaze.world import build_t_maze

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
STATS_HEADER = ("generation", "best", "mean", "min")


def build_parser(runtime: RuntimeSettings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hebbian-tmaze",
        description="Evolve MLP controllers for the light-cued T-maze and test them with Hebbian adaptation.",
    )
    parser.add_argument("--log-level", default=runtime.log_level, help="Logging level (default from TMAZE_LOG_LEVEL).")
    commands = parser.add_subparsers(dest="command", required=True)

    evolve_parser = commands.add_parser("evolve", help="Train a controller with the genetic algorithm.")
    evolve_parser.add_argument("--world", type=Path, help="World file (JSON or TOML); default T-maze if omitted.")
    evolve_parser.add_argument("--seed", type=int, default=0, help="Master seed.")
    evolve_parser.add_argument("--generations", type=int, default=GaConfig().generations)
    evolve_parser.add_argument("--population", type=int, default=GaConfig().population_size)
    evolve_parser.add_argument("--elites", type=int, default=GaConfig().elitism_count)
    evolve_parser.add_argument("--max-steps", type=int, default=GaConfig().max_steps, help="Step cap per evaluation.")
    evolve_parser.add_argument("--workers", type=int, default=runtime.workers)
    evolve_parser.add_argument("--checkpoint-every", type=int, default=0, help="Write a checkpoint every k generations.")
    evolve_parser.add_argument("--resume", action="store_true", help="Continue from the checkpoint in --out.")
    evolve_parser.add_argument("--out", type=Path, default=runtime.output_dir / "evolution")

    run_parser = commands.add_parser("run", help="Run test trials with an evolved genome.")
    run_parser.add_argument("--world", type=Path)
    run_parser.add_argument("--genome", type=Path, required=True)
    run_parser.add_argument(
        "--mode",
        choices=[mode.value for mode in ControllerMode],
        nargs="+",
        default=[ControllerMode.HEBBIAN.value],
        help="One or more controller modes; several run side by side under --out.",
    )
    run_parser.add_argument(
        "--base-rate",
        type=float,
        nargs="+",
        default=[PlasticityConfig().base_rate],
        help="One or more Hebbian base rates; each gets its own run directory.",
    )
    run_parser.add_argument("--luminosity", type=float, default=1.0)
    run_parser.add_argument("--obstacles", type=int, default=0)
    run_parser.add_argument("--preset", choices=["dimming", "obstacles"], help="Replace single trials with a preset.")
    run_parser.add_argument("--seed", type=int, nargs="+", default=[0], help="One or more trial seeds.")
    run_parser.add_argument("--workers", type=int, default=runtime.workers)
    run_parser.add_argument("--out", type=Path, default=runtime.output_dir / "experiment")

    report_parser = commands.add_parser("report", help="Write correlation tables for a finished experiment.")
    report_parser.add_argument("--out", type=Path, default=runtime.output_dir / "experiment")

    world_parser = commands.add_parser("world", help="Write the default T-maze world file.")
    world_parser.add_argument("--out", type=Path, default=Path("world.json"))
    return parser


def _load_world(path: Optional[Path]) -> tuple[MazeSpec, SimulationSettings]:
    if path is None:
        return build_t_maze(), SimulationSettings()
    return read_world_file(path)


def command_evolve(args: argparse.Namespace) -> int:
    maze, settings = _load_world(args.world)
    config = GaConfig(
        population_size=args.population,
        generations=args.generations,
        elitism_count=args.elites,
        master_seed=args.seed,
        max_steps=args.max_steps,
        workers=args.workers,
        checkpoint_every=args.checkpoint_every,
    )
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    record = evolve(
        config,
        training_mazes(maze),
        settings,
        checkpoint_path=out / "checkpoint.json",
        resume=args.resume,
    )
    write_csv(
        out / "stats.csv",
        STATS_HEADER,
        ((entry.generation, entry.best, entry.mean, entry.min) for entry in record.generations),
    )
    if record.champion is not None:
        write_genome_file(out / "champion.json", record.champion)
    print(f"Best fitness {max(record.best_series):.4f} after {len(record.generations)} generations; output in {out}")
    return EXIT_OK


def command_run(args: argparse.Namespace) -> int:
    modes = [ControllerMode(value) for value in args.mode]
    rates = list(args.base_rate)
    config = ExperimentConfig(
        world_path=args.world,
        genome_path=args.genome,
        mode=modes[0],
        plasticity=PlasticityConfig(base_rate=rates[0]),
        trials=resolve_trials(args.preset, luminosity=args.luminosity, obstacles=args.obstacles),
        seeds=list(args.seed),
        output_dir=args.out,
        workers=args.workers,
    )
    results = run_sweep(config, modes, rates)
    print("\n\n".join(format_summary_table(result) for result in results))
    return EXIT_OK


def command_report(args: argparse.Namespace) -> int:
    directories = experiment_dirs(args.out)
    printed = False
    for directory in directories:
        prefix = f"{directory.name}/" if directory != args.out else ""
        for name, report in report_experiment(directory).items():
            fitness_text = f"{report.fitness_correlation:+.3f}" if report.fitness_correlation_defined else "undefined"
            print(f"{prefix}{name}: corr(|dW|, F) = {fitness_text}; undefined channels: {len(report.undefined_channels)}")
            printed = True
    if not printed:
        print(f"No Hebbian trials with weight logs under {args.out}.")
    return EXIT_OK


def command_world(args: argparse.Namespace) -> int:
    target = write_world_file(args.out, build_t_maze(), SimulationSettings())
    print(f"Wrote default world to {target}")
    return EXIT_OK


COMMANDS = {
    "evolve": command_evolve,
    "run": command_run,
    "report": command_report,
    "world": command_world,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        runtime = RuntimeSettings.from_env()
    except ConfigError as exc:
        print(f"Configuration error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    args = build_parser(runtime).parse_args(argv)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except (StorageError, ConfigError, TopologyMismatchError, ValidationError) as exc:
        LOGGER.debug("Command %s failed", args.command, exc_info=True)
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


__all__ = ["build_parser", "main"]
