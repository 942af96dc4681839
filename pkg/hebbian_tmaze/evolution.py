from __future__ import annotations

import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from hebbian_tmaze.fitness import final_fitness, goal_reward, trial_fitness
from hebbian_tmaze.models import EvolutionRecord, GaConfig, GenerationStats, MazeSpec, SimulationSettings
from hebbian_tmaze.network import FloatArray, Genotype, NetworkTopology, genotype_length
from hebbian_tmaze.storage import read_checkpoint, write_checkpoint
from hebbian_tmaze.trial import run_trial
from hebbian_tmaze.world import correct_goal, with_light

LOGGER = logging.getLogger(__name__)


def training_mazes(maze: MazeSpec) -> list[MazeSpec]:
    """Both cue conditions: light present (turn right) and light absent (turn left)."""

    return [with_light(maze, True), with_light(maze, False)]


def derive_seed(master_seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([master_seed, *keys]).generate_state(1)[0])


def evaluate(
    genotype: Genotype,
    eval_mazes: Sequence[MazeSpec],
    seed: int,
    settings: Optional[SimulationSettings] = None,
    trials_per_eval: int = 1,
) -> float:
    """Mean trial fitness over every maze variant, plasticity disabled."""

    if not eval_mazes:
        raise ValueError("evaluate needs at least one maze.")
    scores: list[float] = []
    for maze in eval_mazes:
        goal = correct_goal(maze)
        for repeat in range(trials_per_eval):
            run = run_trial(genotype, maze, None, seed + repeat, settings)
            final_position = run.outcome.trajectory[-1]
            if run.samples:
                scores.append(trial_fitness(run.samples, final_position, goal))
            else:
                scores.append(final_fitness(0.0, goal_reward(final_position, goal)))
    return math.fsum(scores) / len(scores)


def _tournament(rng: np.random.Generator, fitness: FloatArray, size: int) -> int:
    entrants = rng.choice(fitness.shape[0], size=size, replace=False)
    return int(entrants[int(np.argmax(fitness[entrants]))])


def _offspring(rng: np.random.Generator, population: FloatArray, fitness: FloatArray, config: GaConfig) -> FloatArray:
    first = _tournament(rng, fitness, config.tournament_size)
    second = _tournament(rng, fitness, config.tournament_size)
    if rng.random() < config.crossover_rate:
        mask = rng.random(population.shape[1]) < 0.5
        child = np.where(mask, population[first], population[second])
    else:
        fitter = first if fitness[first] >= fitness[second] else second
        child = population[fitter].copy()
    mutate = rng.random(child.shape[0]) < config.mutation_rate
    child = child + mutate * rng.normal(0.0, config.mutation_sigma, child.shape[0])
    return np.clip(np.nan_to_num(child, nan=0.0, posinf=0.0, neginf=0.0), -config.gene_limit, config.gene_limit)


def _score(
    genotype: Genotype,
    seed: int,
    *,
    eval_mazes: Sequence[MazeSpec],
    settings: SimulationSettings,
    trials_per_eval: int,
) -> float:
    return evaluate(genotype, eval_mazes, seed, settings, trials_per_eval)


def _evaluate_all(
    genotypes: list[Genotype],
    eval_mazes: Sequence[MazeSpec],
    seeds: list[int],
    settings: SimulationSettings,
    trials_per_eval: int,
    executor: Optional[Executor],
) -> list[float]:
    job = partial(_score, eval_mazes=list(eval_mazes), settings=settings, trials_per_eval=trials_per_eval)
    if executor is None:
        return [job(genotype, seed) for genotype, seed in zip(genotypes, seeds)]
    return list(executor.map(job, genotypes, seeds))


def _checkpoint_payload(
    generation: int, population: FloatArray, fitness: FloatArray, rng: np.random.Generator, record: EvolutionRecord,
    config: GaConfig,
) -> dict[str, Any]:
    return {
        "next_generation": generation,
        "config": config.model_dump(mode="json"),
        "population": population.tolist(),
        "fitness": [None if math.isnan(value) else float(value) for value in fitness],
        "rng_state": rng.bit_generator.state,
        "record": record.model_dump(mode="json"),
    }


def evolve(
    config: GaConfig,
    eval_mazes: Sequence[MazeSpec],
    settings: Optional[SimulationSettings] = None,
    *,
    checkpoint_path: Optional[Path] = None,
    resume: bool = False,
) -> EvolutionRecord:
    """Generational GA with elitism, tournament selection, uniform crossover and Gaussian mutation."""

    topology = NetworkTopology()
    length = genotype_length(topology)
    base_settings = settings or SimulationSettings()
    eval_settings = base_settings.model_copy(update={"max_steps": config.max_steps})

    rng = np.random.default_rng(np.random.SeedSequence([config.master_seed, 0]))
    population = rng.uniform(-config.init_range, config.init_range, (config.population_size, length))
    fitness = np.full(config.population_size, np.nan)
    record = EvolutionRecord()
    start = 0

    if resume and checkpoint_path is not None and checkpoint_path.exists():
        payload = read_checkpoint(checkpoint_path)
        if payload.get("config") != config.model_dump(mode="json"):
            LOGGER.warning("Checkpoint %s was written with a different GA config; resuming anyway.", checkpoint_path)
        start = int(payload["next_generation"])
        population = np.array(payload["population"], dtype=np.float64)
        fitness = np.array([np.nan if value is None else value for value in payload["fitness"]], dtype=np.float64)
        rng.bit_generator.state = payload["rng_state"]
        record = EvolutionRecord.model_validate(payload["record"])
        LOGGER.info("Resuming evolution at generation %s from %s", start, checkpoint_path)

    executor: Optional[Executor] = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for generation in range(start, config.generations):
            pending = np.flatnonzero(np.isnan(fitness))
            genotypes = [Genotype.from_array(population[index], topology) for index in pending]
            seeds = [derive_seed(config.master_seed, 1, generation, int(index)) for index in pending]
            scores = _evaluate_all(genotypes, eval_mazes, seeds, eval_settings, config.trials_per_eval, executor)
            fitness[pending] = scores

            order = np.argsort(-fitness, kind="stable")
            best_index = int(order[0])
            stats = GenerationStats(
                generation=generation,
                best=float(fitness[best_index]),
                mean=float(np.mean(fitness)),
                min=float(np.min(fitness)),
                best_genotype=Genotype.from_array(population[best_index], topology),
            )
            record.generations.append(stats)
            LOGGER.info(
                "Generation %s/%s best=%.4f mean=%.4f min=%.4f",
                generation + 1,
                config.generations,
                stats.best,
                stats.mean,
                stats.min,
            )

            if generation + 1 < config.generations:
                elites = order[: config.elitism_count]
                children = [
                    _offspring(rng, population, fitness, config)
                    for _ in range(config.population_size - config.elitism_count)
                ]
                population = np.vstack([population[elites], *children]) if children else population[elites].copy()
                fitness = np.concatenate([fitness[elites], np.full(len(children), np.nan)])

                # Only mid-run states are checkpointed.
                if checkpoint_path is not None and config.checkpoint_every and (generation + 1) % config.checkpoint_every == 0:
                    write_checkpoint(
                        checkpoint_path,
                        _checkpoint_payload(generation + 1, population, fitness, rng, record, config),
                    )
    finally:
        if executor is not None:
            executor.shutdown()

    if record.generations:
        record.champion = max(record.generations, key=lambda entry: entry.best).best_genotype
    return record


__all__ = ["derive_seed", "evaluate", "evolve", "training_mazes"]
