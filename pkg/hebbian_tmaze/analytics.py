from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from hebbian_tmaze.constants import SENSOR_CHANNELS
from hebbian_tmaze.models import TrialMetrics
from hebbian_tmaze.network import FloatArray
from hebbian_tmaze.plasticity import WeightChangeEntry


@dataclass
class CorrelationReport:
    steps: list[int]
    fitness: list[float]
    sum_abs_delta: list[float]
    fitness_correlation: float
    fitness_correlation_defined: bool
    sensor_correlations: dict[str, float] = field(default_factory=dict)
    undefined_channels: list[str] = field(default_factory=list)


@dataclass
class MetricSummary:
    label: str
    trials: int
    success_rate: float
    mean_path_length: float
    mean_final_error: float
    mean_weight_change: float | None


def pearson(first: Sequence[float] | FloatArray, second: Sequence[float] | FloatArray) -> float:
    """Pearson correlation; ``nan`` when either series has zero variance or fewer than two points."""

    x = np.asarray(first, dtype=np.float64)
    y = np.asarray(second, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"Series lengths differ: {x.shape} vs {y.shape}.")
    if x.size < 2 or np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return math.nan
    return float(np.clip(np.corrcoef(x, y)[0, 1], -1.0, 1.0))


def correlation_report(
    weight_log: Sequence[WeightChangeEntry], sensor_log: Sequence[Sequence[float]] | FloatArray
) -> CorrelationReport:
    """Relate per-step |dW| to the live fitness and to every sensor channel of the same trial."""

    sensors = np.asarray(sensor_log, dtype=np.float64).reshape(-1, len(SENSOR_CHANNELS)) if len(sensor_log) else None
    sensor_rows = 0 if sensors is None else sensors.shape[0]
    if sensor_rows != len(weight_log):
        raise ValueError(f"Weight log has {len(weight_log)} steps but sensor log has {sensor_rows}.")

    fitness = [entry.fitness for entry in weight_log]
    changes = [entry.sum_abs_delta for entry in weight_log]
    fitness_correlation = pearson(fitness, changes)

    sensor_correlations: dict[str, float] = {}
    undefined: list[str] = []
    for index, channel in enumerate(SENSOR_CHANNELS):
        value = pearson(sensors[:, index], changes) if sensors is not None else math.nan
        sensor_correlations[channel] = value
        if math.isnan(value):
            undefined.append(channel)

    return CorrelationReport(
        steps=[entry.step for entry in weight_log],
        fitness=fitness,
        sum_abs_delta=changes,
        fitness_correlation=fitness_correlation,
        fitness_correlation_defined=not math.isnan(fitness_correlation),
        sensor_correlations=sensor_correlations,
        undefined_channels=undefined,
    )


def summarize_metrics(rows: Iterable[tuple[str, TrialMetrics]]) -> list[MetricSummary]:
    """Aggregate metric rows by label, keeping first-seen label order."""

    grouped: defaultdict[str, list[TrialMetrics]] = defaultdict(list)
    for label, metrics in rows:
        grouped[label].append(metrics)

    summaries: list[MetricSummary] = []
    for label, items in grouped.items():
        changes = [item.weight_change_per_step for item in items if item.weight_change_per_step is not None]
        summaries.append(
            MetricSummary(
                label=label,
                trials=len(items),
                success_rate=sum(item.success for item in items) / len(items),
                mean_path_length=math.fsum(item.path_length for item in items) / len(items),
                mean_final_error=math.fsum(item.final_position_error for item in items) / len(items),
                mean_weight_change=math.fsum(changes) / len(changes) if changes else None,
            )
        )
    return summaries


__all__ = ["CorrelationReport", "MetricSummary", "correlation_report", "pearson", "summarize_metrics"]
