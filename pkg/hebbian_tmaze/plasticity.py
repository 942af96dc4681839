"""Fitness-modulated Hebbian adaptation with eligibility traces and per-trial revert."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from hebbian_tmaze.models import PlasticityConfig
from hebbian_tmaze.network import ControllerState, FloatArray, Genotype, NetworkTopology, TopologyMismatchError


class PlasticityStateError(RuntimeError):
    """Raised when trial bookkeeping is used out of order."""


@dataclass(frozen=True)
class WeightChangeEntry:
    step: int
    fitness: float
    effective_rate: float
    sum_abs_delta: float
    max_abs_weight: float


@dataclass
class PlasticityState:
    traces: list[FloatArray]
    original_genome: Optional[Genotype] = None
    cumulative_abs_change: float = 0.0
    updates: int = 0
    log: list[WeightChangeEntry] = field(default_factory=list)

    @classmethod
    def for_topology(cls, topology: NetworkTopology) -> "PlasticityState":
        sizes = topology.layer_sizes
        return cls(traces=[np.zeros((fan_out, fan_in)) for fan_in, fan_out in zip(sizes[:-1], sizes[1:])])

    @property
    def mean_abs_change(self) -> float:
        return self.cumulative_abs_change / self.updates if self.updates else 0.0


def effective_rate(base_rate: float, fitness: float, *, floor: float = 0.2) -> float:
    """N_e = N * max(floor, F) with F clamped to [0, 1]."""

    clamped = min(1.0, max(0.0, fitness))
    return base_rate * max(floor, clamped)


def update_traces(
    state: PlasticityState, activations: Sequence[FloatArray], config: PlasticityConfig | None = None
) -> list[FloatArray]:
    """Decay every trace and add the post x pre co-activation of the latest pass."""

    active = config or PlasticityConfig()
    if len(activations) != len(state.traces) + 1:
        raise TopologyMismatchError(
            f"Expected {len(state.traces) + 1} activation vectors, received {len(activations)}."
        )
    for index, trace in enumerate(state.traces):
        pre = activations[index]
        post = activations[index + 1]
        if trace.shape != (post.shape[0], pre.shape[0]):
            raise TopologyMismatchError(f"Trace {index} has shape {trace.shape}, activations give {(post.size, pre.size)}.")
        trace *= active.trace_decay
        trace += active.trace_update * np.outer(post, pre)
    return state.traces


def apply_update(
    state: PlasticityState,
    controller: ControllerState,
    rate: float,
    config: PlasticityConfig | None = None,
) -> float:
    """Add ``rate * trace`` to every synapse, clip to +-W_max, and return the pre-clip sum |dW|.

    Biases are never touched. A zero rate leaves the weights bit-identical.
    """

    if rate < 0:
        raise ValueError("Hebbian rate must be non-negative.")
    state.updates += 1
    if rate == 0.0:
        return 0.0

    clip = (config or PlasticityConfig()).weight_clip
    step_change = 0.0
    for index, trace in enumerate(state.traces):
        synapses = controller.synapses(index)
        delta = rate * trace
        step_change += float(np.abs(delta).sum())
        np.clip(synapses + delta, -clip, clip, out=synapses)
    state.cumulative_abs_change += step_change
    return step_change


def begin_trial(state: PlasticityState, genotype: Genotype) -> PlasticityState:
    if state.original_genome is not None:
        raise PlasticityStateError("begin_trial called twice without end_trial.")
    state.original_genome = genotype
    for trace in state.traces:
        trace.fill(0.0)
    state.cumulative_abs_change = 0.0
    state.updates = 0
    state.log = []
    return state


def end_trial(state: PlasticityState, controller: ControllerState) -> float:
    """Restore the controller from the snapshot and return the trial's cumulative |dW|."""

    if state.original_genome is None:
        raise PlasticityStateError("end_trial called without begin_trial.")
    controller.effective_weights[:] = state.original_genome.weights
    state.original_genome = None
    return state.cumulative_abs_change


def max_abs_synapse(controller: ControllerState) -> float:
    return max(float(np.abs(controller.synapses(index)).max()) for index in range(len(controller.matrices)))


class HebbianAdapter:
    """Couples one controller to its plasticity state for a single trial at a time."""

    def __init__(self, controller: ControllerState, config: PlasticityConfig) -> None:
        self.controller = controller
        self.config = config
        self.state = PlasticityState.for_topology(controller.topology)

    def begin(self, genotype: Genotype) -> None:
        begin_trial(self.state, genotype)

    def observe(self, step: int, fitness: float) -> WeightChangeEntry:
        """Run one plasticity step with this step's activations and live fitness."""

        update_traces(self.state, self.controller.layer_activations, self.config)
        rate = effective_rate(self.config.base_rate, fitness, floor=self.config.fitness_floor)
        change = apply_update(self.state, self.controller, rate, self.config)
        entry = WeightChangeEntry(
            step=step,
            fitness=min(1.0, max(0.0, fitness)),
            effective_rate=rate,
            sum_abs_delta=change,
            max_abs_weight=max_abs_synapse(self.controller),
        )
        self.state.log.append(entry)
        return entry

    def end(self) -> tuple[float, float, list[WeightChangeEntry]]:
        log = self.state.log
        per_step = self.state.mean_abs_change
        cumulative = end_trial(self.state, self.controller)
        return cumulative, per_step, log


__all__ = [
    "HebbianAdapter",
    "PlasticityState",
    "PlasticityStateError",
    "WeightChangeEntry",
    "apply_update",
    "begin_trial",
    "effective_rate",
    "end_trial",
    "max_abs_synapse",
    "update_traces",
]
