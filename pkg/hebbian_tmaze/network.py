from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hebbian_tmaze.constants import DEFAULT_LAYER_SIZES

FloatArray = NDArray[np.float64]


class TopologyMismatchError(ValueError):
    """Raised when weights, sensors or states disagree with a network topology."""


class NetworkTopology(BaseModel):
    """Neuron counts per layer, input to output."""

    model_config = ConfigDict(frozen=True)

    layer_sizes: tuple[int, ...] = Field(default=DEFAULT_LAYER_SIZES)

    @model_validator(mode="after")
    def _validate_sizes(self) -> "NetworkTopology":
        if len(self.layer_sizes) < 2:
            raise ValueError("A topology needs at least an input and an output layer.")
        if any(size < 1 for size in self.layer_sizes):
            raise ValueError(f"Layer sizes must be positive: {self.layer_sizes}")
        return self

    @property
    def input_size(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_size(self) -> int:
        return self.layer_sizes[-1]


def genotype_length(topology: NetworkTopology) -> int:
    """Number of genes: one weight per synapse plus one bias per non-input neuron."""

    sizes = topology.layer_sizes
    return sum((fan_in + 1) * fan_out for fan_in, fan_out in zip(sizes[:-1], sizes[1:]))


class Genotype(BaseModel):
    """Immutable flat weight vector; layer-major, row per post-synaptic neuron, bias last."""

    model_config = ConfigDict(frozen=True)

    topology: NetworkTopology = Field(default_factory=NetworkTopology)
    weights: tuple[float, ...]

    @field_validator("topology", mode="before")
    @classmethod
    def _coerce_topology(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return NetworkTopology(layer_sizes=tuple(value))
        return value

    @model_validator(mode="after")
    def _validate_weights(self) -> "Genotype":
        expected = genotype_length(self.topology)
        if len(self.weights) != expected:
            raise ValueError(
                f"Genotype has {len(self.weights)} weights, topology {list(self.topology.layer_sizes)} needs {expected}."
            )
        if not all(math.isfinite(value) for value in self.weights):
            raise ValueError("Genotype weights must be finite.")
        return self

    @classmethod
    def zeros(cls, topology: NetworkTopology | None = None) -> "Genotype":
        active = topology or NetworkTopology()
        return cls(topology=active, weights=(0.0,) * genotype_length(active))

    @classmethod
    def from_array(cls, weights: Sequence[float] | FloatArray, topology: NetworkTopology | None = None) -> "Genotype":
        return cls(topology=topology or NetworkTopology(), weights=tuple(float(value) for value in weights))

    def as_array(self) -> FloatArray:
        return np.array(self.weights, dtype=np.float64)

    def to_payload(self) -> dict[str, list[int] | list[float]]:
        """Return the on-disk genome layout ``{"topology": [...], "weights": [...]}``."""

        return {"topology": list(self.topology.layer_sizes), "weights": list(self.weights)}


@dataclass(frozen=True)
class LayerSlice:
    offset: int
    fan_in: int
    fan_out: int

    @property
    def size(self) -> int:
        return (self.fan_in + 1) * self.fan_out

    @property
    def end(self) -> int:
        return self.offset + self.size


def layer_slices(topology: NetworkTopology) -> list[LayerSlice]:
    slices: list[LayerSlice] = []
    offset = 0
    sizes = topology.layer_sizes
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        current = LayerSlice(offset=offset, fan_in=fan_in, fan_out=fan_out)
        slices.append(current)
        offset = current.end
    return slices


def layer_views(weights: FloatArray, topology: NetworkTopology) -> list[FloatArray]:
    """Reshape the flat vector into per-layer ``(fan_out, fan_in + 1)`` views sharing its memory."""

    if weights.shape != (genotype_length(topology),):
        raise TopologyMismatchError(
            f"Weight vector of shape {weights.shape} does not fit topology {list(topology.layer_sizes)}."
        )
    return [weights[part.offset : part.end].reshape(part.fan_out, part.fan_in + 1) for part in layer_slices(topology)]


def _zero_activations(topology: NetworkTopology) -> list[FloatArray]:
    return [np.zeros(size, dtype=np.float64) for size in topology.layer_sizes]


@dataclass
class ControllerState:
    """Running phenotype: effective weights plus the activations of the latest forward pass."""

    topology: NetworkTopology
    effective_weights: FloatArray
    layer_activations: list[FloatArray] = field(default_factory=list)
    matrices: list[FloatArray] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.matrices = layer_views(self.effective_weights, self.topology)
        if not self.layer_activations:
            self.layer_activations = _zero_activations(self.topology)

    @classmethod
    def for_topology(cls, topology: NetworkTopology | None = None) -> "ControllerState":
        active = topology or NetworkTopology()
        return cls(topology=active, effective_weights=np.zeros(genotype_length(active), dtype=np.float64))

    def synapses(self, layer: int) -> FloatArray:
        matrix = self.matrices[layer]
        return matrix[:, : matrix.shape[1] - 1]

    def biases(self, layer: int) -> FloatArray:
        matrix = self.matrices[layer]
        return matrix[:, matrix.shape[1] - 1]


def load_genotype(state: ControllerState, genotype: Genotype) -> ControllerState:
    """Copy the genotype into the effective weights in place and clear activations."""

    if genotype.topology != state.topology:
        raise TopologyMismatchError(
            f"Genotype topology {list(genotype.topology.layer_sizes)} does not match "
            f"controller topology {list(state.topology.layer_sizes)}."
        )
    state.effective_weights[:] = genotype.weights
    state.layer_activations = _zero_activations(state.topology)
    return state


def forward(state: ControllerState, sensors: Sequence[float] | FloatArray) -> tuple[float, ...]:
    """Dense tanh pass; records every layer's activations and returns the output layer."""

    inputs = np.asarray(sensors, dtype=np.float64)
    if inputs.shape != (state.topology.input_size,):
        raise TopologyMismatchError(
            f"Expected {state.topology.input_size} sensor values, received shape {inputs.shape}."
        )
    if not np.all(np.isfinite(inputs)):
        raise ValueError("Sensor values must be finite.")

    activation = inputs.copy()
    state.layer_activations[0] = activation
    for index, matrix in enumerate(state.matrices):
        fan_in = matrix.shape[1] - 1
        activation = np.tanh(matrix[:, :fan_in] @ activation + matrix[:, fan_in])
        state.layer_activations[index + 1] = activation
    return tuple(float(value) for value in activation)


__all__ = [
    "ControllerState",
    "FloatArray",
    "Genotype",
    "LayerSlice",
    "NetworkTopology",
    "TopologyMismatchError",
    "forward",
    "genotype_length",
    "layer_slices",
    "layer_views",
    "load_genotype",
]
