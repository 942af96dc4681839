from __future__ import annotations

import math

import numpy as np
import pytest
from pydantic import ValidationError

from hebbian_tmaze.network import (
    ControllerState,
    Genotype,
    NetworkTopology,
    TopologyMismatchError,
    forward,
    genotype_length,
    layer_slices,
    load_genotype,
)


def _naive_forward(weights: list[float], sizes: tuple[int, ...], inputs: list[float]) -> list[float]:
    activation = list(inputs)
    cursor = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        layer: list[float] = []
        for _ in range(fan_out):
            total = 0.0
            for pre in range(fan_in):
                total += weights[cursor] * activation[pre]
                cursor += 1
            total += weights[cursor]
            cursor += 1
            layer.append(math.tanh(total))
        activation = layer
    assert cursor == len(weights)
    return activation


@pytest.mark.parametrize(
    ("sizes", "expected"),
    [((16, 7, 5, 8, 4, 2), 253), ((1, 1), 2), ((2, 3, 1), 13)],
)
def test_genotype_length_examples(sizes: tuple[int, ...], expected: int) -> None:
    assert genotype_length(NetworkTopology(layer_sizes=sizes)) == expected


def test_layer_slices_tile_the_weight_vector() -> None:
    topology = NetworkTopology()
    slices = layer_slices(topology)

    assert slices[0].offset == 0
    for previous, current in zip(slices, slices[1:]):
        assert current.offset == previous.end
    assert slices[-1].end == genotype_length(topology)


def test_genotype_rejects_wrong_length_and_non_finite_values() -> None:
    with pytest.raises(ValidationError):
        Genotype(weights=(0.0,) * 252)
    with pytest.raises(ValidationError):
        Genotype(topology=NetworkTopology(layer_sizes=(1, 1)), weights=(math.nan, 0.0))


def test_genotype_accepts_list_topology_from_file_payload() -> None:
    genotype = Genotype.model_validate({"topology": [2, 1], "weights": [1.0, 1.0, 0.0]})

    assert genotype.topology == NetworkTopology(layer_sizes=(2, 1))
    assert genotype.to_payload() == {"topology": [2, 1], "weights": [1.0, 1.0, 0.0]}


def test_zero_weights_output_zero_commands() -> None:
    state = load_genotype(ControllerState.for_topology(), Genotype.zeros())

    assert forward(state, np.linspace(0.0, 1.0, 16)) == (0.0, 0.0)


@pytest.mark.parametrize("bias", [0.0, 0.3, -1.2])
def test_single_neuron_outputs_tanh_of_bias(bias: float) -> None:
    topology = NetworkTopology(layer_sizes=(1, 1))
    state = load_genotype(ControllerState.for_topology(topology), Genotype(topology=topology, weights=(0.0, bias)))

    assert forward(state, [0.7])[0] == pytest.approx(math.tanh(bias), abs=1e-15)


def test_two_input_neuron_matches_hand_value() -> None:
    topology = NetworkTopology(layer_sizes=(2, 1))
    state = load_genotype(ControllerState.for_topology(topology), Genotype(topology=topology, weights=(1.0, 1.0, 0.0)))

    (output,) = forward(state, [0.5, 0.5])

    assert output == pytest.approx(0.76159, abs=1e-5)


@pytest.mark.parametrize("sizes", [(1, 1), (2, 1), (2, 3, 1), (3, 3, 2), (3, 2, 3, 2)])
def test_forward_matches_per_neuron_loop(sizes: tuple[int, ...]) -> None:
    topology = NetworkTopology(layer_sizes=sizes)
    rng = np.random.default_rng(sum(sizes))
    state = ControllerState.for_topology(topology)
    for _ in range(25):
        weights = rng.uniform(-2.0, 2.0, genotype_length(topology))
        inputs = rng.uniform(-1.0, 1.0, topology.input_size)
        load_genotype(state, Genotype.from_array(weights, topology))

        outputs = forward(state, inputs)

        expected = _naive_forward(list(weights), sizes, list(inputs))
        assert np.allclose(outputs, expected, rtol=0.0, atol=1e-12)


def test_forward_is_pure_and_activations_are_bounded(random_genotype) -> None:
    genotype = random_genotype(seed=3)
    state = load_genotype(ControllerState.for_topology(), genotype)
    sensors = np.random.default_rng(5).uniform(0.0, 1.0, 16)

    first = forward(state, sensors)
    second = forward(state, sensors)

    assert first == second
    for activation in state.layer_activations:
        assert np.all(np.abs(activation) <= 1.0)
    assert all(-1.0 < value < 1.0 for value in first)


def test_forward_rejects_wrong_sensor_count() -> None:
    state = ControllerState.for_topology()

    with pytest.raises(TopologyMismatchError):
        forward(state, [0.0] * 15)


def test_load_genotype_copies_and_reloads(random_genotype) -> None:
    first = random_genotype(seed=1)
    second = random_genotype(seed=2)
    state = ControllerState.for_topology()

    load_genotype(state, first)
    assert np.array_equal(state.effective_weights, first.as_array())

    load_genotype(state, second)
    assert np.array_equal(state.effective_weights, second.as_array())
    assert first == random_genotype(seed=1)

    state.effective_weights += 0.5
    load_genotype(state, second)
    assert np.array_equal(state.effective_weights, second.as_array())


def test_load_genotype_rejects_other_topology() -> None:
    state = ControllerState.for_topology()

    with pytest.raises(TopologyMismatchError):
        load_genotype(state, Genotype.zeros(NetworkTopology(layer_sizes=(2, 1))))


def test_synapse_views_write_through_to_flat_vector() -> None:
    topology = NetworkTopology(layer_sizes=(2, 1))
    state = ControllerState.for_topology(topology)

    state.synapses(0)[0, 1] = 0.25
    state.biases(0)[0] = -0.5

    assert list(state.effective_weights) == [0.0, 0.25, -0.5]
