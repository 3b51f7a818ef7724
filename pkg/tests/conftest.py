"""
Shared test fixtures and configuration.
"""

import json

import pytest

from readout_correlation_analyser.loaders import ConfigLoader, write_noise_model
from readout_correlation_analyser.models import CountsTable, NoiseModel
from readout_correlation_analyser.topology import builtin_topology, min_distances


def _noiseless_counts(n, shots):
    """CountsTable in which every preparation reads back exactly."""
    histograms = {"ground": {"0" * n: shots}}
    for k in range(n):
        bits = ["0"] * n
        bits[k] = "1"
        histograms[f"x_{k}"] = {"".join(bits): shots}
    return CountsTable(num_qubits=n, shots=shots, histograms=histograms)


def _decaying_model(topology, amplitude=0.05, base=0.01, constant=False):
    """Spectator shifts amplitude * 2^-d on every ordered pair of a topology."""
    distances = min_distances(topology)
    n = topology.num_qubits
    spectators = {}
    for i in range(n):
        for j in range(n):
            if i != j:
                spectators[(i, j)] = amplitude if constant else amplitude * 2.0 ** (-distances[i, j])
    return NoiseModel(n, (base,) * n, (base,) * n, spectator01=spectators)


@pytest.fixture
def config():
    """Default settings.yaml."""
    return ConfigLoader()


@pytest.fixture
def small_model():
    """3-qubit model with one spectator shift and one pair-flip term."""
    return NoiseModel(
        num_qubits=3,
        p01=(0.01, 0.02, 0.03),
        p10=(0.04, 0.05, 0.06),
        spectator01={(0, 1): 0.02},
        spectator10={(2, 0): -0.01},
        pairflip={(1, 2): 0.05},
    )


@pytest.fixture
def path3():
    return builtin_topology("path", 3)


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document under tmp_path and return its path."""
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def model_file(tmp_path):
    """Write a NoiseModel under tmp_path and return its path."""
    def _write(model, name="model.json"):
        return write_noise_model(model, tmp_path / name)
    return _write


@pytest.fixture
def noiseless_counts():
    """Factory for noiseless CountsTables: noiseless_counts(n, shots)."""
    return _noiseless_counts


@pytest.fixture
def decaying_model():
    """Factory for distance-decaying spectator models."""
    return _decaying_model
