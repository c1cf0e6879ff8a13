"""Shared fixtures: datasets produced by the dataset engine's CLI and a
session-scoped trained model.

The dataset engine is exercised strictly through its command line and
file formats; nothing from its Python API is imported here.
"""

import json
import subprocess
import sys

import pytest

from gnn_trainer import ModelConfig, TrainConfig, load_samples, train

PRIMARY_CLI = [sys.executable, "-m", "rydberg_entropy.cli"]


def run_primary(*args):
    result = subprocess.run(
        PRIMARY_CLI + list(args), capture_output=True, text=True
    )
    assert result.returncode == 0, result.stderr
    return result.stdout


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("datasets")
    run_primary(
        "generate", "--out", str(d / "r123.jsonl"), "--rungs", "1,2,3",
        "--samples-per-rung", "7334", "--seed", "20240601",
    )
    run_primary(
        "generate", "--out", str(d / "r4.jsonl"), "--rungs", "4",
        "--samples-per-rung", "1500", "--seed", "20240602",
    )
    return d


@pytest.fixture(scope="session")
def r123_split(data_dir):
    records = load_samples(data_dir / "r123.jsonl")
    assert len(records) >= 22000
    return records[:20000], records[20000:]


@pytest.fixture(scope="session")
def r4_records(data_dir):
    return load_samples(data_dir / "r4.jsonl")


@pytest.fixture(scope="session")
def reduced_config():
    # CPU-friendly width; every architectural element of the default
    # configuration is still present.
    return ModelConfig(
        hidden_dim=64, heads=4, head_dim=16, projection_dim=128,
        dropout=0.2, edge_dim=3,
    )


@pytest.fixture(scope="session")
def trained_model(r123_split, reduced_config):
    train_recs, _ = r123_split
    model, history = train(
        train_recs, reduced_config, TrainConfig(epochs=6, batch_size=256, seed=0)
    )
    return model, history
