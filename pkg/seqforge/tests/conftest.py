"""Pytest configuration and shared fixtures."""

from pathlib import Path
from typing import List

import numpy as np
import pytest

from seqforge.configs import generator_path
from seqforge.core.base import TrainingConfig
from seqforge.data.dataset import GameSequence, PlayerSample, PreparedDataset, prepare_dataset
from seqforge.data.schema import FeatureSchema
from seqforge.data.synthetic import (
    GeneratorSpec,
    generate_synthetic,
    load_generator_spec,
    write_synthetic,
)

TOY_PLAYERS_PER_CLASS = 4
TOY_TRAIN_FRACTION = 0.75


def make_sample(player_id: str, label: int, lengths: List[int], n_features: int = 1) -> PlayerSample:
    """Player whose sequence j has ``lengths[j]`` games valued j + 1."""
    sequences = [
        GameSequence(games=np.full((n, n_features), float(j + 1))) for j, n in enumerate(lengths)
    ]
    return PlayerSample(player_id=player_id, label=label, sequences=sequences)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def toy_spec() -> GeneratorSpec:
    """Two archetypes over two features, four sequences per player."""
    return load_generator_spec(generator_path("toy"))


@pytest.fixture
def toy_schema(toy_spec) -> FeatureSchema:
    return toy_spec.schema()


@pytest.fixture
def toy_samples(toy_spec) -> List[PlayerSample]:
    return generate_synthetic(toy_spec, TOY_PLAYERS_PER_CLASS, seed=3)


@pytest.fixture
def toy_prepared(toy_samples, toy_schema) -> PreparedDataset:
    return prepare_dataset(toy_samples, toy_schema, TOY_TRAIN_FRACTION, seed=0)


@pytest.fixture
def tiny_config() -> TrainingConfig:
    """Smallest configuration that exercises every training phase."""
    return TrainingConfig(
        num_clusters=2,
        lambda_=0.5,
        beta=0.3,
        refresh_period=2,
        collaborative_epochs=2,
        interpreter_inner_epochs=1,
        classifier_inner_epochs=2,
        players_per_batch=4,
        interpreter_lr=0.01,
        classifier_lr=0.01,
        seed=7,
        hidden_sizes=(3, 2, 2),
        attention_size=2,
        conv_channels=(2, 2),
        recurrent_size=3,
        train_fraction=TOY_TRAIN_FRACTION,
    )


@pytest.fixture
def toy_dataset_file(tmp_path, toy_spec, toy_samples) -> Path:
    """Toy dataset written as JSON lines with its schema.json sidecar."""
    return write_synthetic(
        toy_samples, toy_spec, tmp_path / "data" / "players.jsonl", TOY_PLAYERS_PER_CLASS, 3
    )
