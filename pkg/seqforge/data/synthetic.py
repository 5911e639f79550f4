"""Synthetic players with planted behaviour archetypes.

Each archetype is a Gaussian over per-game features plus a sequence-length
range. A player of class c walks a Markov chain over archetypes with the
class-c transition matrix (uniform start); sequence t is drawn from the
archetype visited at step t. The archetype of every sequence is kept as
ground truth for evaluation.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
import yaml

from seqforge.core.constants import CLASS_NAMES, SCHEMA_SIDECAR, SPEC_SIDECAR
from seqforge.core.exceptions import ConfigError
from seqforge.data.dataset import GameSequence, PlayerSample, write_dataset
from seqforge.data.schema import FeatureSchema, save_schema
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

ROW_SUM_TOL = 1e-9


@dataclass
class GeneratorSpec:
    """Parameters of the synthetic generator.

    Attributes
    ----------
    means : List[List[float]]
        (n_archetypes x F) per-archetype feature means.
    stds : List[List[float]]
        (n_archetypes x F) per-archetype feature standard deviations
        (square roots of the diagonal covariance).
    length_ranges : List[List[int]]
        Per-archetype inclusive [min, max] sequence length, drawn uniformly.
    transitions : List[List[List[float]]]
        One (n_archetypes x n_archetypes) row-stochastic matrix per class,
        in ``CLASS_NAMES`` order.
    sequences_per_player : int
        S.
    seed : int
        Default generator seed.
    feature_names : List[str]
        Names of the F numeric features; ``f0..f{F-1}`` when empty.
    """

    means: List[List[float]]
    stds: List[List[float]]
    length_ranges: List[List[int]]
    transitions: List[List[List[float]]]
    sequences_per_player: int = 12
    seed: int = 0
    feature_names: List[str] = field(default_factory=list)

    @property
    def n_archetypes(self) -> int:
        return len(self.means)

    @property
    def n_features(self) -> int:
        return len(self.means[0]) if self.means else 0

    def validate(self) -> "GeneratorSpec":
        """Check shapes and that every transition row is a distribution.

        Raises
        ------
        ConfigError
            With a message naming the offending class and row.
        """
        a, f = self.n_archetypes, self.n_features
        if a < 1 or f < 1:
            raise ConfigError("generator needs at least one archetype and one feature")
        means = np.asarray(self.means, dtype=np.float64)
        stds = np.asarray(self.stds, dtype=np.float64)
        if means.shape != (a, f) or stds.shape != (a, f):
            raise ConfigError(f"means and stds must both be {a}x{f}")
        if np.any(stds < 0) or not np.all(np.isfinite(means)):
            raise ConfigError("stds must be >= 0 and means finite")
        if len(self.length_ranges) != a:
            raise ConfigError(f"length_ranges needs {a} entries, got {len(self.length_ranges)}")
        for i, (lo, hi) in enumerate(self.length_ranges):
            if not 0 <= lo <= hi:
                raise ConfigError(f"length_ranges[{i}] must satisfy 0 <= min <= max, got {[lo, hi]}")
        if len(self.transitions) != len(CLASS_NAMES):
            raise ConfigError(
                f"need one transition matrix per class {CLASS_NAMES}, got {len(self.transitions)}"
            )
        for c, matrix in enumerate(self.transitions):
            matrix = np.asarray(matrix, dtype=np.float64)
            if matrix.shape != (a, a):
                raise ConfigError(f"transitions for {CLASS_NAMES[c]} must be {a}x{a}")
            if np.any(matrix < 0):
                raise ConfigError(f"transitions for {CLASS_NAMES[c]} have negative entries")
            for r, total in enumerate(matrix.sum(axis=1)):
                if abs(total - 1.0) > ROW_SUM_TOL:
                    raise ConfigError(
                        f"transitions for {CLASS_NAMES[c]} row {r} sums to {total!r}, expected 1"
                    )
        if self.sequences_per_player < 1:
            raise ConfigError(
                f"sequences_per_player must be >= 1, got {self.sequences_per_player}"
            )
        if self.feature_names and len(self.feature_names) != f:
            raise ConfigError(f"feature_names needs {f} entries")
        return self

    def schema(self) -> FeatureSchema:
        names = self.feature_names or [f"f{j}" for j in range(self.n_features)]
        return FeatureSchema.numeric(list(names))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "means": [[float(v) for v in row] for row in self.means],
            "stds": [[float(v) for v in row] for row in self.stds],
            "length_ranges": [[int(lo), int(hi)] for lo, hi in self.length_ranges],
            "transitions": {
                name: [[float(v) for v in row] for row in matrix]
                for name, matrix in zip(CLASS_NAMES, self.transitions)
            },
            "sequences_per_player": int(self.sequences_per_player),
            "seed": int(self.seed),
            "feature_names": list(self.feature_names),
        }

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "GeneratorSpec":
        """Build a spec from a mapping.

        ``transitions`` may be a list in class order or a mapping keyed by
        class name. ``stds`` may be a single number applied everywhere.
        """
        try:
            means = [[float(v) for v in row] for row in values["means"]]
            transitions = values["transitions"]
            length_ranges = values["length_ranges"]
        except KeyError as exc:
            raise ConfigError(f"generator spec is missing {exc.args[0]!r}") from None
        if isinstance(transitions, Mapping):
            missing = [name for name in CLASS_NAMES if name not in transitions]
            if missing:
                raise ConfigError(f"transitions missing classes {missing}")
            transitions = [transitions[name] for name in CLASS_NAMES]
        stds = values.get("stds", 1.0)
        if isinstance(stds, (int, float)):
            stds = [[float(stds)] * len(row) for row in means]
        if length_ranges and isinstance(length_ranges[0], (int, float)):
            length_ranges = [length_ranges] * len(means)
        return cls(
            means=means,
            stds=[[float(v) for v in row] for row in stds],
            length_ranges=[[int(lo), int(hi)] for lo, hi in length_ranges],
            transitions=[[[float(v) for v in row] for row in m] for m in transitions],
            sequences_per_player=int(values.get("sequences_per_player", 12)),
            seed=int(values.get("seed", 0)),
            feature_names=[str(n) for n in values.get("feature_names", [])],
        )


def load_generator_spec(path: Union[str, Path]) -> GeneratorSpec:
    """Read and validate a YAML or JSON generator spec."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Generator spec not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            values = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse generator spec {path}: {exc}") from None
    return GeneratorSpec.from_dict(values).validate()


def generate_synthetic(
    spec: GeneratorSpec, n_per_class: int, seed: Optional[int] = None
) -> List[PlayerSample]:
    """Draw ``n_per_class`` players for every class.

    Parameters
    ----------
    spec : GeneratorSpec
        Validated generator parameters.
    n_per_class : int
        Players per class.
    seed : Optional[int]
        Overrides ``spec.seed``.

    Returns
    -------
    List[PlayerSample]
        Players grouped by class in ``CLASS_NAMES`` order; every sequence
        carries its ground-truth archetype.
    """
    spec.validate()
    if n_per_class < 0:
        raise ValueError(f"n_per_class must be >= 0, got {n_per_class}")
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    means = np.asarray(spec.means, dtype=np.float64)
    stds = np.asarray(spec.stds, dtype=np.float64)
    a = spec.n_archetypes

    samples: List[PlayerSample] = []
    for label, name in enumerate(CLASS_NAMES):
        matrix = np.asarray(spec.transitions[label], dtype=np.float64)
        for i in range(n_per_class):
            chain = [int(rng.integers(0, a))]
            for _ in range(1, spec.sequences_per_player):
                chain.append(int(rng.choice(a, p=matrix[chain[-1]])))
            sequences = []
            for archetype in chain:
                lo, hi = spec.length_ranges[archetype]
                length = int(rng.integers(lo, hi + 1))
                games = rng.normal(
                    means[archetype], stds[archetype], size=(length, spec.n_features)
                )
                sequences.append(GameSequence(games=games, archetype=archetype))
            samples.append(
                PlayerSample(player_id=f"{name.lower()}_{i:05d}", label=label, sequences=sequences)
            )
    logger.info(f"Generated {len(samples)} synthetic players ({a} archetypes)")
    return samples


def write_synthetic(
    samples: List[PlayerSample],
    spec: GeneratorSpec,
    path: Union[str, Path],
    n_per_class: int,
    seed: int,
) -> Path:
    """Write a generated dataset plus its ``schema.json`` and ``spec.json`` sidecars."""
    path = Path(path)
    write_dataset(samples, spec.schema(), path)
    save_schema(spec.schema(), path.with_name(SCHEMA_SIDECAR))
    sidecar = {"generator": spec.to_dict(), "seed": int(seed), "n_per_class": int(n_per_class)}
    with open(path.with_name(SPEC_SIDECAR), "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2)
        f.write("\n")
    logger.info(f"Saved generator spec to {path.with_name(SPEC_SIDECAR)}")
    return path
