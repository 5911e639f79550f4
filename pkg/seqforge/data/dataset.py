"""Sequence-of-sequences datasets: ingestion, padding, normalization, splitting.

Dataset files are UTF-8 JSON lines with one player per line::

    {"player_id": "p1", "label": "Burnout",
     "sequences": [[{"entry_fee": 5.0, ...}, ...], ...],
     "archetypes": [0, 2, ...]}

``archetypes`` (ground-truth behaviour per sequence) is optional and only
ever used for evaluation.
"""

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from seqforge.core.constants import CLASS_NAMES, PAD_PERCENTILE, ZERO_NORM_TOL
from seqforge.core.exceptions import DataFormatError
from seqforge.data.schema import FeatureSchema, NormalizationStats
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

_LABELS = {name.lower(): i for i, name in enumerate(CLASS_NAMES)}


@dataclass
class GameSequence:
    """One uninterrupted streak of games.

    Attributes
    ----------
    games : np.ndarray
        (raw_length x F) encoded games in play order.
    padded : Optional[np.ndarray]
        (L x F) matrix after ``pad_truncate``; rows >= valid_length are zero.
    valid_length : int
        Real rows in ``padded``.
    archetype : int
        Ground-truth behaviour label, -1 when unknown.
    """

    games: np.ndarray
    padded: Optional[np.ndarray] = None
    valid_length: int = 0
    archetype: int = -1

    @property
    def raw_length(self) -> int:
        return int(self.games.shape[0])

    @property
    def is_real(self) -> bool:
        """False for empty and sample-level padding sequences."""
        if self.padded is None:
            return self.raw_length > 0
        return self.valid_length > 0


@dataclass
class PlayerSample:
    """One labeled player: an ordered list of sequences.

    Attributes
    ----------
    player_id : str
        Identifier from the dataset file.
    label : int
        Class index into ``CLASS_NAMES``.
    sequences : List[GameSequence]
        Sequences in file order (oldest first).
    """

    player_id: str
    label: int
    sequences: List[GameSequence] = field(default_factory=list)

    @property
    def label_name(self) -> str:
        return CLASS_NAMES[self.label]

    def tensor(self) -> np.ndarray:
        """Stack padded sequences into an (S, L, F) array."""
        if any(seq.padded is None for seq in self.sequences):
            raise ValueError(f"player {self.player_id!r} has unpadded sequences")
        return np.stack([seq.padded for seq in self.sequences])

    def valid_lengths(self) -> np.ndarray:
        return np.array([seq.valid_length for seq in self.sequences], dtype=np.int64)

    def archetypes(self) -> np.ndarray:
        return np.array([seq.archetype for seq in self.sequences], dtype=np.int64)


# =============================================================================
# File IO
# =============================================================================


def load_dataset(path: Union[str, Path], schema: FeatureSchema) -> List[PlayerSample]:
    """Read a JSON-lines dataset.

    Parameters
    ----------
    path : Union[str, Path]
        Dataset file.
    schema : FeatureSchema
        Encoding applied to every game.

    Returns
    -------
    List[PlayerSample]
        Samples in file order, encoded but neither padded nor normalized.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    DataFormatError
        On a malformed line, missing key, unknown label, feature or
        category. The message names the 1-based line.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dataset not found: {path}")

    samples: List[PlayerSample] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"malformed JSON ({exc.msg})", line_number) from None
            samples.append(_parse_player(obj, schema, line_number))
    logger.info(f"Loaded {len(samples)} players from {path}")
    return samples


def _parse_player(obj: Any, schema: FeatureSchema, line_number: int) -> PlayerSample:
    if not isinstance(obj, dict):
        raise DataFormatError("record must be a JSON object", line_number)
    for key in ("player_id", "label", "sequences"):
        if key not in obj:
            raise DataFormatError(f'missing "{key}"', line_number)
    label = _LABELS.get(str(obj["label"]).lower())
    if label is None:
        raise DataFormatError(
            f"unknown label {obj['label']!r}; expected one of {CLASS_NAMES}", line_number
        )
    raw_sequences = obj["sequences"]
    if not isinstance(raw_sequences, list):
        raise DataFormatError('"sequences" must be a list', line_number)
    archetypes = obj.get("archetypes")
    if archetypes is not None and len(archetypes) != len(raw_sequences):
        raise DataFormatError(
            f'"archetypes" has {len(archetypes)} entries for {len(raw_sequences)} sequences',
            line_number,
        )

    sequences = []
    for i, games in enumerate(raw_sequences):
        if not isinstance(games, list):
            raise DataFormatError(f"sequence {i} must be a list of games", line_number)
        encoded = np.array([schema.encode(g, line_number) for g in games]).reshape(
            len(games), schema.width
        )
        archetype = int(archetypes[i]) if archetypes is not None else -1
        sequences.append(GameSequence(games=encoded, archetype=archetype))
    return PlayerSample(player_id=str(obj["player_id"]), label=label, sequences=sequences)


def write_dataset(
    samples: Sequence[PlayerSample], schema: FeatureSchema, path: Union[str, Path]
) -> Path:
    """Write samples as JSON lines (raw games, so the file reloads bit-for-bit)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for sample in samples:
            record: Dict[str, Any] = {
                "player_id": sample.player_id,
                "label": sample.label_name,
                "sequences": [
                    [schema.decode(row) for row in seq.games] for seq in sample.sequences
                ],
            }
            if any(seq.archetype >= 0 for seq in sample.sequences):
                record["archetypes"] = [int(seq.archetype) for seq in sample.sequences]
            f.write(json.dumps(record) + "\n")
    logger.info(f"Saved {len(samples)} players to {path}")
    return path


# =============================================================================
# Padding
# =============================================================================


def compute_pad_length(samples: Sequence[PlayerSample], percentile: float = PAD_PERCENTILE) -> int:
    """Nearest-rank percentile of non-empty raw sequence lengths.

    Parameters
    ----------
    samples : Sequence[PlayerSample]
        Unpadded dataset.
    percentile : float
        Percentile in (0, 100].

    Returns
    -------
    int
        Smallest length L such that at least ``percentile``% of lengths are <= L.

    Raises
    ------
    ValueError
        If there is no non-empty sequence.

    Examples
    --------
    Lengths 1..100 give 95; lengths [5, 200] give 200.
    """
    lengths = sorted(
        seq.raw_length for s in samples for seq in s.sequences if seq.raw_length > 0
    )
    if not lengths:
        raise DataFormatError("cannot compute pad length: all sequences are empty")
    if not 0.0 < percentile <= 100.0:
        raise ValueError(f"percentile must be in (0, 100], got {percentile}")
    rank = max(1, math.ceil(round(percentile * len(lengths) / 100.0, 9)))
    return int(lengths[rank - 1])


def pad_truncate(sequence: GameSequence, pad_length: int) -> GameSequence:
    """Fix a sequence to ``pad_length`` rows.

    Longer sequences keep their most recent games; shorter ones are
    zero-padded at the tail.

    Returns
    -------
    GameSequence
        Copy with ``padded`` and ``valid_length`` set.
    """
    if pad_length < 1:
        raise ValueError(f"pad_length must be >= 1, got {pad_length}")
    n_features = sequence.games.shape[1]
    kept = sequence.games[-pad_length:] if sequence.raw_length > 0 else sequence.games
    padded = np.zeros((pad_length, n_features))
    padded[: kept.shape[0]] = kept
    return replace(sequence, padded=padded, valid_length=int(kept.shape[0]))


def fix_sequence_count(sample: PlayerSample, n_sequences: int, n_features: int) -> PlayerSample:
    """Return a copy of ``sample`` with exactly ``n_sequences`` sequences.

    Extra sequences are dropped from the front (oldest first); missing
    ones are appended as empty sequences.
    """
    if n_sequences < 1:
        raise ValueError(f"n_sequences must be >= 1, got {n_sequences}")
    sequences = list(sample.sequences[-n_sequences:])
    while len(sequences) < n_sequences:
        sequences.append(GameSequence(games=np.zeros((0, n_features))))
    return replace(sample, sequences=sequences)


# =============================================================================
# Normalization
# =============================================================================


def compute_normalization_stats(
    samples: Sequence[PlayerSample], schema: FeatureSchema
) -> NormalizationStats:
    """Z-score statistics of numeric columns over valid rows of ``samples``.

    Constant columns (std below 1e-12) are excluded and passed through.
    """
    rows = [
        seq.padded[: seq.valid_length]
        for s in samples
        for seq in s.sequences
        if seq.padded is not None and seq.valid_length > 0
    ]
    width = schema.width
    mean = np.zeros(width)
    std = np.ones(width)
    mask = np.zeros(width, dtype=bool)
    if rows:
        stacked = np.concatenate(rows, axis=0)
        col_mean = stacked.mean(axis=0)
        col_std = stacked.std(axis=0)
        mask = schema.numeric_columns & (col_std > ZERO_NORM_TOL)
        mean[mask] = col_mean[mask]
        std[mask] = col_std[mask]
        skipped = [
            name
            for name, numeric, keep in zip(schema.column_names, schema.numeric_columns, mask)
            if numeric and not keep
        ]
        if skipped:
            logger.warning(f"Constant features passed through unnormalized: {skipped}")
    return NormalizationStats(mean=mean, std=std, normalized=mask)


def normalize(samples: Sequence[PlayerSample], stats: NormalizationStats) -> List[PlayerSample]:
    """Z-score the valid rows of every padded sequence; padded rows stay zero.

    Returns
    -------
    List[PlayerSample]
        New samples; the inputs are not modified.
    """
    out = []
    for sample in samples:
        sequences = []
        for seq in sample.sequences:
            if seq.padded is None:
                raise ValueError(f"player {sample.player_id!r} must be padded before normalize")
            padded = seq.padded.copy()
            valid = padded[: seq.valid_length]
            valid[:, stats.normalized] = (
                valid[:, stats.normalized] - stats.mean[stats.normalized]
            ) / stats.std[stats.normalized]
            sequences.append(replace(seq, padded=padded))
        out.append(replace(sample, sequences=sequences))
    return out


# =============================================================================
# Prepared arrays
# =============================================================================


@dataclass
class PreparedDataset:
    """Padded, normalized dataset as dense arrays.

    Attributes
    ----------
    x : np.ndarray
        (N, S, L, F) normalized inputs.
    raw : np.ndarray
        (N, S, L, F) inputs before normalization.
    valid_lengths : np.ndarray
        (N, S) real rows per sequence; 0 marks empty/padding sequences.
    labels : np.ndarray
        (N,) class indices.
    player_ids : List[str]
        Identifiers in row order.
    archetypes : np.ndarray
        (N, S) ground-truth archetypes, -1 where unknown.
    schema : FeatureSchema
        Schema carrying the training-split statistics.
    train_index, test_index : np.ndarray
        Player rows of the two splits.
    """

    x: np.ndarray
    raw: np.ndarray
    valid_lengths: np.ndarray
    labels: np.ndarray
    player_ids: List[str]
    archetypes: np.ndarray
    schema: FeatureSchema
    train_index: np.ndarray
    test_index: np.ndarray

    @property
    def n_players(self) -> int:
        return int(self.x.shape[0])

    @property
    def sequences_per_player(self) -> int:
        return int(self.x.shape[1])

    @property
    def pad_length(self) -> int:
        return int(self.x.shape[2])

    @property
    def n_features(self) -> int:
        return int(self.x.shape[3])

    @property
    def real_mask(self) -> np.ndarray:
        """(N, S) True for sequences with at least one game."""
        return self.valid_lengths > 0

    @property
    def has_archetypes(self) -> bool:
        return bool(np.any(self.archetypes[self.real_mask] >= 0))


def split_indices(
    labels: np.ndarray, train_fraction: float, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-class seeded shuffle split.

    Each class contributes round(train_fraction * n_c) players (at least
    one) to the training split.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray]
        Sorted train and test row indices.
    """
    if not 0.0 < train_fraction <= 1.0:
        raise ValueError(f"train_fraction must be in (0, 1], got {train_fraction}")
    rng = np.random.default_rng(seed)
    train: List[int] = []
    test: List[int] = []
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        members = members[rng.permutation(members.size)]
        n_train = min(members.size, max(1, int(math.floor(train_fraction * members.size + 0.5))))
        train.extend(members[:n_train].tolist())
        test.extend(members[n_train:].tolist())
    return np.array(sorted(train), dtype=np.int64), np.array(sorted(test), dtype=np.int64)


def prepare_dataset(
    samples: Sequence[PlayerSample],
    schema: FeatureSchema,
    train_fraction: float,
    seed: int,
    pad_length: Optional[int] = None,
    sequences_per_player: Optional[int] = None,
    stats: Optional[NormalizationStats] = None,
) -> PreparedDataset:
    """Pad, split and normalize ``samples`` into dense arrays.

    Parameters
    ----------
    samples : Sequence[PlayerSample]
        Output of ``load_dataset`` or ``generate_synthetic``.
    schema : FeatureSchema
        Encoding schema.
    train_fraction : float
        Per-class share of players in the training split.
    seed : int
        Seed of the split shuffle.
    pad_length : Optional[int]
        L; computed globally with ``compute_pad_length`` when None.
    sequences_per_player : Optional[int]
        S; the largest sequence count in ``samples`` when None.
    stats : Optional[NormalizationStats]
        Reuse saved statistics instead of computing them on the train split.

    Returns
    -------
    PreparedDataset
        Arrays plus the schema with statistics attached.
    """
    if not samples:
        raise DataFormatError("dataset is empty")
    width = schema.width
    if pad_length is None:
        pad_length = compute_pad_length(samples)
    if sequences_per_player is None:
        sequences_per_player = max(len(s.sequences) for s in samples)

    padded = []
    for sample in samples:
        fixed = fix_sequence_count(sample, sequences_per_player, width)
        padded.append(
            replace(fixed, sequences=[pad_truncate(seq, pad_length) for seq in fixed.sequences])
        )

    labels = np.array([s.label for s in padded], dtype=np.int64)
    train_index, test_index = split_indices(labels, train_fraction, seed)
    if stats is None:
        stats = compute_normalization_stats([padded[i] for i in train_index], schema)
    normalized = normalize(padded, stats)

    prepared = PreparedDataset(
        x=np.stack([s.tensor() for s in normalized]),
        raw=np.stack([s.tensor() for s in padded]),
        valid_lengths=np.stack([s.valid_lengths() for s in padded]),
        labels=labels,
        player_ids=[s.player_id for s in padded],
        archetypes=np.stack([s.archetypes() for s in padded]),
        schema=FeatureSchema(features=list(schema.features), stats=stats),
        train_index=train_index,
        test_index=test_index,
    )
    logger.info(
        f"Prepared {prepared.n_players} players: S={sequences_per_player}, "
        f"L={pad_length}, F={width}, train={train_index.size}, test={test_index.size}"
    )
    return prepared
