"""Data package: schema, dataset IO and preparation, synthetic generator."""

from seqforge.data.dataset import (
    GameSequence,
    PlayerSample,
    PreparedDataset,
    compute_normalization_stats,
    compute_pad_length,
    fix_sequence_count,
    load_dataset,
    normalize,
    pad_truncate,
    prepare_dataset,
    split_indices,
    write_dataset,
)
from seqforge.data.schema import (
    FeatureSchema,
    FeatureSpec,
    NormalizationStats,
    load_schema,
    save_schema,
)
from seqforge.data.synthetic import (
    GeneratorSpec,
    generate_synthetic,
    load_generator_spec,
    write_synthetic,
)

__all__ = [
    "FeatureSchema",
    "FeatureSpec",
    "NormalizationStats",
    "load_schema",
    "save_schema",
    "GameSequence",
    "PlayerSample",
    "PreparedDataset",
    "load_dataset",
    "write_dataset",
    "compute_pad_length",
    "pad_truncate",
    "fix_sequence_count",
    "compute_normalization_stats",
    "normalize",
    "split_indices",
    "prepare_dataset",
    "GeneratorSpec",
    "generate_synthetic",
    "load_generator_spec",
    "write_synthetic",
]
