"""Feature schema: how raw per-game records become fixed-width float vectors.

Schema file format (JSON, or YAML since JSON is a subset)::

    {"features": [
        {"name": "entry_fee", "kind": "numeric"},
        {"name": "won", "kind": "boolean"},
        {"name": "table", "kind": "categorical", "categories": ["2p", "6p"]}
    ]}

Numeric values are kept as-is, booleans become 0/1 and categoricals are
one-hot expanded in category order.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import yaml

from seqforge.core.exceptions import DataFormatError

FEATURE_KINDS = ("numeric", "boolean", "categorical")


@dataclass(frozen=True)
class FeatureSpec:
    """One raw feature.

    Attributes
    ----------
    name : str
        Key in the per-game JSON object.
    kind : str
        "numeric", "boolean" or "categorical".
    categories : Tuple[str, ...]
        Allowed values of a categorical feature, in one-hot order.
    """

    name: str
    kind: str = "numeric"
    categories: Tuple[str, ...] = ()

    @property
    def width(self) -> int:
        return len(self.categories) if self.kind == "categorical" else 1


@dataclass
class NormalizationStats:
    """Per-column z-score statistics from the training split.

    Attributes
    ----------
    mean, std : np.ndarray
        Length-F vectors over encoded columns.
    normalized : np.ndarray
        Boolean length-F mask; False for non-numeric and constant columns.
    """

    mean: np.ndarray
    std: np.ndarray
    normalized: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": [float(v) for v in self.mean],
            "std": [float(v) for v in self.std],
            "normalized": [bool(v) for v in self.normalized],
        }

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "NormalizationStats":
        return cls(
            mean=np.asarray(values["mean"], dtype=np.float64),
            std=np.asarray(values["std"], dtype=np.float64),
            normalized=np.asarray(values["normalized"], dtype=bool),
        )


@dataclass
class FeatureSchema:
    """Ordered feature list plus optional normalization statistics.

    Attributes
    ----------
    features : List[FeatureSpec]
        Raw features in encoding order.
    stats : Optional[NormalizationStats]
        Set once statistics have been computed on a training split.
    """

    features: List[FeatureSpec]
    stats: Optional[NormalizationStats] = None
    _index: Dict[str, FeatureSpec] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        for spec in self.features:
            if spec.kind not in FEATURE_KINDS:
                raise DataFormatError(
                    f"feature {spec.name!r} has unknown kind {spec.kind!r}; "
                    f"expected one of {FEATURE_KINDS}"
                )
            if spec.kind == "categorical" and not spec.categories:
                raise DataFormatError(f"categorical feature {spec.name!r} has no categories")
            if spec.name in self._index:
                raise DataFormatError(f"duplicate feature name {spec.name!r}")
            self._index[spec.name] = spec

    @property
    def width(self) -> int:
        """F, the encoded width."""
        return sum(spec.width for spec in self.features)

    @property
    def column_names(self) -> List[str]:
        names: List[str] = []
        for spec in self.features:
            if spec.kind == "categorical":
                names.extend(f"{spec.name}={c}" for c in spec.categories)
            else:
                names.append(spec.name)
        return names

    @property
    def numeric_columns(self) -> np.ndarray:
        """Boolean mask of encoded columns that come from numeric features."""
        mask: List[bool] = []
        for spec in self.features:
            mask.extend([spec.kind == "numeric"] * spec.width)
        return np.asarray(mask, dtype=bool)

    def encode(self, record: Mapping[str, Any], line_number: Optional[int] = None) -> np.ndarray:
        """Encode one game object into a length-F float vector.

        Raises
        ------
        DataFormatError
            On unknown or missing features, unknown categories, or
            non-finite values.
        """
        if not isinstance(record, Mapping):
            raise DataFormatError(f"game must be an object, got {type(record).__name__}", line_number)
        unknown = sorted(set(record) - set(self._index))
        if unknown:
            raise DataFormatError(f"unknown feature {unknown[0]!r}", line_number)
        out = np.zeros(self.width)
        col = 0
        for spec in self.features:
            if spec.name not in record:
                raise DataFormatError(f"missing feature {spec.name!r}", line_number)
            value = record[spec.name]
            if spec.kind == "categorical":
                if value not in spec.categories:
                    raise DataFormatError(
                        f"unknown category {value!r} for feature {spec.name!r}", line_number
                    )
                out[col + spec.categories.index(value)] = 1.0
            elif spec.kind == "boolean":
                if value not in (True, False, 0, 1):
                    raise DataFormatError(
                        f"feature {spec.name!r} must be boolean, got {value!r}", line_number
                    )
                out[col] = 1.0 if value else 0.0
            else:
                try:
                    out[col] = float(value)
                except (TypeError, ValueError):
                    raise DataFormatError(
                        f"feature {spec.name!r} must be numeric, got {value!r}", line_number
                    ) from None
                if not np.isfinite(out[col]):
                    raise DataFormatError(f"feature {spec.name!r} is not finite", line_number)
            col += spec.width
        return out

    def decode(self, vector: np.ndarray) -> Dict[str, Any]:
        """Inverse of ``encode`` for an un-normalized vector."""
        record: Dict[str, Any] = {}
        col = 0
        for spec in self.features:
            if spec.kind == "categorical":
                block = vector[col : col + spec.width]
                record[spec.name] = spec.categories[int(np.argmax(block))]
            elif spec.kind == "boolean":
                record[spec.name] = bool(vector[col] != 0.0)
            else:
                record[spec.name] = float(vector[col])
            col += spec.width
        return record

    def to_dict(self) -> Dict[str, Any]:
        features = []
        for spec in self.features:
            entry: Dict[str, Any] = {"name": spec.name, "kind": spec.kind}
            if spec.kind == "categorical":
                entry["categories"] = list(spec.categories)
            features.append(entry)
        out: Dict[str, Any] = {"features": features}
        if self.stats is not None:
            out["stats"] = self.stats.to_dict()
        return out

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "FeatureSchema":
        if not isinstance(values, Mapping) or "features" not in values:
            raise DataFormatError('schema must be an object with a "features" list')
        specs = []
        for i, entry in enumerate(values["features"]):
            if "name" not in entry:
                raise DataFormatError(f"schema feature {i} has no name")
            specs.append(
                FeatureSpec(
                    name=str(entry["name"]),
                    kind=str(entry.get("kind", "numeric")),
                    categories=tuple(str(c) for c in entry.get("categories", ())),
                )
            )
        stats = values.get("stats")
        return cls(
            features=specs,
            stats=NormalizationStats.from_dict(stats) if stats else None,
        )

    @classmethod
    def numeric(cls, names: List[str]) -> "FeatureSchema":
        """Schema of plain numeric features."""
        return cls(features=[FeatureSpec(name=n) for n in names])


def load_schema(path: Union[str, Path]) -> FeatureSchema:
    """Read a schema file.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    DataFormatError
        If the content is not a valid schema.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Schema not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            values = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise DataFormatError(f"cannot parse schema {path}: {exc}") from None
    return FeatureSchema.from_dict(values or {})


def save_schema(schema: FeatureSchema, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(schema.to_dict(), f, indent=2)
        f.write("\n")
    return path
