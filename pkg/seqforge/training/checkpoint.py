"""Checkpoint directories.

A checkpoint is a directory holding ``meta.json`` plus one binary blob per
weight tensor, named ``{group}.{parameter}.bin``. Each blob starts with a
16-byte header of eight little-endian uint16 values (the rank, then up to
seven dimensions, zero-filled) followed by the values as little-endian
float64 in row-major order.

Directories are written under a temporary name and renamed into place, so
a reader never observes a half-written checkpoint. Nothing time-dependent
is stored: two identical runs produce byte-identical checkpoints.
"""

import json
import os
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np

from seqforge.core.constants import CHECKPOINT_META
from seqforge.core.exceptions import CheckpointError
from seqforge.numerics.module import Module
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

HEADER_FIELDS = 8
HEADER_BYTES = 2 * HEADER_FIELDS
MAX_RANK = HEADER_FIELDS - 1
MAX_DIM = np.iinfo(np.uint16).max
FORMAT_VERSION = 1


# =============================================================================
# Blobs
# =============================================================================


def encode_blob(array: np.ndarray) -> bytes:
    """Serialize one array as header + little-endian float64 values.

    Raises
    ------
    CheckpointError
        If the rank exceeds seven or a dimension does not fit in uint16.
    """
    array = np.asarray(array, dtype="<f8", order="C")
    if array.ndim > MAX_RANK:
        raise CheckpointError(f"cannot store rank-{array.ndim} tensor (max {MAX_RANK})")
    if any(d > MAX_DIM for d in array.shape):
        raise CheckpointError(f"dimension too large for checkpoint header: {array.shape}")
    header = np.zeros(HEADER_FIELDS, dtype="<u2")
    header[0] = array.ndim
    header[1 : 1 + array.ndim] = array.shape
    return header.tobytes() + array.tobytes(order="C")


def decode_blob(payload: bytes, name: str = "<blob>") -> np.ndarray:
    """Inverse of ``encode_blob``.

    Raises
    ------
    CheckpointError
        If the header is truncated or the payload size disagrees with it.
    """
    if len(payload) < HEADER_BYTES:
        raise CheckpointError(f"{name}: truncated header")
    header = np.frombuffer(payload[:HEADER_BYTES], dtype="<u2")
    rank = int(header[0])
    if rank > MAX_RANK:
        raise CheckpointError(f"{name}: invalid rank {rank}")
    shape = tuple(int(d) for d in header[1 : 1 + rank])
    expected = HEADER_BYTES + 8 * int(np.prod(shape, dtype=np.int64))
    if len(payload) != expected:
        raise CheckpointError(
            f"{name}: expected {expected} bytes for shape {shape}, found {len(payload)}"
        )
    return np.frombuffer(payload[HEADER_BYTES:], dtype="<f8").reshape(shape).astype(np.float64)


# =============================================================================
# Directories
# =============================================================================


@dataclass
class Checkpoint:
    """In-memory view of a checkpoint directory.

    Attributes
    ----------
    tensors : Dict[str, Dict[str, np.ndarray]]
        Group name -> parameter name -> values.
    meta : Dict[str, Any]
        Everything else (hyperparameters, data dimensions, loss history).
    """

    tensors: Dict[str, Dict[str, np.ndarray]] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)

    def group(self, name: str) -> Dict[str, np.ndarray]:
        if name not in self.tensors:
            raise CheckpointError(f"checkpoint has no tensor group {name!r}")
        return self.tensors[name]

    def load_into(self, name: str, module: Module) -> None:
        """Copy a group's tensors into ``module`` in place."""
        try:
            module.load_state_dict(self.group(name))
        except (KeyError, ValueError) as e:
            raise CheckpointError(f"group {name!r} does not match the model: {e}") from e


def save_checkpoint(
    path: Union[str, Path],
    modules: Mapping[str, Module],
    meta: Dict[str, Any],
    arrays: Optional[Mapping[str, Mapping[str, np.ndarray]]] = None,
) -> Path:
    """Write a checkpoint directory atomically.

    Parameters
    ----------
    path : Union[str, Path]
        Target directory; replaced if it already exists.
    modules : Mapping[str, Module]
        Group name -> module whose ``state_dict`` is stored.
    meta : Dict[str, Any]
        JSON-serializable metadata.
    arrays : Optional[Mapping[str, Mapping[str, np.ndarray]]]
        Extra non-module tensor groups (e.g. k-means centroids).

    Returns
    -------
    Path
        The checkpoint directory.
    """
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)

    groups: Dict[str, Mapping[str, np.ndarray]] = {
        name: module.state_dict() for name, module in modules.items()
    }
    groups.update(arrays or {})
    index: Dict[str, Dict[str, Any]] = {}
    for group, state in groups.items():
        index[group] = {}
        for param, value in state.items():
            filename = f"{group}.{param}.bin"
            (tmp / filename).write_bytes(encode_blob(value))
            index[group][param] = {"file": filename, "shape": list(np.shape(value))}

    payload = dict(meta)
    payload["format_version"] = FORMAT_VERSION
    payload["tensors"] = index
    with open(tmp / CHECKPOINT_META, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")

    if path.exists():
        shutil.rmtree(path)
    os.replace(tmp, path)
    logger.info(f"Saved checkpoint to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """Read a checkpoint directory.

    Raises
    ------
    CheckpointError
        If the directory, its metadata or any blob is missing or corrupt.
    """
    path = Path(path)
    meta_path = path / CHECKPOINT_META
    if not meta_path.exists():
        raise CheckpointError(f"no checkpoint at {path}")
    try:
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
    except json.JSONDecodeError as e:
        raise CheckpointError(f"corrupt checkpoint metadata {meta_path}: {e}") from e
    if meta.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint format {meta.get('format_version')!r}")

    tensors: Dict[str, Dict[str, np.ndarray]] = {}
    for group, entries in meta.get("tensors", {}).items():
        tensors[group] = {}
        for param, entry in entries.items():
            blob = path / entry["file"]
            if not blob.exists():
                raise CheckpointError(f"missing tensor file {blob}")
            value = decode_blob(blob.read_bytes(), entry["file"])
            if list(value.shape) != list(entry["shape"]):
                raise CheckpointError(
                    f"{entry['file']}: header shape {value.shape} != recorded {entry['shape']}"
                )
            tensors[group][param] = value
    meta.pop("tensors", None)
    logger.debug(f"Loaded checkpoint {path}")
    return Checkpoint(tensors=tensors, meta=meta)
