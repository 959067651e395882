"""Loaders for dataset manifests, embedding matrices, and 2-D projections.

All loaders are pure: they either return a fully validated, immutable
structure or raise. Nothing partially valid ever escapes.

File formats
------------
Manifest: a single JSON document::

    {
      "schema_version": 1,
      "classes": ["cat", "dog"],
      "items": [
        {"id": 0, "image_uri": "thumbs/0.png", "true_class": 0,
         "predicted_class": 1},
        ...
      ]
    }

``predicted_class`` must be present on every item or on none.

Embeddings: either whitespace-delimited text (one row per line) or, for
files with a ``.bin`` suffix, a raw binary layout of an 8-byte header (two
little-endian uint32: row count, column count) followed by row-major
little-endian float32 values. Text is convenient for tests, binary for
datasets in the 10^4..10^5 range.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NonFiniteError, ParseError, ShapeError, ValidationError

MANIFEST_SCHEMA_VERSION = 1

_BINARY_SUFFIX = ".bin"
_BINARY_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class ImageRecord:
    """One image: dense id, opaque thumbnail URI, class labels."""

    id: int
    image_uri: str
    true_class: int
    predicted_class: int | None = None


@dataclass(frozen=True)
class DatasetManifest:
    """Validated dataset description with a shared class-name table."""

    items: tuple[ImageRecord, ...]
    classes: tuple[str, ...]
    has_predictions: bool

    @property
    def n_items(self) -> int:
        return len(self.items)

    def true_classes(self) -> np.ndarray:
        return np.array([it.true_class for it in self.items], dtype=np.int64)

    def predicted_classes(self) -> np.ndarray:
        """Per-item predicted class indices; raises if predictions absent."""
        if not self.has_predictions:
            raise ValidationError("manifest has no predictions")
        return np.array([it.predicted_class for it in self.items], dtype=np.int64)

    def misclassified(self) -> np.ndarray | None:
        """Boolean mask of items whose prediction differs from the truth."""
        if not self.has_predictions:
            return None
        return self.true_classes() != self.predicted_classes()


@dataclass(frozen=True)
class EmbeddingMatrix:
    """N x D high-dimensional image representations."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] < 1:
            raise ShapeError(f"embeddings must be 2-D with D >= 1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("embeddings contain NaN or infinite values")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Projection2D:
    """N points in the plane, typically a precomputed t-SNE/UMAP output."""

    points: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ShapeError(f"projection must be N x 2, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise NonFiniteError("projection contains NaN or infinite values")
        points = points.copy()
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def rows(self) -> int:
        return self.points.shape[0]


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a manifest JSON file.

    Item ids are normalized to the dense range [0, N) by sorting on the
    declared id; embedding row i corresponds to the item at normalized id i.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest {path} is not valid JSON: {exc}") from exc
    return manifest_from_dict(raw)


def manifest_from_dict(raw: object) -> DatasetManifest:
    """Validate an already parsed manifest document."""
    if not isinstance(raw, dict):
        raise ParseError("manifest root must be a JSON object")
    version = raw.get("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise ParseError(f"unsupported manifest schema_version: {version!r}")
    classes = raw.get("classes")
    if not isinstance(classes, list) or not all(isinstance(c, str) for c in classes):
        raise ParseError("manifest 'classes' must be a list of strings")
    items_raw = raw.get("items")
    if not isinstance(items_raw, list) or not items_raw:
        raise ValidationError("manifest must contain at least one item")

    records = []
    for entry in items_raw:
        if not isinstance(entry, dict):
            raise ParseError("manifest items must be JSON objects")
        try:
            rec = ImageRecord(
                id=int(entry["id"]),
                image_uri=str(entry["image_uri"]),
                true_class=int(entry["true_class"]),
                predicted_class=(
                    int(entry["predicted_class"]) if entry.get("predicted_class") is not None else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed manifest item: {entry!r}") from exc
        records.append(rec)

    ids = [rec.id for rec in records]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate item ids in manifest")

    n_classes = len(classes)
    n_predicted = sum(rec.predicted_class is not None for rec in records)
    if n_predicted not in (0, len(records)):
        raise ValidationError(
            f"predictions must be present for all items or none, got {n_predicted}/{len(records)}"
        )
    has_predictions = n_predicted == len(records)

    for rec in records:
        if not 0 <= rec.true_class < n_classes:
            raise ValidationError(f"item {rec.id}: true_class {rec.true_class} out of range")
        if rec.predicted_class is not None and not 0 <= rec.predicted_class < n_classes:
            raise ValidationError(f"item {rec.id}: predicted_class {rec.predicted_class} out of range")

    records.sort(key=lambda rec: rec.id)
    normalized = tuple(
        ImageRecord(
            id=i,
            image_uri=rec.image_uri,
            true_class=rec.true_class,
            predicted_class=rec.predicted_class,
        )
        for i, rec in enumerate(records)
    )
    return DatasetManifest(items=normalized, classes=tuple(classes), has_predictions=has_predictions)


def manifest_to_dict(manifest: DatasetManifest) -> dict:
    """Inverse of :func:`manifest_from_dict`."""
    items = []
    for rec in manifest.items:
        entry: dict = {"id": rec.id, "image_uri": rec.image_uri, "true_class": rec.true_class}
        if rec.predicted_class is not None:
            entry["predicted_class"] = rec.predicted_class
        items.append(entry)
    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "classes": list(manifest.classes),
        "items": items,
    }


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(manifest_to_dict(manifest), sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def _load_matrix(path: Path) -> np.ndarray:
    if path.suffix == _BINARY_SUFFIX:
        try:
            blob = path.read_bytes()
        except OSError as exc:
            raise ParseError(f"cannot read matrix {path}: {exc}") from exc
        if len(blob) < _BINARY_HEADER.size:
            raise ParseError(f"{path}: truncated binary matrix header")
        rows, cols = _BINARY_HEADER.unpack_from(blob)
        expected = _BINARY_HEADER.size + 4 * rows * cols
        if len(blob) != expected:
            raise ParseError(f"{path}: binary matrix payload is {len(blob)} bytes, expected {expected}")
        values = np.frombuffer(blob, dtype="<f4", offset=_BINARY_HEADER.size)
        return values.astype(np.float64).reshape(rows, cols)
    try:
        with path.open("r", encoding="utf-8") as fh:
            values = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    except OSError as exc:
        raise ParseError(f"cannot read matrix {path}: {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{path} is not a valid text matrix: {exc}") from exc
    return values


def write_embeddings(values: np.ndarray, path: str | Path) -> None:
    """Write a matrix in the format implied by the path suffix."""
    path = Path(path)
    values = np.asarray(values, dtype=np.float64)
    if path.suffix == _BINARY_SUFFIX:
        rows, cols = values.shape
        with path.open("wb") as fh:
            fh.write(_BINARY_HEADER.pack(rows, cols))
            fh.write(np.ascontiguousarray(values, dtype="<f4").tobytes())
    else:
        np.savetxt(path, values, fmt="%.17g")


def load_embeddings(path: str | Path, expected_rows: int) -> EmbeddingMatrix:
    """Load an embedding matrix and check it against the manifest row count."""
    values = _load_matrix(Path(path))
    if values.shape[0] != expected_rows:
        raise ShapeError(f"{path}: expected {expected_rows} rows, found {values.shape[0]}")
    return EmbeddingMatrix(values=values)


def load_projection(path: str | Path, expected_rows: int) -> Projection2D:
    """Load a 2-D projection; same formats as embeddings with D fixed to 2."""
    values = _load_matrix(Path(path))
    if values.ndim != 2 or values.shape[1] != 2:
        raise ShapeError(f"{path}: projection must have exactly 2 columns, found shape {values.shape}")
    if values.shape[0] != expected_rows:
        raise ShapeError(f"{path}: expected {expected_rows} rows, found {values.shape[0]}")
    return Projection2D(points=values)
