"""Build artifacts: the on-disk package the query service and evaluator load.

An artifact directory holds the normalized manifest, the dendrogram as
nested JSON, and a metadata document referencing the input files by path
and content digest. Nothing in the artifact depends on wall-clock time, so
rebuilding from identical inputs is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import metadata as importlib_metadata
from pathlib import Path

from .errors import ParseError, ValidationError
from .hclust import Dendrogram, load_dendrogram, write_dendrogram
from .ingest import (
    DatasetManifest,
    EmbeddingMatrix,
    Projection2D,
    load_embeddings,
    load_manifest,
    load_projection,
    write_manifest,
)

ARTIFACT_SCHEMA_VERSION = 1

MANIFEST_FILE = "manifest.json"
DENDROGRAM_FILE = "dendrogram.json"
META_FILE = "meta.json"


def canonical_json(payload: object) -> str:
    """Stable JSON text: sorted keys, compact separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _tool_version() -> str:
    try:
        return importlib_metadata.version("canopymap")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass(frozen=True)
class LoadedArtifact:
    """An artifact pulled into memory, ready to serve queries."""

    root: Path
    manifest: DatasetManifest
    dendrogram: Dendrogram
    embeddings: EmbeddingMatrix
    projection: Projection2D | None
    meta: dict


def write_artifact(
    out_dir: str | Path,
    manifest: DatasetManifest,
    dendrogram: Dendrogram,
    embeddings_path: str | Path,
    projection_path: str | Path | None = None,
) -> Path:
    """Write manifest, dendrogram, and metadata into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(manifest, out_dir / MANIFEST_FILE)
    write_dendrogram(dendrogram, out_dir / DENDROGRAM_FILE)

    embeddings_path = Path(embeddings_path)
    inputs: dict = {
        "embeddings": {"path": str(embeddings_path), "sha256": _digest(embeddings_path)},
    }
    if projection_path is not None:
        projection_path = Path(projection_path)
        inputs["projection"] = {"path": str(projection_path), "sha256": _digest(projection_path)}
    meta = {
        "schema_version": ARTIFACT_SCHEMA_VERSION,
        "generator": {"name": "canopymap", "version": _tool_version()},
        "parameters": {"linkage": "ward", "metric": "euclidean"},
        "item_count": manifest.n_items,
        "inputs": inputs,
    }
    (out_dir / META_FILE).write_text(canonical_json(meta), encoding="utf-8")
    return out_dir


def load_artifact(artifact_dir: str | Path) -> LoadedArtifact:
    """Load an artifact directory and its referenced embedding files."""
    root = Path(artifact_dir)
    meta_path = root / META_FILE
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read artifact metadata {meta_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"artifact metadata {meta_path} is not valid JSON: {exc}") from exc
    if meta.get("schema_version") != ARTIFACT_SCHEMA_VERSION:
        raise ParseError(f"unsupported artifact schema_version: {meta.get('schema_version')!r}")

    manifest = load_manifest(root / MANIFEST_FILE)
    dendrogram = load_dendrogram(root / DENDROGRAM_FILE)
    if dendrogram.n_leaves != manifest.n_items:
        raise ValidationError(
            f"artifact inconsistent: dendrogram has {dendrogram.n_leaves} leaves, manifest {manifest.n_items} items"
        )

    embeddings = load_embeddings(_resolve(root, meta["inputs"]["embeddings"]["path"]), manifest.n_items)
    projection = None
    if "projection" in meta["inputs"]:
        projection = load_projection(_resolve(root, meta["inputs"]["projection"]["path"]), manifest.n_items)
    return LoadedArtifact(
        root=root,
        manifest=manifest,
        dendrogram=dendrogram,
        embeddings=embeddings,
        projection=projection,
        meta=meta,
    )


def _resolve(root: Path, path_str: str) -> Path:
    """Input paths recorded relative stay usable when the tree moves."""
    path = Path(path_str)
    if path.is_absolute() or path.exists():
        return path
    return root / path
