from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from canopymap.ingest import DatasetManifest, EmbeddingMatrix, ImageRecord

ACCEPTANCE_MARK = "acceptance"


def pytest_configure(config):
    config.addinivalue_line("markers", f"{ACCEPTANCE_MARK}(name): top-level acceptance criterion")


def make_manifest(n_items: int, n_classes: int, predictions=None, true_classes=None) -> DatasetManifest:
    """Small synthetic manifest; predictions may be None for a bare dataset."""
    classes = tuple(f"class_{c}" for c in range(n_classes))
    if true_classes is None:
        true_classes = [i % n_classes for i in range(n_items)]
    items = tuple(
        ImageRecord(
            id=i,
            image_uri=f"thumbs/{i}.png",
            true_class=int(true_classes[i]),
            predicted_class=None if predictions is None else int(predictions[i]),
        )
        for i in range(n_items)
    )
    return DatasetManifest(items=items, classes=classes, has_predictions=predictions is not None)


def make_embeddings(rng: np.random.Generator, n: int, d: int) -> EmbeddingMatrix:
    return EmbeddingMatrix(values=rng.normal(size=(n, d)))


def balanced_tree(n_leaves: int):
    """Ward tree over 1-D points spaced so merges nest in powers of two."""
    from canopymap.hclust import ward_dendrogram

    assert n_leaves & (n_leaves - 1) == 0
    coords = np.zeros(n_leaves)
    step = 1.0
    block = 1
    while block < n_leaves:
        for start in range(block, n_leaves, 2 * block):
            coords[start : start + block] += coords[start - block : start] - coords[start - block] + step
        step *= 10.0
        block *= 2
    return ward_dendrogram(coords.reshape(-1, 1))


def gaussian_clusters(rng: np.random.Generator, n_clusters: int, per_cluster: int, d: int, spread=25.0):
    """Well-separated blobs plus the cluster label of each point."""
    centers = rng.normal(size=(n_clusters, d)) * spread
    points = np.vstack([centers[c] + rng.normal(size=(per_cluster, d)) for c in range(n_clusters)])
    labels = np.repeat(np.arange(n_clusters), per_cluster)
    return points, labels


def write_manifest_file(path: Path, manifest: DatasetManifest) -> Path:
    from canopymap.ingest import manifest_to_dict

    path.write_text(json.dumps(manifest_to_dict(manifest)), encoding="utf-8")
    return path


def toy_dataset(
    root: Path,
    n: int = 100,
    n_classes: int = 4,
    d: int = 6,
    with_predictions: bool = True,
    with_projection: bool = False,
    seed: int = 7,
    thumbnails: bool = False,
) -> dict[str, Path]:
    """Write a small synthetic dataset (manifest + matrices) under `root`."""
    from canopymap.ingest import write_embeddings

    rng = np.random.default_rng(seed)
    true = rng.integers(0, n_classes, n)
    predictions = np.where(rng.random(n) < 0.7, true, rng.integers(0, n_classes, n)) if with_predictions else None
    manifest = make_manifest(n, n_classes, predictions=predictions, true_classes=true)
    if thumbnails:
        thumb_dir = root / "thumbs"
        thumb_dir.mkdir(parents=True, exist_ok=True)
        for i in range(n):
            (thumb_dir / f"{i}.png").write_bytes(b"\x89PNG-stub-" + str(i).encode())
    root.mkdir(parents=True, exist_ok=True)
    paths = {
        "manifest": write_manifest_file(root / "manifest.json", manifest),
        "embeddings": root / "embeddings.txt",
    }
    write_embeddings(rng.normal(size=(n, d)), paths["embeddings"])
    if with_projection:
        paths["projection"] = root / "projection.txt"
        write_embeddings(rng.normal(size=(n, 2)), paths["projection"])
    return paths


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def load_schema(name: str) -> dict:
    schema_path = Path(__file__).resolve().parent.parent / "schemas" / name
    return json.loads(schema_path.read_text(encoding="utf-8"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            for mark_name, args in getattr(report, "user_properties", []) or []:
                if mark_name == ACCEPTANCE_MARK:
                    status = "PASS" if outcome == "passed" else "FAIL"
                    lines.append(f"ACCEPTANCE {status}: {args}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Tag the running test with its acceptance-criterion label."""

    def tag(label: str) -> None:
        request.node.user_properties.append((ACCEPTANCE_MARK, label))

    return tag
