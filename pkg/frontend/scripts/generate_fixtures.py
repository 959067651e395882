#!/usr/bin/env python3
"""Capture real service responses as test fixtures for the frontend.

Builds a small deterministic dataset with the engine, runs the query
service in-process, and saves the JSON bodies the UI tests replay. Rerun
after changing any wire format:

    python3 scripts/generate_fixtures.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from canopymap.artifact import load_artifact
from canopymap.cli import main as cli_main
from canopymap.ingest import write_embeddings
from canopymap.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

VIEWPORT_W, VIEWPORT_H = 1200, 800
IMAGE = 20

N, N_CLASSES, D = 24, 3, 8


def build_dataset(root: Path) -> Path:
    rng = np.random.default_rng(424242)
    centers = rng.normal(size=(N_CLASSES, D)) * 15
    true = np.repeat(np.arange(N_CLASSES), N // N_CLASSES)
    emb = centers[true] + rng.normal(size=(N, D))
    pred = np.where(rng.random(N) < 0.75, true, rng.integers(0, N_CLASSES, N))
    items = [
        {
            "id": i,
            "image_uri": f"thumbs/{i}.png",
            "true_class": int(true[i]),
            "predicted_class": int(pred[i]),
        }
        for i in range(N)
    ]
    (root / "manifest.json").write_text(
        json.dumps({"schema_version": 1, "classes": [f"class_{c}" for c in range(N_CLASSES)], "items": items})
    )
    write_embeddings(emb, root / "embeddings.txt")
    out = root / "artifact"
    code = cli_main(
        ["build", "--manifest", str(root / "manifest.json"), "--embeddings", str(root / "embeddings.txt"), "--out", str(out)]
    )
    assert code == 0
    return out


def save(name: str, payload: object) -> None:
    (FIXTURES / name).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    print(f"wrote {name}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        artifact_dir = build_dataset(Path(tmp))
        artifact = load_artifact(artifact_dir)
        client = TestClient(create_app(artifact))

        dataset = client.get("/dataset").json()
        save("dataset.json", dataset)

        dendrogram = artifact.dendrogram
        root_id = dendrogram.root_id
        nodes = [root_id, int(dendrogram.left[root_id]), int(dendrogram.right[root_id])]

        layouts: dict[str, object] = {}
        for node in nodes:
            leaf_count = int(dendrogram.leaf_count[node])
            for k in range(1, min(leaf_count, 10) + 1):
                response = client.get(
                    "/layout", params={"node": node, "k": k, "w": VIEWPORT_W, "h": VIEWPORT_H, "img": IMAGE}
                )
                assert response.status_code == 200, response.text
                layouts[f"{node}:{k}"] = response.json()
        save("layouts.json", layouts)

        tables = {str(node): client.get("/class-table", params={"node": node}).json() for node in nodes}
        save("class_tables.json", tables)

        similar = {str(i): client.get("/similar", params={"id": i, "n": 5}).json() for i in (0, 7, 23)}
        save("similar.json", similar)


if __name__ == "__main__":
    main()
