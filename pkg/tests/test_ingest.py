from __future__ import annotations

import json

import numpy as np
import pytest

from canopymap.errors import NonFiniteError, ParseError, ShapeError, ValidationError
from canopymap.ingest import (
    load_embeddings,
    load_manifest,
    load_projection,
    manifest_to_dict,
    write_embeddings,
    write_manifest,
)

from conftest import load_schema


def manifest_doc(items, classes=("a", "b")):
    return {"schema_version": 1, "classes": list(classes), "items": items}


def write_doc(tmp_path, doc, name="manifest.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


class TestLoadManifest:
    def test_minimal_without_predictions(self, tmp_path):
        doc = manifest_doc(
            [
                {"id": 0, "image_uri": "0.png", "true_class": 0},
                {"id": 1, "image_uri": "1.png", "true_class": 1},
                {"id": 2, "image_uri": "2.png", "true_class": 0},
            ]
        )
        manifest = load_manifest(write_doc(tmp_path, doc))
        assert manifest.n_items == 3
        assert manifest.has_predictions is False
        assert manifest.classes == ("a", "b")

    def test_partial_predictions_rejected(self, tmp_path):
        doc = manifest_doc(
            [
                {"id": 0, "image_uri": "0.png", "true_class": 0},
                {"id": 1, "image_uri": "1.png", "true_class": 1, "predicted_class": 0},
            ]
        )
        with pytest.raises(ValidationError):
            load_manifest(write_doc(tmp_path, doc))

    def test_cifar100_style_manifest(self, tmp_path):
        # 100 classes x 600 items each, everything predicted.
        items = [
            {"id": i, "image_uri": f"{i}.png", "true_class": i % 100, "predicted_class": (i + 1) % 100}
            for i in range(60000)
        ]
        doc = manifest_doc(items, classes=[f"c{c}" for c in range(100)])
        manifest = load_manifest(write_doc(tmp_path, doc))
        assert manifest.n_items == 60000
        assert manifest.has_predictions is True

    def test_duplicate_ids_rejected(self, tmp_path):
        doc = manifest_doc(
            [
                {"id": 0, "image_uri": "0.png", "true_class": 0},
                {"id": 0, "image_uri": "1.png", "true_class": 1},
            ]
        )
        with pytest.raises(ValidationError):
            load_manifest(write_doc(tmp_path, doc))

    def test_class_index_out_of_range(self, tmp_path):
        doc = manifest_doc([{"id": 0, "image_uri": "0.png", "true_class": 7}])
        with pytest.raises(ValidationError):
            load_manifest(write_doc(tmp_path, doc))

    def test_sparse_ids_normalized_dense(self, tmp_path):
        doc = manifest_doc(
            [
                {"id": 9, "image_uri": "nine.png", "true_class": 0},
                {"id": 2, "image_uri": "two.png", "true_class": 1},
            ]
        )
        manifest = load_manifest(write_doc(tmp_path, doc))
        assert [rec.id for rec in manifest.items] == [0, 1]
        assert [rec.image_uri for rec in manifest.items] == ["two.png", "nine.png"]

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ParseError):
            load_manifest(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_manifest(tmp_path / "nope.json")

    def test_round_trip(self, tmp_path):
        doc = manifest_doc(
            [
                {"id": 0, "image_uri": "0.png", "true_class": 0, "predicted_class": 1},
                {"id": 1, "image_uri": "1.png", "true_class": 1, "predicted_class": 1},
            ]
        )
        manifest = load_manifest(write_doc(tmp_path, doc))
        out = tmp_path / "rewritten.json"
        write_manifest(manifest, out)
        assert load_manifest(out) == manifest

    def test_round_trip_matches_schema(self, tmp_path):
        jsonschema = pytest.importorskip("jsonschema")
        doc = manifest_doc([{"id": 0, "image_uri": "0.png", "true_class": 0}])
        manifest = load_manifest(write_doc(tmp_path, doc))
        jsonschema.validate(manifest_to_dict(manifest), load_schema("manifest.schema.json"))


class TestLoadEmbeddings:
    def test_text_matrix(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("0 1\n2 3\n4 5\n6 7\n", encoding="utf-8")
        emb = load_embeddings(path, expected_rows=4)
        assert (emb.rows, emb.dims) == (4, 2)
        assert emb.values[3, 1] == 7.0

    def test_row_mismatch(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("0 1\n2 3\n4 5\n6 7\n", encoding="utf-8")
        with pytest.raises(ShapeError):
            load_embeddings(path, expected_rows=5)

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("0 1\nnan 3\n", encoding="utf-8")
        with pytest.raises(NonFiniteError):
            load_embeddings(path, expected_rows=2)

    def test_binary_round_trip(self, tmp_path, rng):
        values = rng.normal(size=(17, 5)).astype(np.float32).astype(np.float64)
        path = tmp_path / "emb.bin"
        write_embeddings(values, path)
        emb = load_embeddings(path, expected_rows=17)
        np.testing.assert_array_equal(emb.values, values)

    def test_binary_truncated(self, tmp_path):
        path = tmp_path / "emb.bin"
        path.write_bytes(b"\x04\x00\x00\x00\x02\x00\x00\x00" + b"\x00" * 7)
        with pytest.raises(ParseError):
            load_embeddings(path, expected_rows=4)

    def test_values_are_immutable(self, tmp_path):
        path = tmp_path / "emb.txt"
        path.write_text("1 2\n3 4\n", encoding="utf-8")
        emb = load_embeddings(path, expected_rows=2)
        with pytest.raises(ValueError):
            emb.values[0, 0] = 99.0


class TestLoadProjection:
    def test_basic(self, tmp_path, rng):
        path = tmp_path / "proj.txt"
        write_embeddings(rng.normal(size=(10, 2)), path)
        proj = load_projection(path, expected_rows=10)
        assert proj.rows == 10

    def test_wrong_width(self, tmp_path, rng):
        path = tmp_path / "proj.txt"
        write_embeddings(rng.normal(size=(10, 3)), path)
        with pytest.raises(ShapeError):
            load_projection(path, expected_rows=10)

    def test_infinite_coordinate(self, tmp_path):
        path = tmp_path / "proj.txt"
        path.write_text("0 0\n1 inf\n", encoding="utf-8")
        with pytest.raises(NonFiniteError):
            load_projection(path, expected_rows=2)
