"""Read-only HTTP query service over a loaded build artifact.

Endpoints (all GET, all JSON unless noted):

  /dataset                     dataset summary
  /layout?node=&k=&w=&h=&img=  treemap layout for a zoom root (defaults:
                               root node, k=8, 1200x800 viewport, 40px
                               medium images)
  /class-table?node=           per-class error statistics over a node's leaves
  /similar?id=&n=              ranked neighbor ids in embedding space
  /image/{id}                  thumbnail bytes, or a redirect for remote URIs

The service holds the artifact immutably in memory; identical requests
return byte-identical bodies. Invalid parameters yield 400, unknown nodes
or images 404, always with a structured error body.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, RedirectResponse

from .artifact import LoadedArtifact, canonical_json
from .errors import (
    CanopymapError,
    DegenerateSpace,
    EmptySubset,
    NoPredictions,
    RangeError,
    UnknownLeaf,
    UnknownNode,
    ValidationError,
)
from .layout import LayoutConfig, layout_to_dict, zoom
from .metrics import class_table, similar_images

DEFAULT_K = 8
DEFAULT_VIEWPORT_W = 1200
DEFAULT_VIEWPORT_H = 800
DEFAULT_IMAGE_SIZE = 40
DEFAULT_SIMILAR_N = 8

_STATUS_BY_ERROR = {
    RangeError: 400,
    ValidationError: 400,
    DegenerateSpace: 400,
    NoPredictions: 400,
    EmptySubset: 400,
    UnknownNode: 404,
    UnknownLeaf: 404,
}


def _json_response(payload: object, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), media_type="application/json", status_code=status_code)


def _error_response(kind: str, message: str, status_code: int) -> Response:
    return _json_response({"error": {"type": kind, "message": message}}, status_code=status_code)


def create_app(artifact: LoadedArtifact) -> FastAPI:
    app = FastAPI(title="canopymap query service", docs_url=None, redoc_url=None)
    dendrogram = artifact.dendrogram
    manifest = artifact.manifest

    @app.exception_handler(CanopymapError)
    async def handle_engine_error(request: Request, exc: CanopymapError) -> Response:
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        return _error_response(type(exc).__name__, str(exc), status)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError) -> Response:
        return _error_response("InvalidParameter", str(exc.errors()), 400)

    @app.get("/dataset")
    def dataset() -> Response:
        return _json_response(
            {
                "schema_version": 1,
                "item_count": manifest.n_items,
                "classes": list(manifest.classes),
                "has_predictions": manifest.has_predictions,
                "root_id": dendrogram.root_id,
                "node_count": dendrogram.n_nodes,
                "embedding_dims": artifact.embeddings.dims,
                "true_classes": [rec.true_class for rec in manifest.items],
                "predicted_classes": (
                    [rec.predicted_class for rec in manifest.items] if manifest.has_predictions else None
                ),
            }
        )

    @app.get("/layout")
    def layout_endpoint(
        node: int | None = None,
        k: int = DEFAULT_K,
        w: int = DEFAULT_VIEWPORT_W,
        h: int = DEFAULT_VIEWPORT_H,
        img: int = DEFAULT_IMAGE_SIZE,
    ) -> Response:
        node_id = dendrogram.root_id if node is None else node
        config = LayoutConfig(viewport_w=w, viewport_h=h, image_w=img, image_h=img)
        tree = zoom(dendrogram, node_id, k, config, manifest=manifest)
        return _json_response(layout_to_dict(tree))

    @app.get("/class-table")
    def class_table_endpoint(node: int | None = None) -> Response:
        node_id = dendrogram.check_node(dendrogram.root_id if node is None else node)
        rows = class_table(manifest, dendrogram.leaves_of(node_id))
        return _json_response(
            {
                "schema_version": 1,
                "node": node_id,
                "rows": [
                    {
                        "class_id": row.class_id,
                        "class_name": manifest.classes[row.class_id],
                        "true_count": row.true_count,
                        "predicted_count": row.predicted_count,
                        "accuracy": row.accuracy,
                        "false_negative_rate": row.false_negative_rate,
                        "false_positive_rate": row.false_positive_rate,
                    }
                    for row in rows
                ],
            }
        )

    @app.get("/similar")
    def similar_endpoint(id: int, n: int = DEFAULT_SIMILAR_N) -> Response:
        if not 0 <= id < manifest.n_items:
            raise UnknownLeaf(f"image id {id} outside [0, {manifest.n_items})")
        neighbor_ids = similar_images(artifact.embeddings, id, n)
        values = artifact.embeddings.values
        record = manifest.items[id]
        return _json_response(
            {
                "schema_version": 1,
                "id": id,
                "true_class": record.true_class,
                "predicted_class": record.predicted_class,
                "neighbors": [
                    {
                        "id": int(j),
                        "distance": float(((values[j] - values[id]) ** 2).sum() ** 0.5),
                    }
                    for j in neighbor_ids
                ],
            }
        )

    @app.get("/image/{image_id}")
    def image_endpoint(image_id: int):
        if not 0 <= image_id < manifest.n_items:
            raise UnknownLeaf(f"image id {image_id} outside [0, {manifest.n_items})")
        uri = manifest.items[image_id].image_uri
        if uri.startswith(("http://", "https://")):
            return RedirectResponse(uri, status_code=307)
        path = Path(uri)
        if not path.is_absolute():
            path = artifact.root / path
        if not path.is_file():
            return _error_response("MissingImage", f"no file for image {image_id} at {path}", 404)
        return FileResponse(path)

    return app


def serve(artifact: LoadedArtifact, host: str, port: int) -> None:
    """Run the query service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(artifact), host=host, port=port, log_level="info")
