"""Command-line pipeline: build artifacts, gridify projections, evaluate,
and serve the query API.

Every engine error maps to a distinct nonzero exit code (see errors.py);
usage errors exit with the argparse convention of 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import artifact as artifact_io
from .errors import CanopymapError, RangeError
from .gridify import grid_from_dict, grid_to_dict, gridify
from .hclust import ward_dendrogram
from .ingest import load_embeddings, load_manifest, load_projection
from .metrics import (
    DEFAULT_K_VALUES,
    NeighborReport,
    dendromap_distance_oracle,
    grid_distance_oracle,
    knn_preservation,
)


def cmd_build(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    embeddings = load_embeddings(args.embeddings, manifest.n_items)
    projection_path = args.projection
    if projection_path is not None:
        load_projection(projection_path, manifest.n_items)  # validate before committing
    dendrogram = ward_dendrogram(embeddings)
    out_dir = artifact_io.write_artifact(
        args.out,
        manifest,
        dendrogram,
        embeddings_path=args.embeddings,
        projection_path=projection_path,
    )
    print(f"built artifact for {manifest.n_items} images in {out_dir}")
    return 0


def cmd_gridify(args: argparse.Namespace) -> int:
    projection = load_projection(args.projection, _count_rows(args.projection))
    grid = gridify(projection, args.viewport_w, args.viewport_h, args.image_w, args.image_h)
    Path(args.out).write_text(artifact_io.canonical_json(grid_to_dict(grid)), encoding="utf-8")
    print(f"gridified {projection.rows} points onto {grid.grid_cols}x{grid.grid_rows} cells, cost {grid.total_cost:.6g}")
    return 0


def _count_rows(path: str) -> int:
    """Projections are self-describing; reuse the loader by peeking the shape."""
    from .ingest import _load_matrix

    return _load_matrix(Path(path)).shape[0]


def _parse_k_values(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise RangeError(f"bad k list {text!r}: {exc}") from exc
    if not values:
        raise RangeError("k list is empty")
    return values


def cmd_eval(args: argparse.Namespace) -> int:
    loaded = artifact_io.load_artifact(args.artifact)
    k_values = _parse_k_values(args.k_values)

    reports = [
        knn_preservation(
            loaded.embeddings,
            dendromap_distance_oracle(loaded.dendrogram),
            k_values,
            method_name="dendrogram",
        )
    ]
    if args.grid is not None:
        grid = grid_from_dict(json.loads(Path(args.grid).read_text(encoding="utf-8")))
        reports.append(
            knn_preservation(
                loaded.embeddings,
                grid_distance_oracle(grid),
                k_values,
                method_name="grid",
            )
        )
    report = NeighborReport.merge(*reports)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "neighbor_report.csv").write_text(report.to_csv(), encoding="utf-8")
    (out_dir / "neighbor_report.json").write_text(artifact_io.canonical_json(report.to_dict()), encoding="utf-8")
    for method in report.methods():
        summary = ", ".join(f"k={k}: {v:.3f}" for k, v in zip(report.k_values, report.mean_overlap[method]))
        print(f"{method}: {summary}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    loaded = artifact_io.load_artifact(args.artifact)
    serve(loaded, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="canopymap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="cluster embeddings and write an artifact directory")
    p_build.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p_build.add_argument("--embeddings", required=True, help="embedding matrix (.bin or text)")
    p_build.add_argument("--projection", default=None, help="optional 2-D projection to reference")
    p_build.add_argument("--out", required=True, help="artifact output directory")
    p_build.set_defaults(func=cmd_build)

    p_grid = sub.add_parser("gridify", help="snap a 2-D projection onto an even grid")
    p_grid.add_argument("--projection", required=True, help="2-D projection file")
    p_grid.add_argument("--out", required=True, help="output grid JSON path")
    p_grid.add_argument("--viewport-w", type=int, default=1200)
    p_grid.add_argument("--viewport-h", type=int, default=800)
    p_grid.add_argument("--image-w", type=int, default=40)
    p_grid.add_argument("--image-h", type=int, default=40)
    p_grid.set_defaults(func=cmd_gridify)

    p_eval = sub.add_parser("eval", help="neighbor-preservation report for an artifact")
    p_eval.add_argument("--artifact", required=True, help="artifact directory from `build`")
    p_eval.add_argument("--grid", default=None, help="grid JSON from `gridify` to include")
    p_eval.add_argument("--k-values", default=",".join(str(k) for k in DEFAULT_K_VALUES))
    p_eval.add_argument("--out", required=True, help="report output directory")
    p_eval.set_defaults(func=cmd_eval)

    p_serve = sub.add_parser("serve", help="run the read-only query service")
    p_serve.add_argument("--artifact", required=True, help="artifact directory from `build`")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CanopymapError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
