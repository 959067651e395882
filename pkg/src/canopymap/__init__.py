"""canopymap: explore large image datasets as a zoomable cluster treemap.

The engine clusters image embeddings into an exact Ward dendrogram, renders
any k-cluster cut of it as an image-quantized slice-dice treemap, ships a
gridified-projection baseline built on exact linear assignment, and
evaluates both through a k-nearest-neighbor preservation harness.
"""

from .errors import (
    CanopymapError,
    DegenerateSpace,
    EmptyInput,
    EmptySubset,
    NoPredictions,
    NonFiniteError,
    ParseError,
    RangeError,
    ShapeError,
    UnknownLeaf,
    UnknownNode,
    ValidationError,
)
from .gridify import GridAssignment, gridify, make_grid, solve_lap, zoom_regrid
from .hclust import ClusterCut, Dendrogram, cut_k, lca_hops, subtree_cut, ward_dendrogram
from .ingest import (
    DatasetManifest,
    EmbeddingMatrix,
    ImageRecord,
    Projection2D,
    load_embeddings,
    load_manifest,
    load_projection,
)
from .layout import LayoutConfig, LayoutTree, capacity, layout, partition, sample_images, zoom
from .metrics import (
    ClassStats,
    NeighborReport,
    class_table,
    dendromap_distance_oracle,
    grid_distance_oracle,
    knn_preservation,
    similar_images,
)

__version__ = "0.1.0"

__all__ = [
    "CanopymapError",
    "ClassStats",
    "ClusterCut",
    "DatasetManifest",
    "DegenerateSpace",
    "Dendrogram",
    "EmbeddingMatrix",
    "EmptyInput",
    "EmptySubset",
    "GridAssignment",
    "ImageRecord",
    "LayoutConfig",
    "LayoutTree",
    "NeighborReport",
    "NoPredictions",
    "NonFiniteError",
    "ParseError",
    "Projection2D",
    "RangeError",
    "ShapeError",
    "UnknownLeaf",
    "UnknownNode",
    "ValidationError",
    "capacity",
    "class_table",
    "cut_k",
    "dendromap_distance_oracle",
    "grid_distance_oracle",
    "gridify",
    "knn_preservation",
    "layout",
    "lca_hops",
    "load_embeddings",
    "load_manifest",
    "load_projection",
    "make_grid",
    "partition",
    "sample_images",
    "similar_images",
    "solve_lap",
    "subtree_cut",
    "ward_dendrogram",
    "zoom",
    "zoom_regrid",
]
