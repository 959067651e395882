"""Slice-dice treemap layout quantized to fixed-size image cells.

A cluster cut is rendered by recursively partitioning the viewport: each
internal node splits its rectangle between its two children, dicing
(vertical split line) when the space is a horizontal rectangle and slicing
otherwise. Split positions are proportional to leaf counts but snapped to
whole image columns/rows so thumbnails are never clipped; a fixed padding
then insets every child so the parent stays visible behind it.

All geometry is integer pixels and every function here is pure, so a layout
is a deterministic function of (dendrogram, cut, config).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSpace, RangeError, ValidationError
from .hclust import ClusterCut, Dendrogram, subtree_cut
from .ingest import DatasetManifest

LAYOUT_SCHEMA_VERSION = 1

DEFAULT_PADDING = 10
DEFAULT_HEADER_H = 20


class Rect(NamedTuple):
    """Axis-aligned rectangle in pixels."""

    x: int
    y: int
    w: int
    h: int


@dataclass(frozen=True)
class LayoutConfig:
    viewport_w: int
    viewport_h: int
    image_w: int
    image_h: int
    padding: int = DEFAULT_PADDING
    header_h: int = DEFAULT_HEADER_H

    def __post_init__(self) -> None:
        if self.viewport_w < 1 or self.viewport_h < 1 or self.image_w < 1 or self.image_h < 1:
            raise RangeError("viewport and image dimensions must be positive")
        if self.padding < 0 or self.header_h < 0:
            raise RangeError("padding and header height cannot be negative")
        if self.image_w > self.viewport_w or self.image_h > self.viewport_h:
            raise RangeError("image cell larger than the viewport")


@dataclass(frozen=True)
class ClusterHeader:
    image_count: int
    accuracy: float | None  # present iff the dataset has predictions


@dataclass(frozen=True)
class ImagePlacement:
    image_id: int
    cell: tuple[int, int]  # (col, row) within the rect's image grid
    misclassified: bool | None


@dataclass(frozen=True)
class LayoutNode:
    node_id: int
    rect: Rect
    depth_remaining: int
    is_cut_leaf: bool
    header: ClusterHeader | None
    placements: tuple[ImagePlacement, ...]
    children: tuple["LayoutNode", ...]


@dataclass(frozen=True)
class LayoutTree:
    zoom_root: int
    k: int
    config: LayoutConfig
    root: LayoutNode

    def cut_leaves(self) -> list[LayoutNode]:
        found = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_cut_leaf:
                found.append(node)
            stack.extend(node.children)
        found.sort(key=lambda n: n.node_id)
        return found


def _inset(rect: Rect, pad: int) -> Rect:
    return Rect(rect.x + pad, rect.y + pad, max(rect.w - 2 * pad, 0), max(rect.h - 2 * pad, 0))


def partition(parent_rect: Rect, n_left: int, n_right: int, config: LayoutConfig) -> tuple[Rect, Rect]:
    """Split a rectangle between two children proportionally to image counts.

    Dice (split along x) when the parent is at least as wide as tall, slice
    otherwise. The first child's span is floor(fit * n_left / total) image
    cells, clamped to [1, fit-1] so a nonempty child never collapses; a child
    with zero images receives a zero-size rect while the sibling keeps the
    whole parent. Both returned rects are inset by the configured padding.
    """
    parent_rect = Rect(*parent_rect)
    n_left, n_right = int(n_left), int(n_right)
    if n_left < 0 or n_right < 0 or n_left + n_right < 1:
        raise RangeError(f"invalid child counts ({n_left}, {n_right})")
    if n_right == 0:
        return parent_rect, Rect(parent_rect.x + parent_rect.w, parent_rect.y + parent_rect.h, 0, 0)
    if n_left == 0:
        return Rect(parent_rect.x + parent_rect.w, parent_rect.y + parent_rect.h, 0, 0), parent_rect

    dice = parent_rect.w >= parent_rect.h
    axis_len = parent_rect.w if dice else parent_rect.h
    image_axis = config.image_w if dice else config.image_h
    fit = axis_len // image_axis
    if fit < 2:
        raise DegenerateSpace(
            f"rect {parent_rect} fits {fit} image cells along its split axis; need 2 for two clusters"
        )
    cells_left = (fit * n_left) // (n_left + n_right)
    cells_left = min(max(cells_left, 1), fit - 1)
    split = cells_left * image_axis

    x, y, w, h = parent_rect
    if dice:
        first, second = Rect(x, y, split, h), Rect(x + split, y, w - split, h)
    else:
        first, second = Rect(x, y, w, split), Rect(x, y + split, w, h - split)
    return _inset(first, config.padding), _inset(second, config.padding)


def capacity(rect: Rect, config: LayoutConfig) -> int:
    """Image cells available in a rect after reserving the header band."""
    rect = Rect(*rect)
    cols = max(rect.w // config.image_w, 0)
    rows = max((rect.h - config.header_h) // config.image_h, 0)
    return int(cols * rows)


def sample_images(ordered_ids, cap: int) -> list[int]:
    """Uniformly sample up to `cap` ids, preserving their order.

    With n ids and cap < n, picks indices floor(i * n / cap) for i in
    [0, cap): strictly increasing, first element always included.
    """
    ids = list(ordered_ids)
    cap = int(cap)
    if cap <= 0:
        return []
    n = len(ids)
    if cap >= n:
        return ids
    return [ids[(i * n) // cap] for i in range(cap)]


def layout(
    dendrogram: Dendrogram,
    cut: ClusterCut,
    config: LayoutConfig,
    zoom_root: int | None = None,
    manifest: DatasetManifest | None = None,
) -> LayoutTree:
    """Render a cluster cut as nested rectangles with sampled image grids.

    Every dendrogram node from zoom_root down to the cut nodes gets a rect;
    cut nodes additionally carry a header (image count, accuracy when the
    manifest has predictions) and grid placements sampled from the node's
    leaves in dendrogram order. Raises DegenerateSpace when some cut node's
    rect cannot hold a single image.
    """
    root = dendrogram.root_id if zoom_root is None else dendrogram.check_node(zoom_root)
    cut_set = set(int(v) for v in cut.node_ids)
    if len(cut_set) != len(cut.node_ids):
        raise ValidationError("cut contains duplicate nodes")
    total = sum(int(dendrogram.leaf_count[v]) for v in cut_set)
    if total != int(dendrogram.leaf_count[root]):
        raise ValidationError(
            f"cut covers {total} leaves but node {root} has {int(dendrogram.leaf_count[root])}"
        )

    mis = manifest.misclassified() if manifest is not None else None
    if mis is not None and len(mis) != dendrogram.n_leaves:
        raise ValidationError("manifest size does not match the dendrogram")

    def build(node: int, rect: Rect) -> LayoutNode:
        depth_remaining = int(dendrogram.subtree_height[node])
        if node in cut_set:
            return LayoutNode(
                node_id=node,
                rect=rect,
                depth_remaining=depth_remaining,
                is_cut_leaf=True,
                header=_header(dendrogram, node, mis),
                placements=_placements(dendrogram, node, rect, config, mis),
                children=(),
            )
        if dendrogram.is_leaf(node):
            raise ValidationError(f"cut does not cover leaf {node}")
        left, right = int(dendrogram.left[node]), int(dendrogram.right[node])
        left_rect, right_rect = partition(
            rect, int(dendrogram.leaf_count[left]), int(dendrogram.leaf_count[right]), config
        )
        return LayoutNode(
            node_id=node,
            rect=rect,
            depth_remaining=depth_remaining,
            is_cut_leaf=False,
            header=None,
            placements=(),
            children=(build(left, left_rect), build(right, right_rect)),
        )

    viewport = Rect(0, 0, config.viewport_w, config.viewport_h)
    return LayoutTree(zoom_root=root, k=cut.k, config=config, root=build(root, viewport))


def _header(dendrogram: Dendrogram, node: int, mis: np.ndarray | None) -> ClusterHeader:
    count = int(dendrogram.leaf_count[node])
    if mis is None:
        return ClusterHeader(image_count=count, accuracy=None)
    wrong = int(np.count_nonzero(mis[dendrogram.leaves_of(node)]))
    return ClusterHeader(image_count=count, accuracy=(count - wrong) / count)


def _placements(
    dendrogram: Dendrogram,
    node: int,
    rect: Rect,
    config: LayoutConfig,
    mis: np.ndarray | None,
) -> tuple[ImagePlacement, ...]:
    cap = capacity(rect, config)
    if cap < 1:
        raise DegenerateSpace(f"cluster {node}: rect {rect} cannot hold one {config.image_w}x{config.image_h} image")
    ordered = [int(v) for v in dendrogram.leaves_of(node)]
    sampled = sample_images(ordered, cap)
    cols = rect.w // config.image_w
    return tuple(
        ImagePlacement(
            image_id=image_id,
            cell=(idx % cols, idx // cols),
            misclassified=None if mis is None else bool(mis[image_id]),
        )
        for idx, image_id in enumerate(sampled)
    )


def zoom(
    dendrogram: Dendrogram,
    node_id: int,
    k: int,
    config: LayoutConfig,
    manifest: DatasetManifest | None = None,
) -> LayoutTree:
    """Lay out one subtree across the full viewport.

    k is clamped to the subtree's leaf count, so zooming into a leaf shows a
    single full-viewport cluster.
    """
    node_id = dendrogram.check_node(node_id)
    if k < 1:
        raise RangeError(f"k={k} must be at least 1")
    k = min(int(k), int(dendrogram.leaf_count[node_id]))
    cut = subtree_cut(dendrogram, node_id, k)
    return layout(dendrogram, cut, config, zoom_root=node_id, manifest=manifest)


def layout_to_dict(tree: LayoutTree) -> dict:
    """Nested JSON form of a layout; the contract the UI renders."""

    def node_dict(node: LayoutNode) -> dict:
        entry: dict = {
            "node_id": node.node_id,
            "rect": {"x": node.rect.x, "y": node.rect.y, "w": node.rect.w, "h": node.rect.h},
            "depth_remaining": node.depth_remaining,
            "is_cut_leaf": node.is_cut_leaf,
        }
        if node.is_cut_leaf:
            entry["header"] = {
                "image_count": node.header.image_count,
                "accuracy": node.header.accuracy,
            }
            entry["placements"] = [
                {
                    "image_id": p.image_id,
                    "cell": [p.cell[0], p.cell[1]],
                    "misclassified": p.misclassified,
                }
                for p in node.placements
            ]
        else:
            entry["children"] = [node_dict(child) for child in node.children]
        return entry

    return {
        "schema_version": LAYOUT_SCHEMA_VERSION,
        "zoom_root": tree.zoom_root,
        "k": tree.k,
        "viewport": {"w": tree.config.viewport_w, "h": tree.config.viewport_h},
        "image": {"w": tree.config.image_w, "h": tree.config.image_h},
        "padding": tree.config.padding,
        "header_h": tree.config.header_h,
        "root": node_dict(tree.root),
    }
