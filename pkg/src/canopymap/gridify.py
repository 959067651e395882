"""Snap a 2-D projection onto an even grid by exact linear assignment.

The grid has floor(viewport_w / image_w) columns and however many rows the
point count needs; cell centers are spread evenly over the projection's
bounding box. Assigning points to cells is a linear assignment problem with
squared Euclidean costs, solved exactly (Jonker-Volgenant family solver;
dense matrix, O(n^3) worst case, practical to n in the low tens of
thousands). When the grid has more cells than points, zero-cost dummy rows
leave the surplus cells visibly empty instead of duplicating images.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateSpace, NonFiniteError, RangeError, ShapeError
from .ingest import Projection2D

GRID_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CostMatrix:
    """Square nonnegative cost matrix; rows are points, columns grid cells."""

    costs: np.ndarray

    def __post_init__(self) -> None:
        costs = np.asarray(self.costs, dtype=np.float64)
        if costs.ndim != 2 or costs.shape[0] != costs.shape[1]:
            raise ShapeError(f"cost matrix must be square, got shape {costs.shape}")
        if not np.all(np.isfinite(costs)):
            raise NonFiniteError("cost matrix contains NaN or infinite values")
        if np.any(costs < 0):
            raise RangeError("cost matrix contains negative entries")
        costs = costs.copy()
        costs.setflags(write=False)
        object.__setattr__(self, "costs", costs)

    @property
    def n(self) -> int:
        return self.costs.shape[0]


@dataclass(frozen=True)
class GridGeometry:
    """Evenly spaced cell centers: centers[r * cols + c] is cell (c, r)."""

    cols: int
    rows: int
    centers: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.cols * self.rows


@dataclass(frozen=True)
class GridAssignment:
    """Bijection between images and grid cells; -1 marks an empty cell."""

    grid_cols: int
    grid_rows: int
    cells: np.ndarray  # shape (rows, cols), image id or -1
    total_cost: float

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.shape != (self.grid_rows, self.grid_cols):
            raise ShapeError(f"cells shape {cells.shape} != ({self.grid_rows}, {self.grid_cols})")
        cells = cells.copy()
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def image_ids(self) -> np.ndarray:
        ids = self.cells[self.cells >= 0]
        return np.sort(ids)

    def cell_of(self, image_id: int) -> tuple[int, int]:
        rows, cols = np.nonzero(self.cells == image_id)
        if len(rows) != 1:
            raise RangeError(f"image {image_id} not present exactly once in the grid")
        return int(cols[0]), int(rows[0])


def make_grid(
    n_points: int,
    viewport_w: int,
    viewport_h: int,
    image_w: int,
    image_h: int,
    bounds: tuple[float, float, float, float] | None = None,
) -> GridGeometry:
    """Lay out cell centers for n_points images.

    Columns come from how many images fit across the viewport; rows from
    ceil(n_points / cols). Centers span `bounds` (x0, y0, x1, y1) evenly,
    defaulting to the unit square; gridify passes the projection's bounding
    box here.
    """
    n_points = int(n_points)
    if n_points < 1:
        raise RangeError(f"need at least one point, got {n_points}")
    if image_w < 1 or image_h < 1:
        raise RangeError("image dimensions must be positive")
    cols = viewport_w // image_w
    if cols < 1 or viewport_h // image_h < 1:
        raise DegenerateSpace(f"viewport {viewport_w}x{viewport_h} cannot fit one {image_w}x{image_h} image")
    cols = min(cols, n_points)
    rows = -(-n_points // cols)

    x0, y0, x1, y1 = bounds if bounds is not None else (0.0, 0.0, 1.0, 1.0)
    xs = np.linspace(x0, x1, cols) if cols > 1 else np.array([(x0 + x1) / 2.0])
    ys = np.linspace(y0, y1, rows) if rows > 1 else np.array([(y0 + y1) / 2.0])
    gx, gy = np.meshgrid(xs, ys)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    centers.setflags(write=False)
    return GridGeometry(cols=cols, rows=rows, centers=centers)


def solve_lap(costs: CostMatrix) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect assignment: returns (row -> column map, cost)."""
    row_ind, col_ind = linear_sum_assignment(costs.costs)
    perm = np.empty(costs.n, dtype=np.int64)
    perm[row_ind] = col_ind
    total = float(costs.costs[row_ind, col_ind].sum())
    return perm, total


def build_cost_matrix(points: np.ndarray, geometry: GridGeometry) -> CostMatrix:
    """Squared distances point -> cell, padded with zero-cost dummy points."""
    n = points.shape[0]
    m = geometry.n_cells
    if n > m:
        raise ShapeError(f"{n} points cannot fit a {geometry.cols}x{geometry.rows} grid")
    costs = np.zeros((m, m), dtype=np.float64)
    diff = points[:, None, :] - geometry.centers[None, :, :]
    costs[:n, :] = np.einsum("pgc,pgc->pg", diff, diff)
    return CostMatrix(costs=costs)


def _bounding_box(points: np.ndarray) -> tuple[float, float, float, float]:
    return (
        float(points[:, 0].min()),
        float(points[:, 1].min()),
        float(points[:, 0].max()),
        float(points[:, 1].max()),
    )


def gridify(
    projection: Projection2D,
    viewport_w: int,
    viewport_h: int,
    image_w: int,
    image_h: int,
) -> GridAssignment:
    """Assign every projected point its own grid cell at minimum total cost."""
    points = projection.points
    n = points.shape[0]
    x0, y0, x1, y1 = _bounding_box(points)
    geometry = make_grid(n, viewport_w, viewport_h, image_w, image_h, bounds=(x0, y0, x1, y1))
    perm, total = solve_lap(build_cost_matrix(points, geometry))

    cells = np.full(geometry.n_cells, -1, dtype=np.int64)
    cells[perm[:n]] = np.arange(n)
    return GridAssignment(
        grid_cols=geometry.cols,
        grid_rows=geometry.rows,
        cells=cells.reshape(geometry.rows, geometry.cols),
        total_cost=total,
    )


def zoom_regrid(
    projection: Projection2D,
    click: tuple[float, float],
    k: int,
    viewport_w: int,
    viewport_h: int,
    image_w: int,
    image_h: int,
) -> GridAssignment:
    """Regrid only the k projection points nearest to a click.

    Distance ties at the selection boundary break by ascending image id. The
    returned cells carry original image ids.
    """
    points = projection.points
    n = points.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise RangeError(f"k={k} outside [1, {n}]")
    delta = points - np.asarray(click, dtype=np.float64)
    dist = np.einsum("ij,ij->i", delta, delta)
    chosen = np.lexsort((np.arange(n), dist))[:k]
    chosen = np.sort(chosen)

    sub = gridify(Projection2D(points=points[chosen]), viewport_w, viewport_h, image_w, image_h)
    cells = sub.cells.copy()
    filled = cells >= 0
    cells[filled] = chosen[cells[filled]]
    return GridAssignment(
        grid_cols=sub.grid_cols,
        grid_rows=sub.grid_rows,
        cells=cells,
        total_cost=sub.total_cost,
    )


def grid_to_dict(grid: GridAssignment) -> dict:
    """JSON form: explicit cell entries, empty cells carry null."""
    entries = []
    for row in range(grid.grid_rows):
        for col in range(grid.grid_cols):
            image_id = int(grid.cells[row, col])
            entries.append({"col": col, "row": row, "image_id": image_id if image_id >= 0 else None})
    return {
        "schema_version": GRID_SCHEMA_VERSION,
        "grid_cols": grid.grid_cols,
        "grid_rows": grid.grid_rows,
        "total_cost": grid.total_cost,
        "cells": entries,
    }


def grid_from_dict(raw: dict) -> GridAssignment:
    if not isinstance(raw, dict) or raw.get("schema_version") != GRID_SCHEMA_VERSION:
        raise ShapeError("unsupported grid document")
    cols, rows = int(raw["grid_cols"]), int(raw["grid_rows"])
    cells = np.full((rows, cols), -1, dtype=np.int64)
    for entry in raw["cells"]:
        if entry["image_id"] is not None:
            cells[int(entry["row"]), int(entry["col"])] = int(entry["image_id"])
    return GridAssignment(
        grid_cols=cols,
        grid_rows=rows,
        cells=cells,
        total_cost=float(raw["total_cost"]),
    )
