"""Class-level error statistics and neighbor-preservation evaluation.

The class table summarizes prediction quality per class over any subset of
images (the cluster currently selected in the explorer). The evaluation
harness measures how well a method's notion of distance preserves
high-dimensional top-k neighborhoods: for every image it intersects the
method's top-k list with the Euclidean top-k list in embedding space and
reports the mean overlap per k.

A "distance oracle" is a callable mapping an image id to the vector of
distances from that image to every image (self included; the self entry is
ignored during ranking). Remaining ties in any top-k list break by
ascending image id.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EmptySubset, NoPredictions, RangeError
from .gridify import GridAssignment
from .hclust import Dendrogram, hops_from_leaf
from .ingest import DatasetManifest, EmbeddingMatrix

REPORT_SCHEMA_VERSION = 1

DEFAULT_K_VALUES = (1, 5, 10, 25, 50, 100, 200, 300)

DistanceOracle = Callable[[int], np.ndarray]


@dataclass(frozen=True)
class ClassStats:
    """Error statistics for one class over a subset of images.

    Rates are absent (None) when their denominator is zero: accuracy and the
    false negative rate need true examples, the false positive rate needs
    predicted examples.
    """

    class_id: int
    true_count: int
    predicted_count: int
    accuracy: float | None
    false_negative_rate: float | None
    false_positive_rate: float | None


@dataclass(frozen=True)
class NeighborReport:
    """Mean top-k overlap with the high-dimensional reference, per method."""

    k_values: tuple[int, ...]
    mean_overlap: dict[str, tuple[float, ...]]

    def methods(self) -> list[str]:
        return sorted(self.mean_overlap)

    @staticmethod
    def merge(*reports: "NeighborReport") -> "NeighborReport":
        if not reports:
            raise RangeError("nothing to merge")
        k_values = reports[0].k_values
        merged: dict[str, tuple[float, ...]] = {}
        for report in reports:
            if report.k_values != k_values:
                raise RangeError("cannot merge reports with different k grids")
            merged.update(report.mean_overlap)
        return NeighborReport(k_values=k_values, mean_overlap=merged)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("method,k,mean_overlap\n")
        for method in self.methods():
            for k, value in zip(self.k_values, self.mean_overlap[method]):
                buf.write(f"{method},{k},{value!r}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "k_values": list(self.k_values),
            "series": [
                {"method": method, "mean_overlap": list(self.mean_overlap[method])}
                for method in self.methods()
            ],
        }


def class_table(manifest: DatasetManifest, subset) -> list[ClassStats]:
    """Per-class counts and rates over a subset of image ids.

    For class c: true_count = |true==c|, predicted_count = |pred==c|,
    accuracy = |true==c and pred==c| / true_count, FNR = its complement,
    FPR = |pred==c and true!=c| / predicted_count.
    """
    if not manifest.has_predictions:
        raise NoPredictions("class table requires model predictions")
    ids = np.asarray(sorted({int(v) for v in subset}), dtype=np.int64)
    if ids.size == 0:
        raise EmptySubset("class table requires a nonempty subset")
    if ids[0] < 0 or ids[-1] >= manifest.n_items:
        raise RangeError("subset contains ids outside the dataset")

    true = manifest.true_classes()[ids]
    pred = manifest.predicted_classes()[ids]
    n_classes = len(manifest.classes)
    true_counts = np.bincount(true, minlength=n_classes)
    pred_counts = np.bincount(pred, minlength=n_classes)
    correct = np.bincount(true[true == pred], minlength=n_classes)

    rows = []
    for c in range(n_classes):
        t, p, ok = int(true_counts[c]), int(pred_counts[c]), int(correct[c])
        rows.append(
            ClassStats(
                class_id=c,
                true_count=t,
                predicted_count=p,
                accuracy=ok / t if t > 0 else None,
                false_negative_rate=(t - ok) / t if t > 0 else None,
                false_positive_rate=(p - ok) / p if p > 0 else None,
            )
        )
    return rows


def similar_images(embeddings: EmbeddingMatrix, query: int, n: int) -> np.ndarray:
    """Ids of the n closest images to the query in embedding space.

    Ascending Euclidean distance, excluding the query itself; equal
    distances order by ascending id.
    """
    count = embeddings.rows
    query = int(query)
    if not 0 <= query < count:
        raise RangeError(f"image id {query} outside [0, {count})")
    n = int(n)
    if not 1 <= n < count:
        raise RangeError(f"n={n} outside [1, {count})")
    delta = embeddings.values - embeddings.values[query]
    dist = np.einsum("ij,ij->i", delta, delta)
    order = np.lexsort((np.arange(count), dist))
    return order[order != query][:n]


def euclidean_distance_oracle(points: np.ndarray) -> DistanceOracle:
    """Distance oracle over rows of a coordinate matrix."""
    points = np.asarray(points, dtype=np.float64)

    def row(i: int) -> np.ndarray:
        delta = points - points[i]
        return np.sqrt(np.einsum("ij,ij->i", delta, delta))

    return row


def dendromap_distance_oracle(dendrogram: Dendrogram) -> DistanceOracle:
    """Tree distance: zoom-outs from leaf i to the common ancestor with j.

    Within one hop level, leaves closer to i in the dendrogram's leaf order
    rank first; the fractional term encodes that without ever crossing hop
    levels, since |position difference| / n < 1.
    """
    n = dendrogram.n_leaves
    position = dendrogram.leaf_position

    def row(i: int) -> np.ndarray:
        hops = hops_from_leaf(dendrogram, i).astype(np.float64)
        proximity = np.abs(position - position[i]) / n
        return hops + proximity

    return row


def grid_distance_oracle(grid: GridAssignment) -> DistanceOracle:
    """Euclidean distance between grid cell centers, in cell-pitch units."""
    rows, cols = np.nonzero(grid.cells >= 0)
    ids = grid.cells[rows, cols]
    n = int(ids.max()) + 1
    coords = np.full((n, 2), np.nan, dtype=np.float64)
    coords[ids, 0] = cols
    coords[ids, 1] = rows

    def row(i: int) -> np.ndarray:
        delta = coords - coords[i]
        return np.sqrt(np.einsum("ij,ij->i", delta, delta))

    return row


def _top_k(values: np.ndarray, self_id: int, k: int) -> np.ndarray:
    order = np.lexsort((np.arange(len(values)), values))
    return order[order != self_id][:k]


def knn_preservation(
    embeddings: EmbeddingMatrix,
    method_distances: DistanceOracle,
    k_values=DEFAULT_K_VALUES,
    method_name: str = "method",
) -> NeighborReport:
    """Mean count of images shared between the method's and the
    high-dimensional top-k neighbor lists, per k, averaged over all images.

    k values beyond n-1 are truncated down to n-1; lists always exclude the
    query image.
    """
    n = embeddings.rows
    ks = tuple(sorted({min(int(k), n - 1) for k in k_values if int(k) >= 1}))
    if not ks:
        raise RangeError(f"no usable k values for n={n}")
    k_max = ks[-1]
    reference = euclidean_distance_oracle(embeddings.values)

    sums = np.zeros(len(ks), dtype=np.float64)
    for i in range(n):
        top_ref = _top_k(reference(i), i, k_max)
        top_method = _top_k(np.asarray(method_distances(i), dtype=np.float64), i, k_max)
        for ki, k in enumerate(ks):
            sums[ki] += np.intersect1d(top_ref[:k], top_method[:k], assume_unique=True).size
    means = tuple(float(v) for v in sums / n)
    return NeighborReport(k_values=ks, mean_overlap={method_name: means})
