/**
 * Image-detail panel model: the enlarged thumbnail, its labels, and the
 * nearest neighbors in embedding space.
 */

import type { ApiClient } from "./api.js";
import type { DatasetInfo, SimilarResponse } from "./types.js";

export interface NeighborThumb {
  id: number;
  url: string;
  distance: number;
}

export interface DetailModel {
  imageId: number;
  imageUrl: string;
  trueLabel: string;
  predictedLabel: string | null;
  misclassified: boolean | null;
  neighbors: NeighborThumb[];
}

export function buildDetailModel(
  similar: SimilarResponse,
  dataset: DatasetInfo,
  imageUrl: (id: number) => string,
): DetailModel {
  const trueLabel = dataset.classes[similar.true_class] ?? `class ${similar.true_class}`;
  const predictedLabel =
    similar.predicted_class === null
      ? null
      : dataset.classes[similar.predicted_class] ?? `class ${similar.predicted_class}`;
  return {
    imageId: similar.id,
    imageUrl: imageUrl(similar.id),
    trueLabel,
    predictedLabel,
    misclassified: similar.predicted_class === null ? null : similar.predicted_class !== similar.true_class,
    neighbors: similar.neighbors.map((n) => ({ id: n.id, url: imageUrl(n.id), distance: n.distance })),
  };
}

export async function fetchDetail(
  api: ApiClient,
  dataset: DatasetInfo,
  imageId: number,
  neighborCount = 8,
): Promise<DetailModel> {
  const n = Math.min(neighborCount, Math.max(dataset.item_count - 1, 1));
  const similar = await api.similar(imageId, n);
  return buildDetailModel(similar, dataset, api.imageUrl);
}
