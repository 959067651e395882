/**
 * Wire types for the canopymap query service (see ../schemas in the repo
 * root). These mirror the JSON bodies exactly; the UI performs no layout
 * math of its own.
 */

export interface Size {
  w: number;
  h: number;
}

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface ClusterHeader {
  image_count: number;
  accuracy: number | null;
}

export interface Placement {
  image_id: number;
  cell: [number, number];
  misclassified: boolean | null;
}

export interface LayoutNode {
  node_id: number;
  rect: Rect;
  depth_remaining: number;
  is_cut_leaf: boolean;
  header?: ClusterHeader;
  placements?: Placement[];
  children?: LayoutNode[];
}

export interface LayoutTree {
  schema_version: number;
  zoom_root: number;
  k: number;
  viewport: Size;
  image: Size;
  padding: number;
  header_h: number;
  root: LayoutNode;
}

export interface DatasetInfo {
  schema_version: number;
  item_count: number;
  classes: string[];
  has_predictions: boolean;
  root_id: number;
  node_count: number;
  embedding_dims: number;
  true_classes: number[];
  predicted_classes: number[] | null;
}

export interface ClassRow {
  class_id: number;
  class_name: string;
  true_count: number;
  predicted_count: number;
  accuracy: number | null;
  false_negative_rate: number | null;
  false_positive_rate: number | null;
}

export interface ClassTable {
  schema_version: number;
  node: number;
  rows: ClassRow[];
}

export interface Neighbor {
  id: number;
  distance: number;
}

export interface SimilarResponse {
  schema_version: number;
  id: number;
  true_class: number;
  predicted_class: number | null;
  neighbors: Neighbor[];
}

export interface LayoutParams {
  node?: number;
  k?: number;
  w?: number;
  h?: number;
  img?: number;
}
