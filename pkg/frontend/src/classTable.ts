/**
 * Class-table view helpers: sorting, searching, and the hover-highlight
 * rule (which images "made" a hovered metric).
 */

import type { ClassRow, DatasetInfo } from "./types.js";

export type ClassColumn =
  | "class_name"
  | "true_count"
  | "predicted_count"
  | "accuracy"
  | "false_negative_rate"
  | "false_positive_rate";

export type SortDirection = "asc" | "desc";

export function sortRows(rows: ClassRow[], column: ClassColumn, direction: SortDirection): ClassRow[] {
  const sign = direction === "asc" ? 1 : -1;
  return [...rows].sort((a, b) => {
    const va = a[column];
    const vb = b[column];
    if (va === vb) return a.class_id - b.class_id;
    if (va === null) return 1; // absent rates sink to the bottom either way
    if (vb === null) return -1;
    if (typeof va === "string" && typeof vb === "string") {
      return sign * va.localeCompare(vb);
    }
    return sign * ((va as number) - (vb as number));
  });
}

export function filterRows(rows: ClassRow[], search: string): ClassRow[] {
  const needle = search.trim().toLowerCase();
  if (!needle) return rows;
  return rows.filter((row) => row.class_name.toLowerCase().includes(needle));
}

/**
 * Image ids that determine one table entry, per column semantics:
 * true_count/accuracy/FNR are computed over images whose true class matches
 * the row, predicted_count/FPR over images predicted as it.
 */
export function highlightSet(dataset: DatasetInfo, classId: number, column: ClassColumn): Set<number> {
  const byTrue = column === "class_name" || column === "true_count" || column === "accuracy" || column === "false_negative_rate";
  const labels = byTrue ? dataset.true_classes : dataset.predicted_classes;
  const ids = new Set<number>();
  if (labels === null) return ids;
  for (let id = 0; id < labels.length; id++) {
    if (labels[id] === classId) ids.add(id);
  }
  return ids;
}
