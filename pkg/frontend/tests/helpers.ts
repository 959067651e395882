/**
 * Test support: fixture loading plus a fake API client that replays real
 * service responses captured by scripts/generate_fixtures.py.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { ApiError, type ApiClient } from "../src/api.js";
import type { ClassTable, DatasetInfo, LayoutParams, LayoutTree, SimilarResponse } from "../src/types.js";

const fixturesDir = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function loadFixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(fixturesDir, name), "utf-8")) as T;
}

export const fixtureDataset = (): DatasetInfo => loadFixture<DatasetInfo>("dataset.json");
export const fixtureLayouts = (): Record<string, LayoutTree> => loadFixture("layouts.json");
export const fixtureClassTables = (): Record<string, ClassTable> => loadFixture("class_tables.json");
export const fixtureSimilar = (): Record<string, SimilarResponse> => loadFixture("similar.json");

interface PendingLayout {
  params: LayoutParams;
  resolve: (layout: LayoutTree) => void;
  reject: (error: unknown) => void;
}

export class FakeApi implements ApiClient {
  readonly datasetInfo = fixtureDataset();
  readonly layouts = fixtureLayouts();
  readonly classTables = fixtureClassTables();
  readonly similarById = fixtureSimilar();

  calls = { dataset: 0, layout: 0, classTable: 0, similar: 0 };
  layoutParams: LayoutParams[] = [];

  /** When true, layout promises resolve only via resolveLayout(). */
  deferLayouts = false;
  private pending: PendingLayout[] = [];

  async dataset(): Promise<DatasetInfo> {
    this.calls.dataset++;
    return this.datasetInfo;
  }

  lookupLayout(params: LayoutParams): LayoutTree {
    const node = params.node ?? this.datasetInfo.root_id;
    const k = params.k ?? 8;
    if (k < 1) throw new ApiError(400, "RangeError", `k=${k} must be at least 1`);
    const exact = this.layouts[`${node}:${k}`];
    if (exact) return exact;
    // The service clamps k to the subtree's leaf count.
    for (let smaller = k - 1; smaller >= 1; smaller--) {
      const clamped = this.layouts[`${node}:${smaller}`];
      if (clamped) return clamped;
    }
    throw new ApiError(404, "UnknownNode", `no fixture for node ${node}`);
  }

  layout(params: LayoutParams): Promise<LayoutTree> {
    this.calls.layout++;
    this.layoutParams.push({ ...params });
    if (!this.deferLayouts) {
      try {
        return Promise.resolve(this.lookupLayout(params));
      } catch (error) {
        return Promise.reject(error);
      }
    }
    return new Promise((resolve, reject) => {
      this.pending.push({ params, resolve, reject });
    });
  }

  get pendingCount(): number {
    return this.pending.length;
  }

  /** Resolve the i-th deferred layout request with its fixture. */
  resolveLayout(index: number): void {
    const entry = this.pending[index];
    if (!entry) throw new Error(`no pending layout at ${index}`);
    this.pending[index] = undefined as unknown as PendingLayout;
    entry.resolve(this.lookupLayout(entry.params));
  }

  async classTable(node?: number): Promise<ClassTable> {
    this.calls.classTable++;
    const table = this.classTables[String(node ?? this.datasetInfo.root_id)];
    if (!table) throw new ApiError(404, "UnknownNode", `no class table fixture for ${node}`);
    return table;
  }

  async similar(id: number): Promise<SimilarResponse> {
    this.calls.similar++;
    const found = this.similarById[String(id)];
    if (!found) throw new ApiError(404, "UnknownLeaf", `no similar fixture for ${id}`);
    return found;
  }

  imageUrl(id: number): string {
    return `/image/${id}`;
  }
}

/** Let queued microtasks (promise chains) settle. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 10; i++) await Promise.resolve();
}
