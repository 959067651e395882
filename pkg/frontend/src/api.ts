import type { ClassTable, DatasetInfo, LayoutParams, LayoutTree, SimilarResponse } from "./types.js";

/** Everything the explorer needs from the backend. */
export interface ApiClient {
  dataset(): Promise<DatasetInfo>;
  layout(params: LayoutParams): Promise<LayoutTree>;
  classTable(node?: number): Promise<ClassTable>;
  similar(id: number, n?: number): Promise<SimilarResponse>;
  imageUrl(id: number): string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly errorType: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

function query(params: Record<string, number | undefined>): string {
  const parts = Object.entries(params)
    .filter(([, v]) => v !== undefined)
    .map(([key, v]) => `${key}=${encodeURIComponent(String(v))}`);
  return parts.length ? `?${parts.join("&")}` : "";
}

/** HTTP client over the service endpoints; fetch is injectable for tests. */
export function createHttpClient(baseUrl: string, fetchFn: FetchLike = fetch): ApiClient {
  const base = baseUrl.replace(/\/$/, "");

  async function getJson<T>(path: string): Promise<T> {
    const response = await fetchFn(`${base}${path}`);
    const body = (await response.json()) as T & { error?: { type: string; message: string } };
    if (!response.ok) {
      const err = body?.error ?? { type: "HttpError", message: `status ${response.status}` };
      throw new ApiError(response.status, err.type, err.message);
    }
    return body;
  }

  return {
    dataset: () => getJson<DatasetInfo>("/dataset"),
    layout: (params) =>
      getJson<LayoutTree>(
        `/layout${query({ node: params.node, k: params.k, w: params.w, h: params.h, img: params.img })}`,
      ),
    classTable: (node) => getJson<ClassTable>(`/class-table${query({ node })}`),
    similar: (id, n) => getJson<SimilarResponse>(`/similar${query({ id, n })}`),
    imageUrl: (id) => `${base}/image/${id}`,
  };
}
