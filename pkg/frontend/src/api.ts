/**
 * Typed client for the scenetree HTTP service.
 *
 * The viewer is a pure client: every score it shows comes from the
 * service, never from local recomputation.
 */

export interface SceneMeta {
  scene_id: string;
  n_points: number;
  object_count: number;
  segment_count: number;
  dim: number;
}

export interface RankedNode {
  id: number;
  kind: "object" | "segment";
  score: number;
  point_count: number;
}

export interface HeatmapPayload {
  min: number;
  max: number;
  values_b64: string;
}

export interface QueryResponse {
  results: RankedNode[];
  heatmap?: HeatmapPayload;
}

export interface NodeDetail {
  id: number;
  kind: string;
  point_indices: number[];
  feature_norm: number;
}

export interface PointStream {
  count: number;
  positions: Float32Array; // 3 * count
  colors: Uint8Array; // 3 * count
}

export type ScoreMode = "avg" | "max" | "object_only" | "segment_only";

/** Parse the binary /scene/points stream: u32 N, then N x (3 f32 + 3 u8). */
export function parsePointStream(buffer: ArrayBuffer): PointStream {
  const view = new DataView(buffer);
  if (buffer.byteLength < 4) {
    throw new Error("point stream too short for its header");
  }
  const count = view.getUint32(0, true);
  const stride = 15;
  const expected = 4 + count * stride;
  if (buffer.byteLength !== expected) {
    throw new Error(
      `point stream length ${buffer.byteLength} does not match header count ${count}`,
    );
  }
  const positions = new Float32Array(3 * count);
  const colors = new Uint8Array(3 * count);
  for (let i = 0; i < count; i++) {
    const base = 4 + i * stride;
    positions[3 * i] = view.getFloat32(base, true);
    positions[3 * i + 1] = view.getFloat32(base + 4, true);
    positions[3 * i + 2] = view.getFloat32(base + 8, true);
    colors[3 * i] = view.getUint8(base + 12);
    colors[3 * i + 1] = view.getUint8(base + 13);
    colors[3 * i + 2] = view.getUint8(base + 14);
  }
  return { count, positions, colors };
}

export function decodeHeatmapValues(b64: string): Uint8Array {
  const raw = atob(b64);
  const out = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) {
    out[i] = raw.charCodeAt(i);
  }
  return out;
}

async function asError(response: Response): Promise<Error> {
  let detail = `${response.status}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) detail = `${response.status}: ${body.error}`;
  } catch {
    // non-JSON error body; keep the status line
  }
  return new Error(detail);
}

export class SceneTreeClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) throw await asError(response);
    return (await response.json()) as T;
  }

  health(): Promise<{ ok: boolean }> {
    return this.getJson("/health");
  }

  sceneMeta(): Promise<SceneMeta> {
    return this.getJson("/scene");
  }

  async scenePoints(): Promise<PointStream> {
    const response = await this.fetchFn(`${this.baseUrl}/scene/points`);
    if (!response.ok) throw await asError(response);
    return parsePointStream(await response.arrayBuffer());
  }

  node(id: number): Promise<NodeDetail> {
    return this.getJson(`/node/${id}`);
  }

  async query(
    text: string,
    mode: ScoreMode,
    k: number,
    includeHeatmap = true,
    signal?: AbortSignal,
  ): Promise<QueryResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text, mode, k, include_heatmap: includeHeatmap }),
      signal,
    });
    if (!response.ok) throw await asError(response);
    return (await response.json()) as QueryResponse;
  }
}
