import { SceneTreeClient, decodeHeatmapValues } from "./api";
import type { RankedNode, ScoreMode } from "./api";
import { heatmapColors } from "./colormap";
import {
  beginQuery,
  completeQuery,
  failQuery,
  initialState,
  toggleIsolation,
  validateQueryText,
} from "./state";
import { PointCloudView } from "./viewer";

const serviceUrl =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8080";

const client = new SceneTreeClient(serviceUrl);
const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const view = new PointCloudView(canvas);

const queryInput = document.getElementById("query") as HTMLInputElement;
const modeSelect = document.getElementById("mode") as HTMLSelectElement;
const kInput = document.getElementById("k") as HTMLInputElement;
const submitButton = document.getElementById("submit") as HTMLButtonElement;
const resultsList = document.getElementById("results") as HTMLUListElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const metaLine = document.getElementById("meta") as HTMLDivElement;

let state = initialState();
let abortCurrent: AbortController | null = null;

function showError(message: string | null): void {
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

function renderResults(rows: RankedNode[]): void {
  resultsList.replaceChildren();
  rows.forEach((row, index) => {
    const item = document.createElement("li");
    item.textContent =
      `#${index + 1}  node ${row.id} (${row.kind})  ` +
      `score ${row.score.toFixed(4)}  ${row.point_count} pts`;
    item.className = state.isolatedNode === row.id ? "isolated" : "";
    item.onclick = () => void isolateNode(row.id);
    resultsList.appendChild(item);
  });
}

async function isolateNode(nodeId: number): Promise<void> {
  state = toggleIsolation(state, nodeId);
  if (state.isolatedNode === null) {
    view.isolate(null);
  } else {
    try {
      const detail = await client.node(nodeId);
      view.isolate(detail.point_indices);
    } catch (err) {
      showError(String(err));
      return;
    }
  }
  renderResults(state.lastResponse?.results ?? []);
}

async function runQuery(): Promise<void> {
  const text = validateQueryText(queryInput.value);
  if (text === null) {
    showError("enter a query first");
    return;
  }
  const mode = modeSelect.value as ScoreMode;
  const k = Math.max(1, Number(kInput.value) || 10);

  abortCurrent?.abort();
  abortCurrent = new AbortController();
  let ticket: number;
  [state, ticket] = beginQuery(state);
  showError(null);

  try {
    const response = await client.query(text, mode, k, mode !== "object_only",
      abortCurrent.signal);
    state = completeQuery(state, ticket, response);
    if (state.lastResponse !== response) return; // superseded
    renderResults(response.results);
    if (response.heatmap) {
      const values = decodeHeatmapValues(response.heatmap.values_b64);
      view.isolate(null);
      view.applyColors(heatmapColors(values, response.heatmap.min, response.heatmap.max));
    }
  } catch (err) {
    if ((err as Error).name === "AbortError") return;
    state = failQuery(state, ticket, String(err));
    showError(state.error);
  }
}

submitButton.onclick = () => void runQuery();
queryInput.onkeydown = (event) => {
  if (event.key === "Enter") void runQuery();
};
modeSelect.onchange = () => {
  if (state.lastResponse) void runQuery(); // mode toggle re-issues the query
};

function resize(): void {
  const rect = canvas.parentElement!.getBoundingClientRect();
  view.resize(rect.width, rect.height);
}
window.addEventListener("resize", resize);

async function boot(): Promise<void> {
  resize();
  try {
    const meta = await client.sceneMeta();
    metaLine.textContent =
      `${meta.scene_id}: ${meta.n_points} points, ${meta.object_count} objects, ` +
      `${meta.segment_count} segments, D=${meta.dim}`;
    const stream = await client.scenePoints();
    if (stream.count !== meta.n_points) {
      throw new Error(`stream has ${stream.count} points, metadata says ${meta.n_points}`);
    }
    view.loadPoints(stream);
  } catch (err) {
    showError(`service unreachable at ${serviceUrl} — ${String(err)}`);
  }
}

void boot();
