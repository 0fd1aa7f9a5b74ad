/**
 * Explorer wiring: canvas, controls, URL fragment, and the tile fetch
 * loop. All coordinate math and protocol logic lives in the imported
 * modules; this file only connects them to the DOM.
 */

import { fetchAnalysis, fetchPalettes, fetchTileBlob, tileUrl } from "./api.js";
import type { ApiError, FetchLike } from "./api.js";
import { panelFromError, panelFromReport } from "./analysis.js";
import type { PanelView } from "./analysis.js";
import {
  planTiles,
  TILE_SIZE,
  TileCache,
  TileFetcher,
} from "./tiles.js";
import type { PlannedTile } from "./tiles.js";
import {
  decodeFragment,
  DEFAULT_VIEW,
  encodeFragment,
  panBy,
  pixelToPlane,
  zoomAnchored,
  zoomAt,
} from "./viewstate.js";
import type { ViewState } from "./viewstate.js";

const BASE_URL = ""; // same origin: the tile service mounts this app at /

interface StaleTile {
  bitmap: ImageBitmap;
  planeLeft: number; // re of the tile's left edge
  planeTop: number; // im of the tile's top edge
  planeSize: number; // tile side length in plane units
}

function requireElement<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const canvas = requireElement<HTMLCanvasElement>("view");
const maybeCtx = canvas.getContext("2d");
if (!maybeCtx) throw new Error("2d canvas unsupported");
const ctx: CanvasRenderingContext2D = maybeCtx;

const exprInput = requireElement<HTMLInputElement>("expr");
const renderButton = requireElement<HTMLButtonElement>("render");
const logKInput = requireElement<HTMLInputElement>("logk");
const maxIterInput = requireElement<HTMLInputElement>("maxiter");
const paletteSelect = requireElement<HTMLSelectElement>("palette");
const banner = requireElement<HTMLDivElement>("banner");
const statusBar = requireElement<HTMLDivElement>("status");
const panelHeadline = requireElement<HTMLDivElement>("panel-headline");
const panelBody = requireElement<HTMLDivElement>("panel-body");

let view: ViewState = decodeFragment(window.location.hash);
let staleTiles: StaleTile[] = [];
let redrawQueued = false;

const fetchImpl: FetchLike = (url, init) => fetch(url, init);

const cache = new TileCache<ImageBitmap>(512);
const fetcher = new TileFetcher<ImageBitmap>(
  async (tile, tileView, signal) => {
    const url = tileUrl(
      BASE_URL,
      tileView,
      tile.centerRe,
      tile.centerIm,
      tileView.scale,
      TILE_SIZE,
      TILE_SIZE,
    );
    const result = await fetchTileBlob(fetchImpl, url, signal);
    if (!result.ok) return { tileError: result.error };
    return await createImageBitmap(result.value);
  },
  cache,
  () => scheduleRedraw(),
  (error) => showBanner(error),
);

function showBanner(error: ApiError): void {
  banner.textContent =
    error.offset !== undefined
      ? `${error.error} (offset ${error.offset})`
      : error.error;
  banner.hidden = false;
}

function clearBanner(): void {
  banner.hidden = true;
  banner.textContent = "";
}

function renderPanel(panel: PanelView): void {
  panelHeadline.textContent = panel.headline;
  panelHeadline.dataset.tone = panel.tone;
  panelBody.replaceChildren(
    ...panel.lines.map((line) => {
      const p = document.createElement("p");
      p.textContent = line;
      return p;
    }),
  );
}

let analysisAbort: AbortController | null = null;

function refreshAnalysis(): void {
  analysisAbort?.abort();
  const controller = new AbortController();
  analysisAbort = controller;
  renderPanel({ tone: "notice", headline: "analyzing…", lines: [] });
  void fetchAnalysis(fetchImpl, BASE_URL, view.expr, controller.signal)
    .then((result) => {
      if (controller.signal.aborted) return;
      renderPanel(result.ok ? panelFromReport(result.value) : panelFromError(result.error));
    })
    .catch((err: unknown) => {
      if ((err as Error)?.name !== "AbortError") {
        renderPanel({ tone: "error", headline: "analysis failed", lines: [String(err)] });
      }
    });
}

function snapshotStaleLayer(previous: ViewState, plan: PlannedTile[]): void {
  const kept: StaleTile[] = [];
  for (const tile of plan) {
    const bitmap = cache.get(tile.key);
    if (!bitmap) continue;
    kept.push({
      bitmap,
      planeLeft: tile.ti * TILE_SIZE * previous.scale,
      planeTop: -(tile.tj * TILE_SIZE * previous.scale),
      planeSize: TILE_SIZE * previous.scale,
    });
  }
  staleTiles = kept;
}

let currentPlan: PlannedTile[] = [];

function setView(next: ViewState, options: { refetchAll?: boolean } = {}): void {
  const pixelsChange =
    options.refetchAll ||
    next.expr !== view.expr ||
    next.scale !== view.scale ||
    next.logK !== view.logK ||
    next.maxIter !== view.maxIter ||
    next.paletteId !== view.paletteId;
  if (pixelsChange) snapshotStaleLayer(view, currentPlan);
  const exprChanged = next.expr !== view.expr;
  view = next;
  syncControls();
  updateFragment();
  if (exprChanged || options.refetchAll) {
    clearBanner();
    refreshAnalysis();
  }
  scheduleRedraw();
}

function updateFragment(): void {
  history.replaceState(null, "", `#${encodeFragment(view)}`);
}

function syncControls(): void {
  if (document.activeElement !== exprInput) exprInput.value = view.expr;
  if (document.activeElement !== logKInput) logKInput.value = String(view.logK);
  if (document.activeElement !== maxIterInput) maxIterInput.value = String(view.maxIter);
  if (paletteSelect.value !== view.paletteId) paletteSelect.value = view.paletteId;
}

function scheduleRedraw(): void {
  if (redrawQueued) return;
  redrawQueued = true;
  requestAnimationFrame(() => {
    redrawQueued = false;
    draw();
  });
}

function draw(): void {
  const width = canvas.width;
  const height = canvas.height;
  ctx.fillStyle = "#101014";
  ctx.fillRect(0, 0, width, height);

  currentPlan = planTiles(view, width, height);

  // Stale layer: previous pixels, rescaled, so zooms do not flash blank.
  ctx.imageSmoothingEnabled = true;
  for (const stale of staleTiles) {
    const x = stale.planeLeft / view.scale - (view.centerRe / view.scale - width / 2);
    const y = -stale.planeTop / view.scale - (-view.centerIm / view.scale - height / 2);
    const size = stale.planeSize / view.scale;
    ctx.drawImage(stale.bitmap, x, y, size, size);
  }

  ctx.imageSmoothingEnabled = false;
  let missing = 0;
  for (const tile of currentPlan) {
    const bitmap = cache.get(tile.key);
    if (bitmap) {
      ctx.drawImage(bitmap, tile.canvasX, tile.canvasY);
    } else {
      missing++;
    }
  }
  if (missing === 0) staleTiles = [];

  fetcher.sync(currentPlan, view);
  updateStatus(missing);
}

function updateStatus(missing: number): void {
  const k = Math.exp(view.logK);
  statusBar.textContent =
    `center ${view.centerRe.toPrecision(8)} ${view.centerIm >= 0 ? "+" : "−"} ` +
    `${Math.abs(view.centerIm).toPrecision(8)}i · scale ${view.scale.toExponential(4)} ` +
    `· k = e^${view.logK} ≈ ${k.toFixed(4)} · N = ${view.maxIter}` +
    (missing > 0 ? ` · loading ${missing} tile${missing === 1 ? "" : "s"}` : "");
}

// --- interactions ------------------------------------------------------

let dragging = false;
let lastPointer: { x: number; y: number } | null = null;
let moved = false;

canvas.addEventListener("pointerdown", (ev) => {
  dragging = true;
  moved = false;
  lastPointer = { x: ev.offsetX, y: ev.offsetY };
  canvas.setPointerCapture(ev.pointerId);
});

canvas.addEventListener("pointermove", (ev) => {
  if (!dragging || !lastPointer) return;
  const dx = ev.offsetX - lastPointer.x;
  const dy = ev.offsetY - lastPointer.y;
  if (dx === 0 && dy === 0) return;
  moved = true;
  lastPointer = { x: ev.offsetX, y: ev.offsetY };
  view = panBy(view, dx, dy);
  scheduleRedraw();
});

function endDrag(): void {
  if (!dragging) return;
  dragging = false;
  lastPointer = null;
  if (moved) {
    updateFragment();
    updateStatus(0);
  }
}

canvas.addEventListener("pointerup", endDrag);
canvas.addEventListener("pointercancel", endDrag);

canvas.addEventListener("dblclick", (ev) => {
  ev.preventDefault();
  setView(zoomAt(view, canvas.width, canvas.height, ev.offsetX, ev.offsetY, 0.5));
});

canvas.addEventListener(
  "wheel",
  (ev) => {
    ev.preventDefault();
    const factor = ev.deltaY > 0 ? 2 : 0.5;
    setView(zoomAnchored(view, canvas.width, canvas.height, ev.offsetX, ev.offsetY, factor));
  },
  { passive: false },
);

canvas.addEventListener("mousemove", (ev) => {
  if (dragging) return;
  const point = pixelToPlane(view, canvas.width, canvas.height, ev.offsetX, ev.offsetY);
  canvas.title = `${point.re} ${point.im >= 0 ? "+" : "-"} ${Math.abs(point.im)}i`;
});

function commitControls(): void {
  const logK = Number(logKInput.value);
  const maxIter = Number(maxIterInput.value);
  const next: ViewState = {
    ...view,
    expr: exprInput.value.trim() || view.expr,
    logK: Number.isFinite(logK) ? logK : view.logK,
    maxIter:
      Number.isInteger(maxIter) && maxIter >= 1 ? Math.min(maxIter, 99_999) : view.maxIter,
    paletteId: paletteSelect.value || view.paletteId,
  };
  setView(next, { refetchAll: next.expr !== view.expr });
}

renderButton.addEventListener("click", commitControls);
exprInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") commitControls();
});
logKInput.addEventListener("change", commitControls);
maxIterInput.addEventListener("change", commitControls);
paletteSelect.addEventListener("change", commitControls);

window.addEventListener("hashchange", () => {
  setView(decodeFragment(window.location.hash), { refetchAll: true });
});

function resizeCanvas(): void {
  const rect = canvas.getBoundingClientRect();
  const width = Math.max(1, Math.round(rect.width));
  const height = Math.max(1, Math.round(rect.height));
  if (canvas.width !== width || canvas.height !== height) {
    canvas.width = width;
    canvas.height = height;
    scheduleRedraw();
  }
}

window.addEventListener("resize", resizeCanvas);

// --- startup -----------------------------------------------------------

void fetchPalettes(fetchImpl, BASE_URL).then((result) => {
  if (!result.ok) {
    showBanner(result.error);
    return;
  }
  paletteSelect.replaceChildren(
    ...result.value.map((palette) => {
      const option = document.createElement("option");
      option.value = palette.id;
      option.textContent = `${palette.id} (${palette.size})`;
      return option;
    }),
  );
  paletteSelect.value = view.paletteId;
});

resizeCanvas();
syncControls();
refreshAnalysis();
scheduleRedraw();
