/**
 * Tile plan, cache, and fetch synchronization for the explorer canvas.
 *
 * The plane is cut into a 256x256-pixel grid anchored at the origin for
 * each scale, so tiles are reusable across pans at the same zoom: tile
 * (ti, tj) covers grid pixels X in [ti*256, (ti+1)*256), Y likewise,
 * where X = re/scale and Y = -im/scale (screen-style y-down). A tile is
 * requested from the service by its own center and the shared scale, so
 * every pixel the service renders lands exactly where the canvas shows
 * it — same formula, same half-pixel offsets.
 */

import type { ApiError } from "./api.js";
import type { ViewState } from "./viewstate.js";

export const TILE_SIZE = 256;

export interface PlannedTile {
  /** Tile grid indices at this scale. */
  ti: number;
  tj: number;
  /** Cache key: identifies the rendered pixels completely. */
  key: string;
  /** Plane point of the tile's center (what the service is asked for). */
  centerRe: number;
  centerIm: number;
  /** Where the tile's top-left corner lands on the canvas (fractional). */
  canvasX: number;
  canvasY: number;
}

/** FNV-1a, hex — a stable non-cryptographic hash for cache keys. */
export function hashText(text: string): string {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return (h >>> 0).toString(16).padStart(8, "0");
}

export function tileKey(view: ViewState, ti: number, tj: number): string {
  return [
    hashText(view.expr),
    String(view.scale),
    String(ti),
    String(tj),
    String(view.logK),
    String(view.maxIter),
    view.paletteId,
  ].join("|");
}

/**
 * The tiles needed to cover a width x height canvas at the given view,
 * with their service-request centers and canvas positions.
 */
export function planTiles(view: ViewState, width: number, height: number): PlannedTile[] {
  const s = view.scale;
  // Canvas top-left corner in grid-pixel coordinates.
  const x0 = view.centerRe / s - width / 2;
  const y0 = -view.centerIm / s - height / 2;
  const tiles: PlannedTile[] = [];
  for (let tj = Math.floor(y0 / TILE_SIZE); tj * TILE_SIZE < y0 + height; tj++) {
    for (let ti = Math.floor(x0 / TILE_SIZE); ti * TILE_SIZE < x0 + width; ti++) {
      tiles.push({
        ti,
        tj,
        key: tileKey(view, ti, tj),
        centerRe: (ti + 0.5) * TILE_SIZE * s,
        centerIm: -(tj + 0.5) * TILE_SIZE * s,
        canvasX: ti * TILE_SIZE - x0,
        canvasY: tj * TILE_SIZE - y0,
      });
    }
  }
  return tiles;
}

/** Bounded map with least-recently-used eviction. */
export class TileCache<T> {
  private entries = new Map<string, T>();

  constructor(readonly capacity: number = 512) {
    if (capacity < 1) throw new Error("cache capacity must be >= 1");
  }

  get(key: string): T | undefined {
    const value = this.entries.get(key);
    if (value !== undefined) {
      // refresh recency (Map preserves insertion order)
      this.entries.delete(key);
      this.entries.set(key, value);
    }
    return value;
  }

  has(key: string): boolean {
    return this.entries.has(key);
  }

  set(key: string, value: T): void {
    this.entries.delete(key);
    this.entries.set(key, value);
    while (this.entries.size > this.capacity) {
      const oldest = this.entries.keys().next().value as string;
      this.entries.delete(oldest);
    }
  }

  get size(): number {
    return this.entries.size;
  }
}

export type TileLoader<T> = (
  tile: PlannedTile,
  view: ViewState,
  signal: AbortSignal,
) => Promise<T | { tileError: ApiError }>;

/**
 * Keeps in-flight tile fetches in sync with the current plan: starts
 * loads for planned tiles that are neither cached nor in flight, and
 * aborts loads whose tile is no longer planned (scrolled off-screen or
 * obsoleted by a view change).
 */
export class TileFetcher<T> {
  private inflight = new Map<string, AbortController>();

  constructor(
    private readonly loader: TileLoader<T>,
    readonly cache: TileCache<T>,
    private readonly onTileReady: () => void,
    private readonly onError: (error: ApiError) => void,
  ) {}

  /** Number of loads currently in flight (for tests/status display). */
  get pending(): number {
    return this.inflight.size;
  }

  sync(planned: PlannedTile[], view: ViewState): void {
    const wanted = new Set(planned.map((t) => t.key));
    for (const [key, controller] of this.inflight) {
      if (!wanted.has(key)) {
        controller.abort();
        this.inflight.delete(key);
      }
    }
    for (const tile of planned) {
      if (this.cache.has(tile.key) || this.inflight.has(tile.key)) continue;
      const controller = new AbortController();
      this.inflight.set(tile.key, controller);
      void this.loader(tile, view, controller.signal)
        .then((result) => {
          if (this.inflight.get(tile.key) !== controller) return; // superseded
          this.inflight.delete(tile.key);
          if (typeof result === "object" && result !== null && "tileError" in result) {
            this.onError(result.tileError);
          } else {
            this.cache.set(tile.key, result as T);
            this.onTileReady();
          }
        })
        .catch((err: unknown) => {
          if (this.inflight.get(tile.key) === controller) this.inflight.delete(tile.key);
          if ((err as Error)?.name !== "AbortError") {
            this.onError({ status: 0, error: String(err) });
          }
        });
    }
  }

  /** Abort everything (view torn down or expression changed). */
  cancelAll(): void {
    for (const controller of this.inflight.values()) controller.abort();
    this.inflight.clear();
  }
}
