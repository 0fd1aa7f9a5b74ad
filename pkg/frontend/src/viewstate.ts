/**
 * View state: what the explorer is looking at, and how that maps between
 * screen pixels, plane coordinates, and the shareable URL fragment.
 *
 * The pixel<->plane mapping must agree with the tile service's renderer
 * to the last bit of float64 it can: pixel centers sit at half-integer
 * offsets from the top-left corner, pixel y grows downward while plane
 * imaginary grows upward, and `scale` is plane units per pixel.
 */

export interface ViewState {
  /** Iteration map, written as an expression in z and c, e.g. "z^2 + c". */
  expr: string;
  /** Plane point at the middle of the canvas. */
  centerRe: number;
  centerIm: number;
  /** Plane units per pixel; smaller is deeper zoom. Always > 0. */
  scale: number;
  /** Escape radius as a power of e: k = exp(logK). */
  logK: number;
  /** Iteration cap N. */
  maxIter: number;
  /** Palette name, resolved by the service. */
  paletteId: string;
}

export const MAX_ITER_LIMIT = 99_999;

export const DEFAULT_VIEW: ViewState = {
  expr: "z^2 + c",
  centerRe: -0.5,
  centerIm: 0,
  scale: 3 / 768,
  logK: Math.log(2),
  maxIter: 100,
  paletteId: "gray256",
};

export interface PlanePoint {
  re: number;
  im: number;
}

/**
 * Plane point of a pixel's center. `px`/`py` are 0-indexed from the
 * top-left corner (fractional values address points between centers).
 */
export function pixelToPlane(
  view: Pick<ViewState, "centerRe" | "centerIm" | "scale">,
  width: number,
  height: number,
  px: number,
  py: number,
): PlanePoint {
  return {
    re: view.centerRe + (px + 0.5 - width / 2) * view.scale,
    im: view.centerIm - (py + 0.5 - height / 2) * view.scale,
  };
}

/** Inverse of pixelToPlane; returns fractional pixel coordinates. */
export function planeToPixel(
  view: Pick<ViewState, "centerRe" | "centerIm" | "scale">,
  width: number,
  height: number,
  re: number,
  im: number,
): { px: number; py: number } {
  return {
    px: (re - view.centerRe) / view.scale - 0.5 + width / 2,
    py: -(im - view.centerIm) / view.scale - 0.5 + height / 2,
  };
}

/**
 * Zoom by `factor` (0.5 = twice as deep), recentering on the plane point
 * under the given pixel — the double-click behavior.
 */
export function zoomAt(
  view: ViewState,
  width: number,
  height: number,
  px: number,
  py: number,
  factor: number,
): ViewState {
  const target = pixelToPlane(view, width, height, px, py);
  return {
    ...view,
    centerRe: target.re,
    centerIm: target.im,
    scale: view.scale * factor,
  };
}

/** Pan by a screen-pixel delta (content follows the pointer). */
export function panBy(view: ViewState, dxPx: number, dyPx: number): ViewState {
  return {
    ...view,
    centerRe: view.centerRe - dxPx * view.scale,
    centerIm: view.centerIm + dyPx * view.scale,
  };
}

/**
 * Wheel/anchored zoom: change scale by `factor` while keeping the plane
 * point under (px, py) fixed on screen.
 */
export function zoomAnchored(
  view: ViewState,
  width: number,
  height: number,
  px: number,
  py: number,
  factor: number,
): ViewState {
  const anchor = pixelToPlane(view, width, height, px, py);
  const scale = view.scale * factor;
  // Solve pixelToPlane(view', px, py) == anchor for the new center.
  return {
    ...view,
    centerRe: anchor.re - (px + 0.5 - width / 2) * scale,
    centerIm: anchor.im + (py + 0.5 - height / 2) * scale,
    scale,
  };
}

// --- URL fragment (de)serialization -----------------------------------
//
// Schema: #expr=...&cx=...&cy=...&scale=...&logk=...&n=...&pal=...
// Values are encodeURIComponent-escaped; numbers use JS's shortest
// round-trip decimal form, so encode(decode(fragment)) === fragment for
// any fragment this module produced.

function fmtNum(x: number): string {
  return String(x);
}

export function encodeFragment(view: ViewState): string {
  return [
    `expr=${encodeURIComponent(view.expr)}`,
    `cx=${fmtNum(view.centerRe)}`,
    `cy=${fmtNum(view.centerIm)}`,
    `scale=${fmtNum(view.scale)}`,
    `logk=${fmtNum(view.logK)}`,
    `n=${fmtNum(view.maxIter)}`,
    `pal=${encodeURIComponent(view.paletteId)}`,
  ].join("&");
}

function parseFinite(text: string): number | null {
  if (text.trim() === "") return null;
  const value = Number(text);
  return Number.isFinite(value) ? value : null;
}

/**
 * Decode a fragment (leading "#" optional). Unknown keys are ignored;
 * missing or malformed fields fall back to DEFAULT_VIEW so a mangled
 * link still loads something sensible.
 */
export function decodeFragment(fragment: string): ViewState {
  const raw = fragment.startsWith("#") ? fragment.slice(1) : fragment;
  const view: ViewState = { ...DEFAULT_VIEW };
  if (raw === "") return view;
  for (const part of raw.split("&")) {
    const eq = part.indexOf("=");
    if (eq < 0) continue;
    const key = part.slice(0, eq);
    let value: string;
    try {
      value = decodeURIComponent(part.slice(eq + 1));
    } catch {
      continue; // malformed escape: keep the default for this field
    }
    switch (key) {
      case "expr":
        if (value !== "") view.expr = value;
        break;
      case "cx": {
        const n = parseFinite(value);
        if (n !== null) view.centerRe = n;
        break;
      }
      case "cy": {
        const n = parseFinite(value);
        if (n !== null) view.centerIm = n;
        break;
      }
      case "scale": {
        const n = parseFinite(value);
        if (n !== null && n > 0) view.scale = n;
        break;
      }
      case "logk": {
        const n = parseFinite(value);
        if (n !== null) view.logK = n;
        break;
      }
      case "n": {
        const n = parseFinite(value);
        if (n !== null && Number.isInteger(n) && n >= 1 && n <= MAX_ITER_LIMIT) {
          view.maxIter = n;
        }
        break;
      }
      case "pal":
        if (value !== "") view.paletteId = value;
        break;
      default:
        break; // ignore unknown keys
    }
  }
  return view;
}
