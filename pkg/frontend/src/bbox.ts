/** Rectangle geometry for the draw tool: normalization, world clamping,
 * and the bbox query-parameter format (lon-first: west,south,east,north). */

import type { BBox } from "./types.js";

export interface LonLat {
  lon: number;
  lat: number;
}

/** Any two drag corners become a normalized box: west<=east, south<=north. */
export function dragToBBox(a: LonLat, b: LonLat): BBox {
  return {
    west: Math.min(a.lon, b.lon),
    east: Math.max(a.lon, b.lon),
    south: Math.min(a.lat, b.lat),
    north: Math.max(a.lat, b.lat),
  };
}

/** Clamp to valid lon/lat ranges; `clamped` reports whether anything moved
 * (drags reaching past the antimeridian get pinned to +/-180 with a notice). */
export function clampBBox(box: BBox): { box: BBox; clamped: boolean } {
  const clampedBox: BBox = {
    west: Math.min(Math.max(box.west, -180), 180),
    east: Math.min(Math.max(box.east, -180), 180),
    south: Math.min(Math.max(box.south, -90), 90),
    north: Math.min(Math.max(box.north, -90), 90),
  };
  const clamped =
    clampedBox.west !== box.west ||
    clampedBox.east !== box.east ||
    clampedBox.south !== box.south ||
    clampedBox.north !== box.north;
  return { box: clampedBox, clamped };
}

export function isZeroArea(box: BBox): boolean {
  return box.west === box.east || box.south === box.north;
}

export function isValidBBox(box: BBox): boolean {
  return (
    box.west >= -180 && box.east <= 180 && box.west <= box.east &&
    box.south >= -90 && box.north <= 90 && box.south <= box.north &&
    [box.west, box.east, box.south, box.north].every(Number.isFinite)
  );
}

/** The API parameter encoding; String() keeps full float precision. */
export function formatBBox(box: BBox): string {
  return `${box.west},${box.south},${box.east},${box.north}`;
}

export function parseBBox(text: string): BBox | null {
  const parts = text.split(",").map((p) => Number(p.trim()));
  if (parts.length !== 4 || parts.some((n) => !Number.isFinite(n))) {
    return null;
  }
  const box: BBox = { west: parts[0], south: parts[1], east: parts[2], north: parts[3] };
  return isValidBBox(box) ? box : null;
}
