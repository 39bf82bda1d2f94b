import { describe, expect, it } from "vitest";

import { clampBBox, dragToBBox, formatBBox, isZeroArea, parseBBox } from "../src/bbox.js";

describe("drag normalization", () => {
  it("is direction independent", () => {
    const sw = { lon: -120, lat: 30 };
    const ne = { lon: -100, lat: 45 };
    const expected = { west: -120, south: 30, east: -100, north: 45 };
    expect(dragToBBox(sw, ne)).toEqual(expected);
    expect(dragToBBox(ne, sw)).toEqual(expected);
    expect(dragToBBox({ lon: -120, lat: 45 }, { lon: -100, lat: 30 })).toEqual(expected);
    expect(dragToBBox({ lon: -100, lat: 30 }, { lon: -120, lat: 45 })).toEqual(expected);
  });
});

describe("world clamping", () => {
  it("pins the box at the antimeridian and reports it", () => {
    const { box, clamped } = clampBBox({ west: -200, south: -95, east: 170, north: 80 });
    expect(clamped).toBe(true);
    expect(box).toEqual({ west: -180, south: -90, east: 170, north: 80 });
  });

  it("leaves in-range boxes untouched", () => {
    const input = { west: -10, south: -10, east: 10, north: 10 };
    const { box, clamped } = clampBBox(input);
    expect(clamped).toBe(false);
    expect(box).toEqual(input);
  });
});

describe("zero-area detection", () => {
  it("flags clicks and degenerate drags", () => {
    expect(isZeroArea({ west: 5, south: 5, east: 5, north: 10 })).toBe(true);
    expect(isZeroArea({ west: 5, south: 5, east: 10, north: 5 })).toBe(true);
    expect(isZeroArea({ west: 5, south: 5, east: 6, north: 6 })).toBe(false);
  });
});

describe("bbox text format", () => {
  it("round trips through the editor field", () => {
    const box = { west: -124.409591, south: 32.534156, east: -66.949895, north: 49.384358 };
    expect(parseBBox(formatBBox(box))).toEqual(box);
  });

  it("rejects malformed and out-of-order input", () => {
    expect(parseBBox("1,2,3")).toBeNull();
    expect(parseBBox("a,b,c,d")).toBeNull();
    expect(parseBBox("10,0,-10,1")).toBeNull();
    expect(parseBBox("0,50,10,40")).toBeNull();
  });
});
