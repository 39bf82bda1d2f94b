/** Interactive map: equirectangular projection with pan/zoom, the bundled
 * base map, result-extent outlines, and the rectangle draw tool.
 *
 * Projection math lives in pure functions; MapController owns the SVG and
 * pointer events.
 */

import { BASEMAP, type Polyline } from "./basemap.js";
import { clampBBox, dragToBBox, isZeroArea, type LonLat } from "./bbox.js";
import type { BBox } from "./types.js";

export interface MapView {
  centerLon: number;
  centerLat: number;
  pxPerDegree: number;
  width: number;
  height: number;
}

export function defaultView(width: number, height: number): MapView {
  return { centerLon: -40, centerLat: 25, pxPerDegree: width / 360, width, height };
}

export function project(view: MapView, lon: number, lat: number): { x: number; y: number } {
  return {
    x: (lon - view.centerLon) * view.pxPerDegree + view.width / 2,
    y: (view.centerLat - lat) * view.pxPerDegree + view.height / 2,
  };
}

export function unproject(view: MapView, x: number, y: number): LonLat {
  return {
    lon: view.centerLon + (x - view.width / 2) / view.pxPerDegree,
    lat: view.centerLat - (y - view.height / 2) / view.pxPerDegree,
  };
}

export function zoomView(view: MapView, factor: number): MapView {
  const pxPerDegree = Math.min(Math.max(view.pxPerDegree * factor, view.width / 400), 64);
  return { ...view, pxPerDegree };
}

export function panView(view: MapView, dxPx: number, dyPx: number): MapView {
  return {
    ...view,
    centerLon: view.centerLon - dxPx / view.pxPerDegree,
    centerLat: view.centerLat + dyPx / view.pxPerDegree,
  };
}

function pathFor(view: MapView, line: Polyline): string {
  return line
    .map(([lon, lat], index) => {
      const { x, y } = project(view, lon, lat);
      return `${index === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

export type MapMode = "pan" | "draw";

export interface MapCallbacks {
  onBoxDrawn: (box: BBox | null, notice: string | null) => void;
  onViewChanged?: () => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export class MapController {
  view: MapView;
  mode: MapMode = "pan";
  private readonly svg: SVGSVGElement;
  private readonly callbacks: MapCallbacks;
  private resultBoxes: BBox[] = [];
  private drawnBox: BBox | null = null;
  private dragStart: LonLat | null = null;
  private dragCurrent: LonLat | null = null;
  private panStart: { x: number; y: number } | null = null;

  constructor(svg: SVGSVGElement, callbacks: MapCallbacks) {
    this.svg = svg;
    this.callbacks = callbacks;
    const rect = svg.getBoundingClientRect();
    this.view = defaultView(rect.width || 800, rect.height || 420);

    svg.addEventListener("pointerdown", (event) => this.onPointerDown(event));
    svg.addEventListener("pointermove", (event) => this.onPointerMove(event));
    svg.addEventListener("pointerup", (event) => this.onPointerUp(event));
    svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      this.view = zoomView(this.view, event.deltaY < 0 ? 1.25 : 0.8);
      this.render();
    });
    window.addEventListener("keydown", (event) => {
      if (event.key === "Escape" && this.dragStart !== null) {
        this.dragStart = null;
        this.dragCurrent = null;
        this.render();
      }
    });
    this.render();
  }

  setResultBoxes(boxes: BBox[]): void {
    this.resultBoxes = boxes;
    this.render();
  }

  setDrawnBox(box: BBox | null): void {
    this.drawnBox = box;
    this.render();
  }

  zoom(factor: number): void {
    this.view = zoomView(this.view, factor);
    this.render();
  }

  private eventLonLat(event: PointerEvent): LonLat {
    const rect = this.svg.getBoundingClientRect();
    return unproject(this.view, event.clientX - rect.left, event.clientY - rect.top);
  }

  private onPointerDown(event: PointerEvent): void {
    this.svg.setPointerCapture(event.pointerId);
    if (this.mode === "draw") {
      this.dragStart = this.eventLonLat(event);
      this.dragCurrent = this.dragStart;
    } else {
      this.panStart = { x: event.clientX, y: event.clientY };
    }
  }

  private onPointerMove(event: PointerEvent): void {
    if (this.mode === "draw" && this.dragStart !== null) {
      this.dragCurrent = this.eventLonLat(event);
      this.render();
    } else if (this.panStart !== null) {
      this.view = panView(
        this.view,
        event.clientX - this.panStart.x,
        event.clientY - this.panStart.y,
      );
      this.panStart = { x: event.clientX, y: event.clientY };
      this.render();
    }
  }

  private onPointerUp(event: PointerEvent): void {
    if (this.mode === "draw" && this.dragStart !== null) {
      const raw = dragToBBox(this.dragStart, this.eventLonLat(event));
      this.dragStart = null;
      this.dragCurrent = null;
      const { box, clamped } = clampBBox(raw);
      if (isZeroArea(box)) {
        // A click without a drag is not a filter.
        this.callbacks.onBoxDrawn(null, "zero-area rectangle ignored");
      } else {
        this.callbacks.onBoxDrawn(box, clamped ? "rectangle clamped to ±180°/±90°" : null);
      }
    }
    this.panStart = null;
  }

  private boxElement(box: BBox, className: string): SVGRectElement {
    const a = project(this.view, box.west, box.north);
    const b = project(this.view, box.east, box.south);
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(Math.min(a.x, b.x)));
    rect.setAttribute("y", String(Math.min(a.y, b.y)));
    rect.setAttribute("width", String(Math.abs(b.x - a.x)));
    rect.setAttribute("height", String(Math.abs(b.y - a.y)));
    rect.setAttribute("class", className);
    return rect;
  }

  render(): void {
    while (this.svg.firstChild) {
      this.svg.removeChild(this.svg.firstChild);
    }
    for (const line of BASEMAP.outlines) {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", pathFor(this.view, line));
      path.setAttribute("class", "coastline");
      this.svg.appendChild(path);
    }
    for (const line of BASEMAP.stateLines) {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", pathFor(this.view, line));
      path.setAttribute("class", "state-line");
      this.svg.appendChild(path);
    }
    for (const box of this.resultBoxes) {
      this.svg.appendChild(this.boxElement(box, "result-box"));
    }
    if (this.drawnBox !== null) {
      this.svg.appendChild(this.boxElement(this.drawnBox, "drawn-box"));
    }
    if (this.dragStart !== null && this.dragCurrent !== null) {
      const preview = clampBBox(dragToBBox(this.dragStart, this.dragCurrent)).box;
      this.svg.appendChild(this.boxElement(preview, "drawn-box preview"));
    }
  }
}
