// Resolution-independent rendering of a layout to SVG markup. Boxes are
// positioned in normalized [0,1] coordinates inside a viewBox and scale
// with whatever viewport the SVG lands in; no pixel math anywhere.

import { labelColor, labelStroke } from "./colors.js";
import type { CanvasRegion, LayoutDoc } from "./types.js";

export interface SceneOptions {
  selected?: number[];
  highlightRegion?: CanvasRegion;
  showRegionBands?: boolean;
  labelNames?: string[];
}

const REGION_BANDS: Record<CanvasRegion, [number, number]> = {
  top: [0, 1 / 3],
  middle: [1 / 3, 2 / 3],
  bottom: [2 / 3, 1],
};

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  return Number(v.toFixed(5)).toString();
}

/**
 * Build the SVG document for a layout. Every box comes verbatim from the
 * service response; the scene never adjusts geometry.
 */
export function renderScene(layout: LayoutDoc, options: SceneOptions = {}): string {
  const selected = new Set(options.selected ?? []);
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1" preserveAspectRatio="xMidYMid meet">`,
    `<rect class="canvas" x="0" y="0" width="1" height="1" fill="#fafafa" stroke="#ccc" stroke-width="0.004"/>`,
  ];

  if (options.showRegionBands) {
    for (const [region, [lo, hi]] of Object.entries(REGION_BANDS)) {
      const active = region === options.highlightRegion;
      parts.push(
        `<rect class="region region-${region}${active ? " active" : ""}" ` +
          `x="0" y="${fmt(lo)}" width="1" height="${fmt(hi - lo)}" ` +
          `fill="${active ? "rgba(80,140,255,0.18)" : "rgba(0,0,0,0.02)"}" ` +
          `stroke="rgba(80,140,255,0.35)" stroke-width="0.002" stroke-dasharray="0.02 0.012"/>`,
      );
    }
  }

  layout.elements.forEach((el, index) => {
    const x = el.xc - el.w / 2;
    const y = el.yc - el.h / 2;
    const isSelected = selected.has(index);
    const name = options.labelNames?.[el.label] ?? `label ${el.label}`;
    parts.push(
      `<g class="element${isSelected ? " selected" : ""}" data-index="${index}" data-label="${el.label}">` +
        `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(el.w)}" height="${fmt(el.h)}" ` +
        `fill="${labelColor(el.label, isSelected ? 0.95 : 0.55)}" ` +
        `stroke="${isSelected ? "#1a47d6" : labelStroke(el.label)}" ` +
        `stroke-width="${isSelected ? "0.008" : "0.004"}"/>` +
        `<text x="${fmt(el.xc)}" y="${fmt(el.yc)}" font-size="0.035" text-anchor="middle" ` +
        `dominant-baseline="middle" fill="#222">${index}: ${esc(name)}</text>` +
        `</g>`,
    );
  });

  parts.push("</svg>");
  return parts.join("");
}

/** Small scene for snapshot strips: boxes only, no text or bands. */
export function renderThumbnail(layout: LayoutDoc): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1 1" preserveAspectRatio="xMidYMid meet">`,
    `<rect x="0" y="0" width="1" height="1" fill="#fff" stroke="#ddd" stroke-width="0.01"/>`,
  ];
  for (const el of layout.elements) {
    parts.push(
      `<rect x="${fmt(el.xc - el.w / 2)}" y="${fmt(el.yc - el.h / 2)}" ` +
        `width="${fmt(el.w)}" height="${fmt(el.h)}" ` +
        `fill="${labelColor(el.label, 0.6)}" stroke="${labelStroke(el.label)}" stroke-width="0.006"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
