/**
 * Minimal deterministic SVG assembly: element helpers, axes and legends on
 * top of d3 scales.  Everything is plain string building; identical inputs
 * produce byte-identical documents.
 */

import type { ScaleContinuousNumeric } from "d3-scale";

export type Scale = ScaleContinuousNumeric<number, number>;

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const PALETTE: Record<string, string> = {
  lbpf: "#2166ac",
  apf: "#d6604d",
  bpf: "#d6604d",
  lbpf_fleet: "#2166ac",
  resampled: "#6aa84f",
  persistent: "#777777",
  truth: "#111111",
};

export function colorFor(name: string): string {
  return PALETTE[name] ?? "#555555";
}

export function fmt(value: number): string {
  const rounded = value.toFixed(2);
  return rounded === "-0.00" ? "0.00" : rounded;
}

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  children?: string[],
): string {
  const parts = Object.entries(attrs).map(
    ([key, value]) =>
      `${key}="${typeof value === "number" ? fmt(value) : esc(value)}"`,
  );
  const head = parts.length > 0 ? `<${name} ${parts.join(" ")}` : `<${name}`;
  if (children === undefined || children.length === 0) {
    return `${head}/>`;
  }
  return `${head}>${children.join("")}</${name}>`;
}

export function text(
  content: string,
  x: number,
  y: number,
  attrs: Record<string, string | number> = {},
): string {
  return tag("text", { x, y, "font-size": "11", ...attrs }, [esc(content)]);
}

export function polyline(
  points: Array<[number, number]>,
  attrs: Record<string, string | number>,
): string {
  const coords = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline points="${coords}" fill="none" ${Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ")}/>`;
}

/** Bottom axis with ticks, labels and a centred title. */
export function xAxis(scale: Scale, y: number, title: string, ticks = 8): string {
  const [lo, hi] = scale.range();
  const format = scale.tickFormat(ticks);
  const parts = [
    tag("line", { x1: lo, x2: hi, y1: y, y2: y, stroke: "#333" }),
  ];
  for (const value of scale.ticks(ticks)) {
    const x = scale(value);
    parts.push(tag("line", { x1: x, x2: x, y1: y, y2: y + 4, stroke: "#333" }));
    parts.push(text(format(value), x, y + 16, { "text-anchor": "middle" }));
  }
  parts.push(
    text(title, (lo + hi) / 2, y + 32, {
      "text-anchor": "middle",
      "font-size": "12",
    }),
  );
  return tag("g", { class: "x-axis" }, parts);
}

/** Left axis with ticks, labels and a rotated title. */
export function yAxis(scale: Scale, x: number, title: string, ticks = 6): string {
  const [lo, hi] = scale.range();
  const format = scale.tickFormat(ticks);
  const parts = [
    tag("line", { y1: lo, y2: hi, x1: x, x2: x, stroke: "#333" }),
  ];
  for (const value of scale.ticks(ticks)) {
    const y = scale(value);
    parts.push(tag("line", { y1: y, y2: y, x1: x - 4, x2: x, stroke: "#333" }));
    parts.push(
      text(format(value), x - 6, y + 3, { "text-anchor": "end" }),
    );
  }
  const mid = (lo + hi) / 2;
  parts.push(
    text(title, x - 38, mid, {
      "text-anchor": "middle",
      "font-size": "12",
      transform: `rotate(-90 ${fmt(x - 38)} ${fmt(mid)})`,
    }),
  );
  return tag("g", { class: "y-axis" }, parts);
}

export function legend(
  entries: Array<[string, string]>,
  x: number,
  y: number,
): string {
  const parts: string[] = [];
  entries.forEach(([label, color], i) => {
    const row = y + i * 16;
    parts.push(
      tag("rect", { x, y: row - 8, width: 10, height: 10, fill: color }),
    );
    parts.push(text(label, x + 14, row, {}));
  });
  return tag("g", { class: "legend" }, parts);
}

export function svgDocument(
  width: number,
  height: number,
  title: string,
  body: string[],
): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
    tag("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    text(title, width / 2, 18, {
      "text-anchor": "middle",
      "font-size": "14",
      "font-weight": "bold",
    }),
    ...body,
    "</svg>",
  ].join("\n");
}
