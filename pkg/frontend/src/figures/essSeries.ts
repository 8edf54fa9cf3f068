/**
 * Effective sample size per time step from one filter result file, with the
 * collapse step marked when the run died.
 */

import { scaleLinear } from "d3-scale";

import { jsonNumber, type ResultJson, ArtifactError } from "../artifacts.js";
import {
  colorFor,
  polyline,
  svgDocument,
  tag,
  text,
  xAxis,
  yAxis,
} from "../svg.js";

const WIDTH = 640;
const HEIGHT = 400;
const MARGIN = { top: 34, right: 24, bottom: 48, left: 64 };

export function renderEssSeries(result: ResultJson): string {
  const raw = result["ess_per_t"];
  if (!Array.isArray(raw) || raw.length === 0) {
    throw new ArtifactError(`${result.path}: no ess_per_t series`);
  }
  const ess = raw.map(jsonNumber);
  const n = jsonNumber(result["n_particles"]);
  const variant = String(result["variant"] ?? "?");

  const xScale = scaleLinear()
    .domain([0, ess.length - 1])
    .range([MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = scaleLinear()
    .domain([0, n])
    .nice()
    .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

  const points = ess.map((v, i) => [xScale(i), yScale(v)] as [number, number]);
  const color = colorFor(variant);
  const body = [
    xAxis(xScale, HEIGHT - MARGIN.bottom, "time step"),
    yAxis(yScale, MARGIN.left, "effective sample size"),
    tag("g", { class: "series" }, [
      polyline(points, { stroke: color, "stroke-width": "1.5" }),
      ...points.map(([cx, cy]) =>
        tag("circle", { cx, cy, r: 2.5, fill: color }),
      ),
    ]),
  ];

  const collapsedAt = result["collapsed_at"];
  if (collapsedAt !== null && collapsedAt !== undefined) {
    const cx = xScale(jsonNumber(collapsedAt));
    body.push(
      tag("g", { class: "collapse-marker" }, [
        tag("line", {
          x1: cx,
          x2: cx,
          y1: MARGIN.top,
          y2: HEIGHT - MARGIN.bottom,
          stroke: "#aa0000",
          "stroke-dasharray": "4 3",
        }),
        text("collapse", cx + 4, MARGIN.top + 12, { fill: "#aa0000" }),
      ]),
    );
  }

  return svgDocument(
    WIDTH,
    HEIGHT,
    `ESS per step (${variant}, N = ${n})`,
    body,
  );
}
