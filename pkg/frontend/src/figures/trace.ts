/**
 * Stacked trace panels for a pseudo-marginal chain: the three outcome
 * probabilities plus the log-likelihood estimate, against iteration.
 */

import { scaleLinear } from "d3-scale";

import {
  ArtifactError,
  numberColumn,
  requireColumns,
  type Table,
} from "../artifacts.js";
import { colorFor, polyline, svgDocument, tag, xAxis, yAxis } from "../svg.js";

const TRACE_COLUMNS = [
  "iter",
  "gamma1",
  "gamma2",
  "p_h",
  "p_d",
  "p_r",
  "loglik",
  "accepted",
] as const;

const WIDTH = 720;
const PANEL_HEIGHT = 110;
const MARGIN = { top: 34, right: 24, bottom: 48, left: 64 };
const PANELS = ["p_h", "p_d", "p_r", "loglik"] as const;

export function renderTrace(trace: Table): string {
  requireColumns(trace, TRACE_COLUMNS);
  if (trace.rows.length === 0) {
    throw new ArtifactError(`${trace.path}: empty chain trace, nothing to draw`);
  }
  const iter = numberColumn(trace, "iter");
  const xScale = scaleLinear()
    .domain([0, Math.max(...iter)])
    .range([MARGIN.left, WIDTH - MARGIN.right]);

  const height = MARGIN.top + PANELS.length * PANEL_HEIGHT + MARGIN.bottom;
  const body: string[] = [];
  PANELS.forEach((name, panel) => {
    const series = numberColumn(trace, name).map((v, i) => [iter[i], v]);
    const finite = series.filter(([, v]) => Number.isFinite(v));
    if (finite.length === 0) {
      throw new ArtifactError(`${trace.path}: column '${name}' has no finite values`);
    }
    const values = finite.map(([, v]) => v);
    const top = MARGIN.top + panel * PANEL_HEIGHT;
    const yScale = scaleLinear()
      .domain([Math.min(...values), Math.max(...values)])
      .nice()
      .range([top + PANEL_HEIGHT - 14, top + 6]);
    const points = finite.map(
      ([it, v]) => [xScale(it), yScale(v)] as [number, number],
    );
    body.push(
      tag("g", { class: `panel panel-${name}` }, [
        yAxis(yScale, MARGIN.left, name, 3),
        polyline(points, {
          stroke: colorFor("lbpf"),
          "stroke-width": "0.8",
        }),
      ]),
    );
  });
  body.push(xAxis(xScale, MARGIN.top + PANELS.length * PANEL_HEIGHT, "iteration"));

  const variant = trace.echo.get("filter.variant") ?? "?";
  return svgDocument(
    WIDTH,
    height,
    `chain trace (${variant} likelihood estimates)`,
    body,
  );
}
