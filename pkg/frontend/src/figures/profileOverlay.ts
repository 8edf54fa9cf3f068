/**
 * Profile-likelihood overlay from one or more grid files (typically one per
 * filter variant): per grid point, the mean log-likelihood estimate across
 * replicates with +-1 standard deviation error bars, curves overlaid on a
 * shared axis.  Replicates whose estimate is -inf (collapsed runs) are
 * dropped from that point's mean and flagged in the legend label.
 */

import { scaleLinear } from "d3-scale";

import {
  ArtifactError,
  numberColumn,
  requireColumns,
  type Table,
} from "../artifacts.js";
import {
  colorFor,
  legend,
  polyline,
  svgDocument,
  tag,
  xAxis,
  yAxis,
} from "../svg.js";

const GRID_COLUMNS = [
  "point",
  "replicate",
  "p_h",
  "p_d",
  "p_r",
  "seed",
  "loglik",
  "collapsed_at",
  "final_ess",
  "total_attempts",
] as const;

const WIDTH = 680;
const HEIGHT = 440;
const MARGIN = { top: 34, right: 24, bottom: 48, left: 70 };

interface Curve {
  label: string;
  color: string;
  points: Array<{ x: number; mean: number; sd: number }>;
}

function summarise(table: Table): Curve {
  requireColumns(table, GRID_COLUMNS);
  const point = numberColumn(table, "point");
  const pd = numberColumn(table, "p_d");
  const loglik = numberColumn(table, "loglik");

  const byPoint = new Map<number, { x: number; values: number[]; dropped: number }>();
  for (let i = 0; i < point.length; i++) {
    let cell = byPoint.get(point[i]);
    if (cell === undefined) {
      cell = { x: pd[i], values: [], dropped: 0 };
      byPoint.set(point[i], cell);
    }
    if (Number.isFinite(loglik[i])) {
      cell.values.push(loglik[i]);
    } else {
      cell.dropped += 1;
    }
  }

  const points: Curve["points"] = [];
  let dropped = 0;
  for (const index of [...byPoint.keys()].sort((a, b) => a - b)) {
    const cell = byPoint.get(index)!;
    dropped += cell.dropped;
    if (cell.values.length === 0) continue;
    const mean = cell.values.reduce((a, b) => a + b, 0) / cell.values.length;
    const sd = Math.sqrt(
      cell.values.reduce((a, b) => a + (b - mean) ** 2, 0) /
        Math.max(cell.values.length - 1, 1),
    );
    points.push({ x: cell.x, mean, sd });
  }
  if (points.length === 0) {
    throw new ArtifactError(`${table.path}: every grid replicate collapsed`);
  }
  const variant = table.echo.get("filter.variant") ?? "?";
  const label = dropped > 0 ? `${variant} (${dropped} collapsed)` : variant;
  return { label, color: colorFor(variant), points };
}

export function renderProfileOverlay(tables: Table[]): string {
  if (tables.length === 0) {
    throw new ArtifactError("profile overlay needs at least one grid file");
  }
  const curves = tables.map(summarise);

  const xs = curves.flatMap((c) => c.points.map((p) => p.x));
  const los = curves.flatMap((c) => c.points.map((p) => p.mean - p.sd));
  const his = curves.flatMap((c) => c.points.map((p) => p.mean + p.sd));
  const xScale = scaleLinear()
    .domain([Math.min(...xs), Math.max(...xs)])
    .nice()
    .range([MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = scaleLinear()
    .domain([Math.min(...los), Math.max(...his)])
    .nice()
    .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

  const body = [
    xAxis(xScale, HEIGHT - MARGIN.bottom, "death probability p_d"),
    yAxis(yScale, MARGIN.left, "log-likelihood estimate"),
  ];
  for (const curve of curves) {
    const parts: string[] = [];
    const line = curve.points.map(
      (p) => [xScale(p.x), yScale(p.mean)] as [number, number],
    );
    parts.push(polyline(line, { stroke: curve.color, "stroke-width": "1.5" }));
    for (const p of curve.points) {
      const cx = xScale(p.x);
      const yLo = yScale(p.mean - p.sd);
      const yHi = yScale(p.mean + p.sd);
      parts.push(
        tag("line", { x1: cx, x2: cx, y1: yLo, y2: yHi, stroke: curve.color }),
        tag("line", { x1: cx - 3, x2: cx + 3, y1: yLo, y2: yLo, stroke: curve.color }),
        tag("line", { x1: cx - 3, x2: cx + 3, y1: yHi, y2: yHi, stroke: curve.color }),
        tag("circle", { cx, cy: yScale(p.mean), r: 2.5, fill: curve.color }),
      );
    }
    body.push(tag("g", { class: "curve" }, parts));
  }
  body.push(
    legend(
      curves.map((c) => [c.label, c.color]),
      WIDTH - MARGIN.right - 150,
      MARGIN.top + 8,
    ),
  );
  return svgDocument(WIDTH, HEIGHT, "profile likelihood overlay", body);
}
