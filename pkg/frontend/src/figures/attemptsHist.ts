/**
 * Histogram of per-iteration proposal attempts from a comparison run, one
 * overlaid series per filter variant.  Binning is geometric (log-x) so the
 * separated masses (constant-cost floor, early terminations, cap
 * saturation) stay visible even when they sit decades apart.
 */

import { scaleLinear, scaleLog } from "d3-scale";

import {
  ArtifactError,
  boolColumn,
  numberColumn,
  requireColumns,
  stringColumn,
  type Table,
} from "../artifacts.js";
import { colorFor, legend, svgDocument, tag, xAxis, yAxis } from "../svg.js";
import { ITERATION_COLUMNS, variantOrder } from "./iterations.js";

const WIDTH = 680;
const HEIGHT = 420;
const MARGIN = { top: 34, right: 24, bottom: 48, left: 64 };
const N_BINS = 36;

export function renderAttemptsHist(iterations: Table): string {
  requireColumns(iterations, ITERATION_COLUMNS);
  const variant = stringColumn(iterations, "variant");
  const evaluated = boolColumn(iterations, "evaluated");
  const attempts = numberColumn(iterations, "prop_attempts");

  const byVariant = new Map<string, number[]>();
  for (let i = 0; i < variant.length; i++) {
    if (!evaluated[i]) continue;
    if (!(attempts[i] > 0)) {
      throw new ArtifactError(
        `${iterations.path}: evaluated iteration with non-positive attempt count`,
      );
    }
    let bucket = byVariant.get(variant[i]);
    if (bucket === undefined) {
      bucket = [];
      byVariant.set(variant[i], bucket);
    }
    bucket.push(attempts[i]);
  }
  if (byVariant.size === 0) {
    throw new ArtifactError(`${iterations.path}: no evaluated iterations`);
  }

  const all = [...byVariant.values()].flat();
  let lo = Math.min(...all);
  let hi = Math.max(...all);
  if (lo === hi) {
    lo /= 1.25;
    hi *= 1.25;
  }
  const edges = Array.from(
    { length: N_BINS + 1 },
    (_, i) => lo * Math.pow(hi / lo, i / N_BINS),
  );
  const binIndex = (value: number): number =>
    Math.min(
      N_BINS - 1,
      Math.floor((Math.log(value / lo) / Math.log(hi / lo)) * N_BINS),
    );

  const counts = new Map<string, number[]>();
  for (const [name, values] of byVariant) {
    const bins = new Array<number>(N_BINS).fill(0);
    for (const value of values) bins[binIndex(value)] += 1;
    counts.set(name, bins);
  }
  const maxCount = Math.max(...[...counts.values()].flat());

  const xScale = scaleLog()
    .domain([lo, hi])
    .range([MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = scaleLinear()
    .domain([0, maxCount])
    .nice()
    .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

  const order = variantOrder(byVariant.keys());
  const body = [
    xAxis(xScale, HEIGHT - MARGIN.bottom, "proposal attempts per iteration", 6),
    yAxis(yScale, MARGIN.left, "iterations"),
  ];
  for (const name of order) {
    const bins = counts.get(name)!;
    const bars: string[] = [];
    bins.forEach((count, i) => {
      if (count === 0) return;
      const x0 = xScale(edges[i]);
      const x1 = xScale(edges[i + 1]);
      bars.push(
        tag("rect", {
          x: x0,
          y: yScale(count),
          width: Math.max(x1 - x0 - 0.5, 0.5),
          height: yScale(0) - yScale(count),
          fill: colorFor(name),
          "fill-opacity": "0.55",
        }),
      );
    });
    body.push(tag("g", { class: `hist hist-${name}` }, bars));
  }
  body.push(
    legend(
      order.map((name) => [name, colorFor(name)]),
      WIDTH - MARGIN.right - 90,
      MARGIN.top + 8,
    ),
  );

  return svgDocument(WIDTH, HEIGHT, "attempt mass per iteration", body);
}
