/**
 * Two-panel ESS comparison from a comparison run: distribution of the
 * mean-over-time ESS on the left, distribution of the final-step ESS on the
 * right, overlaid per filter variant.  Collapsed iterations contribute
 * final ESS zero, so the failure mass shows up at the left edge of the
 * right panel.
 */

import { scaleLinear } from "d3-scale";

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

const WIDTH = 760;
const HEIGHT = 400;
const MARGIN = { top: 34, right: 24, bottom: 48, left: 64 };
const GAP = 58;
const N_BINS = 30;

interface Panel {
  column: "prop_mean_ess" | "prop_final_ess";
  title: string;
}

const PANELS: Panel[] = [
  { column: "prop_mean_ess", title: "mean ESS over steps" },
  { column: "prop_final_ess", title: "final-step ESS" },
];

export function renderEssCompare(iterations: Table): string {
  requireColumns(iterations, ITERATION_COLUMNS);
  const variant = stringColumn(iterations, "variant");
  const evaluated = boolColumn(iterations, "evaluated");
  const order = variantOrder(
    new Set(variant.filter((_, i) => evaluated[i])),
  );
  if (order.length === 0) {
    throw new ArtifactError(`${iterations.path}: no evaluated iterations`);
  }

  const panelWidth = (WIDTH - MARGIN.left - MARGIN.right - GAP) / 2;
  const body: string[] = [];
  PANELS.forEach((panel, p) => {
    const values = numberColumn(iterations, panel.column);
    const byVariant = new Map<string, number[]>(order.map((n) => [n, []]));
    for (let i = 0; i < values.length; i++) {
      if (evaluated[i]) byVariant.get(variant[i])!.push(values[i]);
    }
    const all = [...byVariant.values()].flat();
    const hi = Math.max(...all, 1);
    const width = hi / N_BINS;
    const counts = new Map<string, number[]>();
    for (const [name, vals] of byVariant) {
      const bins = new Array<number>(N_BINS).fill(0);
      for (const v of vals) {
        bins[Math.min(N_BINS - 1, Math.floor(v / width))] += 1;
      }
      counts.set(name, bins);
    }
    const maxCount = Math.max(...[...counts.values()].flat());

    const left = MARGIN.left + p * (panelWidth + GAP);
    const xScale = scaleLinear()
      .domain([0, hi])
      .nice()
      .range([left, left + panelWidth]);
    const yScale = scaleLinear()
      .domain([0, maxCount])
      .nice()
      .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

    const parts = [
      xAxis(xScale, HEIGHT - MARGIN.bottom, panel.title, 5),
      yAxis(yScale, left, "iterations", 5),
    ];
    for (const name of order) {
      const bins = counts.get(name)!;
      const bars: string[] = [];
      bins.forEach((count, i) => {
        if (count === 0) return;
        const x0 = xScale(i * width);
        const x1 = xScale((i + 1) * width);
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
      parts.push(tag("g", { class: `hist hist-${name}` }, bars));
    }
    body.push(tag("g", { class: `panel panel-${panel.column}` }, parts));
  });

  body.push(
    legend(
      order.map((name) => [name, colorFor(name)]),
      WIDTH - MARGIN.right - 90,
      MARGIN.top + 8,
    ),
  );
  return svgDocument(WIDTH, HEIGHT, "effective sample size comparison", body);
}
