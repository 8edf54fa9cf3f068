/**
 * Particle swarm over time from a trajectory dump.
 *
 * Regular (resampled) particles draw as small equal-sized dots; persistent
 * particles (the lifebelt and any fleet members) draw as weight-sized dots
 * connected by grey lines, one polyline per particle slot, which makes the
 * fleet's staircase of boundary-path trajectories visible.  An optional
 * ground-truth latent path overlays as a black line.
 */

import { scaleLinear } from "d3-scale";

import {
  numberColumn,
  requireColumns,
  stringColumn,
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

const TRAJECTORY_COLUMNS = [
  "t",
  "particle",
  "x",
  "norm_w",
  "group",
  "resampled_from",
] as const;
const LATENT_COLUMNS = ["t", "x", "z"] as const;

const WIDTH = 680;
const HEIGHT = 440;
const MARGIN = { top: 34, right: 24, bottom: 48, left: 64 };

export function renderSwarm(trajectories: Table, truth?: Table): string {
  requireColumns(trajectories, TRAJECTORY_COLUMNS);
  const t = numberColumn(trajectories, "t");
  const particle = numberColumn(trajectories, "particle");
  const x = numberColumn(trajectories, "x");
  const w = numberColumn(trajectories, "norm_w");
  const group = stringColumn(trajectories, "group");

  let truthT: number[] = [];
  let truthX: number[] = [];
  if (truth !== undefined) {
    requireColumns(truth, LATENT_COLUMNS);
    truthT = numberColumn(truth, "t");
    truthX = numberColumn(truth, "x");
  }

  const maxT = Math.max(...t, ...truthT);
  const maxX = Math.max(...x, ...truthX, 1);
  const xScale = scaleLinear()
    .domain([0, maxT])
    .range([MARGIN.left, WIDTH - MARGIN.right]);
  const yScale = scaleLinear()
    .domain([0, maxX])
    .nice()
    .range([HEIGHT - MARGIN.bottom, MARGIN.top]);

  const resampledDots: string[] = [];
  const persistentDots: string[] = [];
  const byParticle = new Map<number, Array<[number, number]>>();
  for (let i = 0; i < t.length; i++) {
    const cx = xScale(t[i]);
    const cy = yScale(x[i]);
    if (group[i] === "resampled") {
      resampledDots.push(
        tag("circle", {
          cx,
          cy,
          r: 2,
          fill: colorFor("resampled"),
          "fill-opacity": "0.35",
        }),
      );
    } else {
      persistentDots.push(
        tag("circle", {
          cx,
          cy,
          r: 1.6 + 6 * Math.sqrt(Math.min(w[i], 1)),
          fill: colorFor("persistent"),
          "fill-opacity": "0.8",
        }),
      );
      let track = byParticle.get(particle[i]);
      if (track === undefined) {
        track = [];
        byParticle.set(particle[i], track);
      }
      track.push([t[i], x[i]]);
    }
  }

  const tracks: string[] = [];
  for (const slot of [...byParticle.keys()].sort((a, b) => a - b)) {
    const points = byParticle
      .get(slot)!
      .sort((a, b) => a[0] - b[0])
      .map(([pt, px]) => [xScale(pt), yScale(px)] as [number, number]);
    tracks.push(
      polyline(points, {
        stroke: colorFor("persistent"),
        "stroke-width": "1",
        "stroke-opacity": "0.7",
        class: "persistent-track",
      }),
    );
  }

  const body = [
    xAxis(xScale, HEIGHT - MARGIN.bottom, "time step"),
    yAxis(yScale, MARGIN.left, "ward occupancy"),
    tag("g", { class: "persistent" }, [...tracks, ...persistentDots]),
    tag("g", { class: "resampled" }, resampledDots),
  ];
  const legendEntries: Array<[string, string]> = [
    ["resampled swarm", colorFor("resampled")],
    ["persistent", colorFor("persistent")],
  ];
  if (truth !== undefined) {
    const points = truthT.map(
      (pt, i) => [xScale(pt), yScale(truthX[i])] as [number, number],
    );
    body.push(
      tag("g", { class: "truth" }, [
        polyline(points, { stroke: colorFor("truth"), "stroke-width": "1.5" }),
      ]),
    );
    legendEntries.push(["true path", colorFor("truth")]);
  }
  body.push(legend(legendEntries, WIDTH - MARGIN.right - 120, MARGIN.top + 8));

  const variant = trajectories.echo.get("filter.variant") ?? "?";
  return svgDocument(WIDTH, HEIGHT, `particle swarm (${variant})`, body);
}
