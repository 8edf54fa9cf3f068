/**
 * Figure registry: maps a figure kind to its input readers and renderer.
 * All statistics live in the producing toolkit; this package only reads the
 * artifact files, bins, scales and draws.
 */

import { ArtifactError, readResultJson, readTable } from "./artifacts.js";
import { renderAttemptsHist } from "./figures/attemptsHist.js";
import { renderEssCompare } from "./figures/essCompare.js";
import { renderEssSeries } from "./figures/essSeries.js";
import { renderProfileOverlay } from "./figures/profileOverlay.js";
import { renderSwarm } from "./figures/swarm.js";
import { renderTrace } from "./figures/trace.js";

export {
  ArtifactError,
  readResultJson,
  readTable,
  requireColumns,
} from "./artifacts.js";

export const FIGURE_KINDS = [
  "swarm",
  "ess_series",
  "trace",
  "attempts_hist",
  "ess_compare",
  "profile_overlay",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  truth?: string;
}

function requireSingleInput(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new ArtifactError(
      `figure kind '${spec.kind}' takes exactly one --in file, got ${spec.inputs.length}`,
    );
  }
  return spec.inputs[0];
}

/** Render one figure to an SVG document string. */
export function renderFigure(spec: FigureSpec): string {
  if (spec.truth !== undefined && spec.kind !== "swarm") {
    throw new ArtifactError("--truth only applies to the swarm figure");
  }
  switch (spec.kind) {
    case "swarm": {
      const trajectories = readTable(requireSingleInput(spec));
      const truth = spec.truth === undefined ? undefined : readTable(spec.truth);
      return renderSwarm(trajectories, truth);
    }
    case "ess_series":
      return renderEssSeries(readResultJson(requireSingleInput(spec)));
    case "trace":
      return renderTrace(readTable(requireSingleInput(spec)));
    case "attempts_hist":
      return renderAttemptsHist(readTable(requireSingleInput(spec)));
    case "ess_compare":
      return renderEssCompare(readTable(requireSingleInput(spec)));
    case "profile_overlay": {
      if (spec.inputs.length === 0) {
        throw new ArtifactError("profile_overlay needs at least one --in file");
      }
      return renderProfileOverlay(spec.inputs.map(readTable));
    }
    default: {
      const kind: never = spec.kind;
      throw new ArtifactError(
        `unknown figure kind '${kind}'; expected one of ${FIGURE_KINDS.join(", ")}`,
      );
    }
  }
}
