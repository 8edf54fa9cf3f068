#!/usr/bin/env node
/**
 * Batch figure renderer.
 *
 *   lifebelt-figures render <kind> --in PATH [--in PATH ...]
 *                                  [--truth PATH] --out PATH
 *
 * Kinds: swarm, ess_series, trace, attempts_hist, ess_compare,
 * profile_overlay.  Inputs are the CSV/JSON artifacts written by the
 * lifebelt CLI; anything without their config echo is refused.
 */

import { realpathSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import {
  ArtifactError,
  FIGURE_KINDS,
  renderFigure,
  type FigureKind,
} from "./index.js";

const USAGE = `usage: lifebelt-figures render <kind> --in PATH [--in PATH ...] [--truth PATH] --out PATH
kinds: ${FIGURE_KINDS.join(", ")}`;

export function runCli(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string", multiple: true },
        truth: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (error) {
    console.error(`${(error as Error).message}\n${USAGE}`);
    return 2;
  }

  const [command, kind, ...extra] = parsed.positionals;
  if (command !== "render" || kind === undefined || extra.length > 0) {
    console.error(USAGE);
    return 2;
  }
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    console.error(`unknown figure kind '${kind}'\n${USAGE}`);
    return 2;
  }
  const inputs = parsed.values.in ?? [];
  const out = parsed.values.out;
  if (inputs.length === 0 || out === undefined) {
    console.error(`--in and --out are required\n${USAGE}`);
    return 2;
  }

  try {
    const svg = renderFigure({
      kind: kind as FigureKind,
      inputs,
      truth: parsed.values.truth,
    });
    writeFileSync(out, svg, "utf8");
  } catch (error) {
    if (error instanceof ArtifactError) {
      console.error(`input error: ${error.message}`);
      return 3;
    }
    if (error instanceof Error && "code" in error) {
      console.error(`i/o error: ${error.message}`);
      return 3;
    }
    throw error;
  }
  console.log(`wrote ${out}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
if (invokedDirectly) {
  process.exit(runCli(process.argv.slice(2)));
}
