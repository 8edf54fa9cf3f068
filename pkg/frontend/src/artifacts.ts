/**
 * Readers for the artifact files produced by the lifebelt CLI.
 *
 * Every artifact carries the run's effective configuration: CSV files as
 * leading `# key = value` comment lines, JSON files under a `config` key.
 * Inputs without that echo are refused outright, so a figure can always be
 * traced back to the run that produced it.
 */

import { readFileSync } from "node:fs";

import Papa from "papaparse";

export class ArtifactError extends Error {}

export interface Table {
  path: string;
  columns: string[];
  rows: string[][];
  echo: Map<string, string>;
}

export interface ResultJson {
  path: string;
  config: Record<string, unknown>;
  [key: string]: unknown;
}

/** Read a CLI CSV artifact: config-echo comments, a header row, data rows. */
export function readTable(path: string): Table {
  const text = readFileSync(path, "utf8");
  const echo = new Map<string, string>();
  const dataLines: string[] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq > 0) {
        echo.set(body.slice(0, eq).trim(), body.slice(eq + 1).trim());
      }
    } else if (line.trim() !== "") {
      dataLines.push(line);
    }
  }
  if (echo.size === 0) {
    throw new ArtifactError(
      `${path}: missing config echo (expected leading '# key = value' lines); ` +
        "refusing input of unknown provenance",
    );
  }
  if (dataLines.length === 0) {
    throw new ArtifactError(`${path}: no header row`);
  }
  const parsed = Papa.parse<string[]>(dataLines.join("\n"), {
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new ArtifactError(`${path}: CSV parse error: ${first.message}`);
  }
  const [columns, ...rows] = parsed.data;
  return { path, columns, rows, echo };
}

/** Exact-schema check with a full column report on mismatch. */
export function requireColumns(table: Table, expected: readonly string[]): void {
  const same =
    table.columns.length === expected.length &&
    expected.every((name, i) => table.columns[i] === name);
  if (!same) {
    throw new ArtifactError(
      `${table.path}: column mismatch; expected [${expected.join(", ")}], ` +
        `found [${table.columns.join(", ")}]`,
    );
  }
}

const SPECIAL_FLOATS = new Map<string, number>([
  ["inf", Infinity],
  ["-inf", -Infinity],
  ["nan", NaN],
]);

/** Parse one cell as a number; empty cells become NaN. */
export function cellNumber(value: string): number {
  if (value === "") return NaN;
  const special = SPECIAL_FLOATS.get(value);
  if (special !== undefined) return special;
  const parsed = Number(value);
  if (Number.isNaN(parsed)) {
    throw new ArtifactError(`cannot parse '${value}' as a number`);
  }
  return parsed;
}

/** One named column as numbers. */
export function numberColumn(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new ArtifactError(`${table.path}: no column '${name}'`);
  }
  return table.rows.map((row) => cellNumber(row[idx]));
}

/** Parse one cell as a boolean; data cells encode booleans as 1/0. */
export function cellBool(value: string): boolean {
  if (value === "1") return true;
  if (value === "0") return false;
  throw new ArtifactError(`cannot parse '${value}' as a boolean (expected 1 or 0)`);
}

/** One named column as booleans. */
export function boolColumn(table: Table, name: string): boolean[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new ArtifactError(`${table.path}: no column '${name}'`);
  }
  return table.rows.map((row) => cellBool(row[idx]));
}

/** One named column as raw strings. */
export function stringColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new ArtifactError(`${table.path}: no column '${name}'`);
  }
  return table.rows.map((row) => row[idx]);
}

/** Read a CLI JSON artifact, refusing payloads without a config echo. */
export function readResultJson(path: string): ResultJson {
  const payload = JSON.parse(readFileSync(path, "utf8"));
  if (
    typeof payload !== "object" ||
    payload === null ||
    typeof payload.config !== "object" ||
    payload.config === null
  ) {
    throw new ArtifactError(
      `${path}: missing config echo (no 'config' object); ` +
        "refusing input of unknown provenance",
    );
  }
  return { ...payload, path };
}

/** JSON artifacts store non-finite floats as strings; undo that. */
export function jsonNumber(value: unknown): number {
  if (typeof value === "number") return value;
  if (typeof value === "string") {
    const special = SPECIAL_FLOATS.get(
      value.toLowerCase().replace("infinity", "inf"),
    );
    if (special !== undefined) return special;
  }
  if (value === null) return NaN;
  throw new ArtifactError(`cannot interpret ${JSON.stringify(value)} as a number`);
}
