/**
 * Reader for the experiment CSVs.
 *
 * Every file starts with a metadata comment
 * `# experiment=<name> schema=v1 seed=<seed>`, then a column header line,
 * then plain comma-separated rows. Values are never quoted.
 */

import { readFileSync } from "node:fs";

export interface ExperimentCsv {
  experiment: string;
  schema: string;
  seed: number;
  columns: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

export function parseExperimentCsv(text: string): ExperimentCsv {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no metadata line");
  }
  const head = lines[0];
  if (!head.startsWith("#")) {
    throw new SchemaError(`missing '# experiment=... schema=...' line, got: ${head}`);
  }
  const meta = new Map<string, string>();
  for (const token of head.slice(1).trim().split(/\s+/)) {
    const eq = token.indexOf("=");
    if (eq > 0) meta.set(token.slice(0, eq), token.slice(eq + 1));
  }
  const experiment = meta.get("experiment");
  const schema = meta.get("schema");
  if (!experiment || !schema) {
    throw new SchemaError(`metadata line lacks experiment/schema: ${head}`);
  }
  if (lines.length < 2) {
    throw new SchemaError("CSV has no column header line");
  }
  const columns = lines[1].split(",");
  const rows = lines.slice(2).map((line) => line.split(","));
  for (const row of rows) {
    if (row.length !== columns.length) {
      throw new SchemaError(
        `row has ${row.length} fields, expected ${columns.length}: ${row.join(",")}`,
      );
    }
  }
  if (rows.length === 0) {
    throw new SchemaError(`CSV for ${experiment} contains no data rows`);
  }
  return {
    experiment,
    schema,
    seed: Number(meta.get("seed") ?? "0"),
    columns,
    rows,
  };
}

export function readExperimentCsv(path: string): ExperimentCsv {
  return parseExperimentCsv(readFileSync(path, "utf8"));
}

/** Column accessor that fails loudly on unknown names or non-numeric cells. */
export function numericColumn(csv: ExperimentCsv, name: string): number[] {
  const idx = csv.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `column '${name}' not in [${csv.columns.join(", ")}] of ${csv.experiment}`,
    );
  }
  return csv.rows.map((row) => {
    const value = Number(row[idx]);
    if (Number.isNaN(value)) {
      throw new SchemaError(`non-numeric value '${row[idx]}' in column ${name}`);
    }
    return value;
  });
}

export function stringColumn(csv: ExperimentCsv, name: string): string[] {
  const idx = csv.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`column '${name}' missing from ${csv.experiment}`);
  }
  return csv.rows.map((row) => row[idx]);
}
