#!/usr/bin/env node
/**
 * CLI: render experiment CSVs into SVG figures plus sidecar series dumps.
 *
 *   qgame-figures render --kind fig2a --csv out/fig2a.csv --out figs/fig2a.svg
 *   qgame-figures render-all --dir out --out figs
 *
 * The sidecar dump lands next to the SVG as <name>.series.txt. Schema or
 * experiment mismatches exit nonzero naming the expected schema.
 */

import { mkdirSync, writeFileSync, existsSync } from "node:fs";
import { dirname, join } from "node:path";

import { SchemaError, readExperimentCsv } from "./csv.js";
import { EXPECTED_EXPERIMENT, FigureKind, extractFigure, sidecarDump } from "./figures.js";
import { renderSvg } from "./svg.js";

const KINDS = Object.keys(EXPECTED_EXPERIMENT) as FigureKind[];

const DEFAULT_SOURCES: Record<FigureKind, string> = {
  fig2a: "fig2a.csv",
  fig2b: "fig2b.csv",
  fig2c: "fig2c.csv",
  fig4: "ergotropy_sweep.csv",
  "haar-hist": "haar_stats.csv",
};

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new SchemaError(`expected --flag value pairs, got '${key}'`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

export function renderFile(kind: FigureKind, csvPath: string, outPath: string): string[] {
  const csv = readExperimentCsv(csvPath);
  const figure = extractFigure(kind, csv);
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, renderSvg(figure));
  const sidecar = outPath.replace(/\.svg$/, "") + ".series.txt";
  writeFileSync(sidecar, sidecarDump(figure));
  return [outPath, sidecar];
}

function usage(): string {
  return [
    "usage:",
    "  qgame-figures render --kind <" + KINDS.join("|") + "> --csv <file> --out <file.svg>",
    "  qgame-figures render-all --dir <csv dir> --out <figure dir>",
  ].join("\n");
}

export function main(argv: string[]): number {
  try {
    const [command, ...rest] = argv;
    if (command === "render") {
      const flags = parseFlags(rest);
      const kind = flags.get("kind") as FigureKind | undefined;
      const csv = flags.get("csv");
      const out = flags.get("out");
      if (!kind || !KINDS.includes(kind) || !csv || !out) {
        console.error(usage());
        return 2;
      }
      const written = renderFile(kind, csv, out);
      console.log(written.join("\n"));
      return 0;
    }
    if (command === "render-all") {
      const flags = parseFlags(rest);
      const dir = flags.get("dir");
      const out = flags.get("out");
      if (!dir || !out) {
        console.error(usage());
        return 2;
      }
      let rendered = 0;
      for (const kind of KINDS) {
        const source = join(dir, DEFAULT_SOURCES[kind]);
        if (!existsSync(source)) {
          console.error(`skip ${kind}: ${source} not found`);
          continue;
        }
        const written = renderFile(kind, source, join(out, `${kind}.svg`));
        console.log(written.join("\n"));
        rendered += 1;
      }
      return rendered > 0 ? 0 : 1;
    }
    console.error(usage());
    return 2;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
