/**
 * Figure definitions: which experiment feeds each figure and how its rows
 * map onto plotted series. No arithmetic happens here beyond grouping; the
 * upstream CSVs already carry the per-site and ratio transforms.
 */

import { ExperimentCsv, SchemaError, numericColumn, stringColumn } from "./csv.js";

export type FigureKind = "fig2a" | "fig2b" | "fig2c" | "fig4" | "haar-hist";

export const EXPECTED_EXPERIMENT: Record<FigureKind, string> = {
  fig2a: "fig2a",
  fig2b: "fig2b",
  fig2c: "fig2c",
  fig4: "ergotropy-sweep",
  "haar-hist": "haar-stats",
};

export const EXPECTED_SCHEMA = "v1";

export interface Series {
  name: string;
  /** original CSV cell strings, kept verbatim for the sidecar dump */
  xRaw: string[];
  yRaw: string[];
  x: number[];
  y: number[];
}

export interface FigureData {
  kind: FigureKind;
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  /** render as bars (histogram) instead of lines */
  bars?: boolean;
}

export function checkSchema(kind: FigureKind, csv: ExperimentCsv): void {
  const expected = EXPECTED_EXPERIMENT[kind];
  if (csv.schema !== EXPECTED_SCHEMA || csv.experiment !== expected) {
    throw new SchemaError(
      `${kind} expects experiment=${expected} schema=${EXPECTED_SCHEMA}, ` +
        `got experiment=${csv.experiment} schema=${csv.schema}`,
    );
  }
}

function groupedSeries(
  csv: ExperimentCsv,
  groupColumn: string,
  xColumn: string,
  yColumn: string,
  label: (group: string) => string,
): Series[] {
  const groups = stringColumn(csv, groupColumn);
  const xs = stringColumn(csv, xColumn);
  const ys = stringColumn(csv, yColumn);
  const order: string[] = [];
  const byGroup = new Map<string, Series>();
  groups.forEach((g, i) => {
    let series = byGroup.get(g);
    if (!series) {
      series = { name: label(g), xRaw: [], yRaw: [], x: [], y: [] };
      byGroup.set(g, series);
      order.push(g);
    }
    series.xRaw.push(xs[i]);
    series.yRaw.push(ys[i]);
    series.x.push(Number(xs[i]));
    series.y.push(Number(ys[i]));
  });
  return order.map((g) => byGroup.get(g)!);
}

function columnSeries(csv: ExperimentCsv, xColumn: string, names: string[]): Series[] {
  const xs = stringColumn(csv, xColumn);
  return names.map((name) => {
    const ys = stringColumn(csv, name);
    numericColumn(csv, name); // validates numeric content
    return {
      name,
      xRaw: [...xs],
      yRaw: [...ys],
      x: xs.map(Number),
      y: ys.map(Number),
    };
  });
}

export function extractFigure(kind: FigureKind, csv: ExperimentCsv): FigureData {
  checkSchema(kind, csv);
  switch (kind) {
    case "fig2a":
      return {
        kind,
        title: "Minimum energy per site vs M/N_B (one curve per N_B)",
        xLabel: "M / N_B",
        yLabel: "energy per site",
        series: groupedSeries(csv, "N_B", "M_over_NB", "energy_per_site", (g) => `N_B=${g}`),
      };
    case "fig2b":
      return {
        kind,
        title: "Searched-defence minimum energy per site vs M/N_B (one curve per N)",
        xLabel: "M / N_B",
        yLabel: "energy per site",
        series: groupedSeries(csv, "N", "M_over_NB", "energy_per_site", (g) => `N=${g}`),
      };
    case "fig2c":
      return {
        kind,
        title: "Searched-defence minimum energy per site vs N (one curve per N_B)",
        xLabel: "N",
        yLabel: "energy per site",
        series: groupedSeries(csv, "N_B", "N", "energy_per_site", (g) => `N_B=${g}`),
      };
    case "fig4":
      return {
        kind,
        title: "Five-level pair: extractable energy per site vs p_2",
        xLabel: "p_2",
        yLabel: "energy per site",
        series: columnSeries(csv, "p_2", [
          "single_site",
          "oracle_per_site",
          "closed_form",
        ]),
      };
    case "haar-hist":
      return {
        kind,
        title: "Haar-random defences: mean 2-site entropy per sample",
        xLabel: "sample mean entropy (bits)",
        yLabel: "count",
        bars: true,
        series: columnSeries(csv, "sample_index", ["mean_entropy"]),
      };
  }
}

/**
 * Text dump of the plotted series, one block per series, points carried as
 * the verbatim CSV cell strings so the dump can be diffed against the
 * source file row for row.
 */
export function sidecarDump(figure: FigureData): string {
  const lines = [`# figure=${figure.kind} schema=${EXPECTED_SCHEMA}`];
  for (const series of figure.series) {
    lines.push(`series ${series.name}`);
    for (let i = 0; i < series.xRaw.length; i++) {
      lines.push(`${series.xRaw[i]},${series.yRaw[i]}`);
    }
  }
  return lines.join("\n") + "\n";
}
