import { column, num, readCsv } from "./csv.js";
import { displayName, schemeRank } from "./schemes.js";
import { Axis, BarChart, barChart } from "./svg.js";

export interface CostRow {
  scheme: string;
  fronthaul_reals: number;
  c_serial: number;
  c_parallel: number;
  c_total: number;
}

export function loadCost(path: string): CostRow[] {
  const table = readCsv(path);
  const cols = {
    scheme: column(table, "scheme"),
    fronthaul_reals: column(table, "fronthaul_reals"),
    c_serial: column(table, "c_serial"),
    c_parallel: column(table, "c_parallel"),
    c_total: column(table, "c_total"),
  };
  const rows: CostRow[] = table.rows.map((r, i) => ({
    scheme: r[cols.scheme]!,
    fronthaul_reals: num(table, i, cols.fronthaul_reals),
    c_serial: num(table, i, cols.c_serial),
    c_parallel: num(table, i, cols.c_parallel),
    c_total: num(table, i, cols.c_total),
  }));
  rows.sort((a, b) => {
    const ka = `${a.scheme.endsWith("_uc") ? 1 : 0}_${schemeRank(a.scheme)}`;
    const kb = `${b.scheme.endsWith("_uc") ? 1 : 0}_${schemeRank(b.scheme)}`;
    return ka < kb ? -1 : 1;
  });
  return rows;
}

function logAxis(label: string, values: number[]): Axis {
  const pos = values.filter((v) => v > 0);
  const lo = Math.min(...pos);
  const hi = Math.max(...pos);
  return {
    label,
    min: 10 ** Math.floor(Math.log10(lo)),
    max: 10 ** Math.ceil(Math.log10(hi)),
    log: true,
  };
}

function groupLabel(scheme: string): string {
  return scheme.endsWith("_uc")
    ? `${displayName(scheme.slice(0, -3))} uc`
    : displayName(scheme);
}

/** Fronthaul load per coherence block, one bar per cost.csv row. */
export function fronthaulFigure(rows: CostRow[]): BarChart {
  const values = rows.map((r) => [r.fronthaul_reals]);
  return barChart(
    "Fronthaul load per coherence block",
    rows.map((r) => groupLabel(r.scheme)),
    ["real values / block"],
    values,
    logAxis("real values per block", rows.map((r) => r.fronthaul_reals)),
  );
}

/** Total AP-side complexity per coherence block (serial chain included). */
export function complexityFigure(rows: CostRow[]): BarChart {
  const values = rows.map((r) => [r.c_total]);
  return barChart(
    "AP-side complexity per coherence block",
    rows.map((r) => groupLabel(r.scheme)),
    ["complex MACs / block"],
    values,
    logAxis("complex MACs per block", rows.map((r) => r.c_total)),
  );
}

export function costFigures(path: string): {
  fronthaul: BarChart;
  complexity: BarChart;
} {
  const rows = loadCost(path);
  return { fronthaul: fronthaulFigure(rows), complexity: complexityFigure(rows) };
}
